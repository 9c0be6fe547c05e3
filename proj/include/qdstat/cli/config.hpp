#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdstat/correlation.hpp"
#include "qdstat/emitter.hpp"
#include "qdstat/error.hpp"
#include "qdstat/irf.hpp"
#include "qdstat/yield.hpp"

namespace qdstat::cli {

/// Invalid run configuration. `pointer` is the JSON pointer of the offending
/// value ("" for the document root).
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& what)
        : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct EmitterSpec {
    std::string name;
    EmitterParams params;
    std::optional<double> g2_zero;
    BunchingEnvelope bunching;
};

struct HomSpec {
    double weight_a = 0.5;
    double weight_b = 0.5;
    std::optional<double> r_constant;
    double detuning_mhz = 0.0;
    std::optional<double> ensemble_sigma_mhz;
    std::size_t monte_carlo_samples = 0;
};

struct GridSpec {
    double tau_max_s = 10e-9;
    double tau_step_s = 10e-12;
};

enum class OutputFormat { Csv, Json, Both };

struct OutputSpec {
    std::string path = ".";
    OutputFormat format = OutputFormat::Both;
};

struct FitSpec {
    nlohmann::json initial = nlohmann::json::object();
    std::vector<std::string> fixed;
    nlohmann::json bounds = nlohmann::json::object();
    nlohmann::json settings = nlohmann::json::object();
};

struct YieldSpec {
    YieldConfig config;
    std::vector<double> delta_lambda_nm;
    std::vector<double> density_per_um2;
};

struct SweepSpec {
    double gamma_min_mhz = 100.0;
    double gamma_max_mhz = 500.0;
    std::size_t count = 81;
    double omega_over_gamma = 0.3;
};

/// Parsed and validated run configuration. Every section is optional at parse
/// time; commands ask for the sections they need through the require_* helpers.
struct RunConfig {
    std::vector<EmitterSpec> emitters;
    std::optional<HomSpec> hom;
    IrfParams irf;
    GridSpec grid;
    OutputSpec output;
    std::optional<FitSpec> fit;
    std::optional<YieldSpec> yield;
    SweepSpec sweep;

    const EmitterSpec& require_emitters(std::size_t at_least) const;
    const HomSpec& require_hom() const;
    const YieldSpec& require_yield() const;
};

/// Validates the document against the schema and converts units. Unknown keys
/// are rejected; frequencies must carry a convention suffix
/// (_mhz_over_2pi or _per_ns). Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a config file. Throws ConfigError on I/O or JSON errors.
RunConfig load_config(const std::string& path);

}  // namespace qdstat::cli
