#include "qdstat/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace qdstat::cli {
namespace {

using nlohmann::json;

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

// A value inside the document together with its JSON pointer.
class Node {
public:
    Node(const json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

    const json& value() const { return value_; }
    const std::string& pointer() const { return pointer_; }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(pointer_, what); }

    const Node& object(std::initializer_list<const char*> allowed) const {
        if (!value_.is_object()) fail("expected an object");
        for (const auto& [key, _] : value_.items()) {
            const bool known =
                std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
            if (!known) throw ConfigError(pointer_ + "/" + escape_token(key), "unknown key");
        }
        return *this;
    }

    bool has(const char* key) const { return value_.contains(key); }
    Node at(const char* key) const {
        if (!has(key)) throw ConfigError(pointer_ + "/" + key, "required key is missing");
        return Node(value_.at(key), pointer_ + "/" + key);
    }
    Node at(std::size_t i) const { return Node(value_.at(i), pointer_ + "/" + std::to_string(i)); }

    double number() const {
        if (!value_.is_number()) fail("expected a number");
        const double v = value_.get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }
    double positive() const {
        const double v = number();
        if (!(v > 0.0)) fail("must be positive");
        return v;
    }
    double non_negative() const {
        const double v = number();
        if (!(v >= 0.0)) fail("must be non-negative");
        return v;
    }
    std::size_t count() const {
        if (!value_.is_number_integer() || value_.get<long long>() < 0) fail("expected a non-negative integer");
        return value_.get<std::size_t>();
    }
    std::string string() const {
        if (!value_.is_string()) fail("expected a string");
        return value_.get<std::string>();
    }

    std::optional<double> optional_number(const char* key) const {
        return has(key) ? std::optional<double>(at(key).number()) : std::nullopt;
    }

    // Exactly one of `keys` must be present; returns its index.
    std::size_t one_of(std::initializer_list<const char*> keys) const {
        std::size_t found = keys.size();
        std::size_t i = 0;
        for (const char* k : keys) {
            if (has(k)) {
                if (found != keys.size()) {
                    throw ConfigError(pointer_ + "/" + k, "conflicts with /" + std::string(*(keys.begin() + found)));
                }
                found = i;
            }
            ++i;
        }
        if (found == keys.size()) {
            std::string names;
            for (const char* k : keys) names += std::string(names.empty() ? "" : ", ") + k;
            fail("one of {" + names + "} is required");
        }
        return found;
    }

private:
    const json& value_;
    std::string pointer_;
};

std::vector<double> parse_axis(const Node& node) {
    std::vector<double> out;
    if (node.value().is_array()) {
        for (std::size_t i = 0; i < node.value().size(); ++i) out.push_back(node.at(i).non_negative());
    } else {
        node.object({"start", "stop", "count"});
        const double start = node.at("start").non_negative();
        const double stop = node.at("stop").non_negative();
        const std::size_t n = node.at("count").count();
        if (n == 0) node.at("count").fail("must be at least 1");
        if (n > 1 && !(stop > start)) node.at("stop").fail("must exceed start");
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    }
    if (out.empty()) node.fail("axis is empty");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) node.fail("axis must be strictly increasing");
    }
    return out;
}

EmitterSpec parse_emitter(const Node& node, std::size_t index) {
    node.object({"name", "gamma_mhz_over_2pi", "gamma_per_ns", "omega_over_gamma", "omega_mhz_over_2pi",
                 "omega_per_ns", "sigma_diffusion_mhz_over_2pi", "impurity", "g2_zero", "bunching"});
    EmitterSpec spec{node.has("name") ? node.at("name").string() : std::string(1, static_cast<char>('A' + index)),
                     EmitterParams(AngularFrequency::per_ns(1.0), AngularFrequency{}),
                     std::nullopt,
                     {}};
    if (spec.name.empty() || spec.name.find_first_of("/\\. ") != std::string::npos) {
        node.at("name").fail("must be a non-empty token without '/', '\\', '.' or spaces");
    }

    const AngularFrequency gamma = node.one_of({"gamma_mhz_over_2pi", "gamma_per_ns"}) == 0
                                       ? AngularFrequency::mhz_over_2pi(node.at("gamma_mhz_over_2pi").positive())
                                       : AngularFrequency::per_ns(node.at("gamma_per_ns").positive());
    AngularFrequency omega;
    switch (node.one_of({"omega_over_gamma", "omega_mhz_over_2pi", "omega_per_ns"})) {
        case 0: omega = gamma * node.at("omega_over_gamma").non_negative(); break;
        case 1: omega = AngularFrequency::mhz_over_2pi(node.at("omega_mhz_over_2pi").non_negative()); break;
        default: omega = AngularFrequency::per_ns(node.at("omega_per_ns").non_negative()); break;
    }
    const AngularFrequency sigma = AngularFrequency::mhz_over_2pi(
        node.has("sigma_diffusion_mhz_over_2pi") ? node.at("sigma_diffusion_mhz_over_2pi").non_negative() : 0.0);
    double impurity = 0.0;
    if (node.has("impurity")) {
        impurity = node.at("impurity").non_negative();
        if (impurity >= 1.0) node.at("impurity").fail("must lie in [0, 1)");
    }
    spec.params = EmitterParams(gamma, omega, sigma, impurity);
    if (node.has("g2_zero")) {
        const double g = node.at("g2_zero").non_negative();
        if (g >= 1.0) node.at("g2_zero").fail("must lie in [0, 1)");
        spec.g2_zero = g;
    }
    if (node.has("bunching")) {
        const Node b = node.at("bunching");
        b.object({"amplitude", "timescale_ns"});
        spec.bunching = BunchingEnvelope(b.at("amplitude").non_negative(), ns_to_s(b.at("timescale_ns").positive()));
    }
    return spec;
}

HomSpec parse_hom(const Node& node) {
    node.object({"weight_a", "weight_b", "r_constant", "detuning_mhz_over_2pi", "ensemble_sigma_mhz_over_2pi",
                 "monte_carlo_samples"});
    HomSpec spec;
    spec.weight_a = node.at("weight_a").non_negative();
    if (spec.weight_a > 1.0) node.at("weight_a").fail("must not exceed 1");
    spec.weight_b = node.has("weight_b") ? node.at("weight_b").non_negative() : 1.0 - spec.weight_a;
    if (std::abs(spec.weight_a + spec.weight_b - 1.0) > 1e-9) node.at("weight_b").fail("weights must sum to 1");
    if (node.has("r_constant")) spec.r_constant = node.at("r_constant").positive();
    if (node.has("detuning_mhz_over_2pi")) spec.detuning_mhz = node.at("detuning_mhz_over_2pi").number();
    if (node.has("ensemble_sigma_mhz_over_2pi")) {
        spec.ensemble_sigma_mhz = node.at("ensemble_sigma_mhz_over_2pi").non_negative();
    }
    if (node.has("monte_carlo_samples")) {
        spec.monte_carlo_samples = node.at("monte_carlo_samples").count();
        if (spec.monte_carlo_samples == 1) node.at("monte_carlo_samples").fail("need 0 (analytic) or at least 2");
    }
    return spec;
}

YieldSpec parse_yield(const Node& node) {
    node.object({"sigma_nm", "center_nm", "area_um2", "waveguide_length_um", "waveguide_width_um", "penalty",
                 "pair_convention", "delta_lambda_nm", "density_per_um2"});
    YieldSpec spec;
    YieldConfig& c = spec.config;
    if (node.has("sigma_nm")) c.sigma_nm = node.at("sigma_nm").positive();
    if (node.has("center_nm")) c.center_nm = node.at("center_nm").positive();
    if (node.has("area_um2")) {
        if (node.has("waveguide_length_um") || node.has("waveguide_width_um")) {
            node.at("area_um2").fail("give either area_um2 or the waveguide dimensions, not both");
        }
        c.area_um2 = node.at("area_um2").positive();
    } else if (node.has("waveguide_length_um") || node.has("waveguide_width_um")) {
        c.area_um2 = node.at("waveguide_length_um").positive() * node.at("waveguide_width_um").positive();
    }
    if (node.has("penalty")) {
        c.penalty = node.at("penalty").positive();
        if (c.penalty > 1.0) node.at("penalty").fail("must lie in (0, 1]");
    }
    if (node.has("pair_convention")) {
        const std::string conv = node.at("pair_convention").string();
        if (conv == "squared") {
            c.convention = PairConvention::Squared;
        } else if (conv == "combinations") {
            c.convention = PairConvention::Combinations;
        } else {
            node.at("pair_convention").fail("expected \"squared\" or \"combinations\"");
        }
    }
    spec.delta_lambda_nm = parse_axis(node.at("delta_lambda_nm"));
    spec.density_per_um2 = parse_axis(node.at("density_per_um2"));
    return spec;
}

FitSpec parse_fit(const Node& node) {
    node.object({"initial", "fixed", "bounds", "settings"});
    FitSpec spec;
    if (node.has("initial")) {
        const Node init = node.at("initial");
        if (!init.value().is_object()) init.fail("expected an object of parameter values");
        for (const auto& [key, v] : init.value().items()) Node(v, init.pointer() + "/" + escape_token(key)).number();
        spec.initial = init.value();
    }
    if (node.has("fixed")) {
        const Node fixed = node.at("fixed");
        if (!fixed.value().is_array()) fixed.fail("expected an array of parameter names");
        for (std::size_t i = 0; i < fixed.value().size(); ++i) spec.fixed.push_back(fixed.at(i).string());
    }
    if (node.has("bounds")) {
        const Node bounds = node.at("bounds");
        if (!bounds.value().is_object()) bounds.fail("expected an object of [lo, hi] pairs");
        for (const auto& [key, v] : bounds.value().items()) {
            const Node b(v, bounds.pointer() + "/" + escape_token(key));
            if (!v.is_array() || v.size() != 2) b.fail("expected [lo, hi]");
            if (!(b.at(std::size_t{0}).number() <= b.at(std::size_t{1}).number())) b.fail("lo must not exceed hi");
        }
        spec.bounds = bounds.value();
    }
    if (node.has("settings")) {
        const Node settings = node.at("settings");
        if (!settings.value().is_object()) settings.fail("expected an object");
        for (const auto& [key, v] : settings.value().items()) {
            Node(v, settings.pointer() + "/" + escape_token(key)).number();
        }
        spec.settings = settings.value();
    }
    return spec;
}

}  // namespace

const EmitterSpec& RunConfig::require_emitters(std::size_t at_least) const {
    if (emitters.size() < at_least) {
        throw ConfigError("/emitters", "at least " + std::to_string(at_least) + " emitter(s) required");
    }
    return emitters.front();
}

const HomSpec& RunConfig::require_hom() const {
    if (!hom) throw ConfigError("/hom", "required section is missing");
    return *hom;
}

const YieldSpec& RunConfig::require_yield() const {
    if (!yield) throw ConfigError("/yield", "required section is missing");
    return *yield;
}

RunConfig parse_config(const json& doc) {
    const Node root(doc, "");
    root.object({"emitters", "hom", "irf", "grid", "output", "fit", "yield", "sweep"});
    RunConfig cfg;
    try {
        if (root.has("emitters")) {
            const Node list = root.at("emitters");
            if (!list.value().is_array()) list.fail("expected an array");
            for (std::size_t i = 0; i < list.value().size(); ++i) {
                cfg.emitters.push_back(parse_emitter(list.at(i), i));
                for (std::size_t k = 0; k < i; ++k) {
                    if (cfg.emitters[k].name == cfg.emitters[i].name) list.at(i).fail("duplicate emitter name");
                }
            }
        }
        if (root.has("hom")) cfg.hom = parse_hom(root.at("hom"));
        if (root.has("irf")) {
            const Node irf = root.at("irf");
            irf.object({"fwhm_ps"});
            cfg.irf = IrfParams(ps_to_s(irf.at("fwhm_ps").non_negative()));
        }
        if (root.has("grid")) {
            const Node grid = root.at("grid");
            grid.object({"tau_max_ns", "tau_step_ps"});
            cfg.grid.tau_max_s = ns_to_s(grid.at("tau_max_ns").positive());
            cfg.grid.tau_step_s = ps_to_s(grid.at("tau_step_ps").positive());
            if (cfg.grid.tau_max_s / cfg.grid.tau_step_s > 1e6) grid.fail("grid would exceed a million points");
        }
        if (root.has("output")) {
            const Node out = root.at("output");
            out.object({"path", "format"});
            if (out.has("path")) cfg.output.path = out.at("path").string();
            if (out.has("format")) {
                const std::string f = out.at("format").string();
                if (f == "csv") {
                    cfg.output.format = OutputFormat::Csv;
                } else if (f == "json") {
                    cfg.output.format = OutputFormat::Json;
                } else if (f == "both") {
                    cfg.output.format = OutputFormat::Both;
                } else {
                    out.at("format").fail("expected \"csv\", \"json\" or \"both\"");
                }
            }
        }
        if (root.has("fit")) cfg.fit = parse_fit(root.at("fit"));
        if (root.has("yield")) cfg.yield = parse_yield(root.at("yield"));
        if (root.has("sweep")) {
            const Node s = root.at("sweep");
            s.object({"gamma_min_mhz_over_2pi", "gamma_max_mhz_over_2pi", "count", "omega_over_gamma"});
            if (s.has("gamma_min_mhz_over_2pi")) cfg.sweep.gamma_min_mhz = s.at("gamma_min_mhz_over_2pi").positive();
            if (s.has("gamma_max_mhz_over_2pi")) cfg.sweep.gamma_max_mhz = s.at("gamma_max_mhz_over_2pi").positive();
            if (s.has("count")) cfg.sweep.count = s.at("count").count();
            if (s.has("omega_over_gamma")) cfg.sweep.omega_over_gamma = s.at("omega_over_gamma").non_negative();
            if (cfg.sweep.gamma_max_mhz < cfg.sweep.gamma_min_mhz) {
                s.at("gamma_max_mhz_over_2pi").fail("must not be below gamma_min_mhz_over_2pi");
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        // Library-side validation that slipped past the schema checks.
        throw ConfigError("", e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("", "'" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

}  // namespace qdstat::cli
