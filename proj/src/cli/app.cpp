#include "qdstat/cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qdstat/bloch.hpp"
#include "qdstat/cli/atomic_output.hpp"
#include "qdstat/cli/config.hpp"
#include "qdstat/correlation.hpp"
#include "qdstat/fit.hpp"
#include "qdstat/fit_models.hpp"
#include "qdstat/hom.hpp"
#include "qdstat/irf.hpp"
#include "qdstat/tls.hpp"
#include "qdstat/yield.hpp"

namespace qdstat::cli {
namespace {

using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 1;
};

RunConfig load_or_default(const GlobalOptions& opts) {
    if (opts.config_path.empty()) return parse_config(json::object());
    return load_config(opts.config_path);
}

std::string output_dir(const GlobalOptions& opts, const RunConfig& cfg) {
    return opts.out_dir.empty() ? cfg.output.path : opts.out_dir;
}

void require_grid_resolves_irf(const RunConfig& cfg) {
    if (cfg.irf.enabled() && cfg.grid.tau_step_s > 0.25 * cfg.irf.fwhm()) {
        throw ConfigError("/grid/tau_step_ps", "step must not exceed IRF FWHM / 4 (" +
                                                   std::to_string(0.25 * cfg.irf.fwhm() * 1e12) + " ps)");
    }
}

void add_curve(AtomicOutput& files, const RunConfig& cfg, const std::string& stem, const CorrelationCurve& curve,
               const std::vector<ExtraColumn>& extra = {}) {
    if (cfg.output.format != OutputFormat::Json) {
        std::ostringstream csv;
        write_csv(csv, curve, extra);
        files.add(stem + ".csv", csv.str());
    }
    if (cfg.output.format != OutputFormat::Csv) {
        files.add(stem + ".json", to_json(curve).dump(2) + "\n");
    }
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void report(std::ostream& out, const std::vector<std::filesystem::path>& written) {
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

int cmd_g1(const GlobalOptions& opts, bool oracle, std::ostream& out) {
    const RunConfig cfg = load_or_default(opts);
    cfg.require_emitters(1);
    const TauGrid grid = TauGrid::non_negative(cfg.grid.tau_max_s, cfg.grid.tau_step_s);
    AtomicOutput files(output_dir(opts, cfg));
    for (const EmitterSpec& e : cfg.emitters) {
        const CorrelationCurve curve = g1_curve(e.params, grid);
        std::vector<ExtraColumn> extra;
        if (oracle) {
            const BlochCorrelations ref = bloch_oracle(e.params, grid);
            std::vector<double> residual(grid.size);
            for (std::size_t i = 0; i < grid.size; ++i) residual[i] = curve[i] - ref.g1[i];
            out << "g1 " << e.name << ": max |oracle residual| = " << format_number(max_abs(residual)) << '\n';
            extra.push_back({"oracle_residual", std::move(residual)});
        }
        add_curve(files, cfg, "g1_" + e.name, curve, extra);
    }
    report(out, files.commit());
    return kSuccess;
}

int cmd_g2(const GlobalOptions& opts, bool oracle, std::ostream& out) {
    const RunConfig cfg = load_or_default(opts);
    cfg.require_emitters(1);
    require_grid_resolves_irf(cfg);
    const TauGrid grid = TauGrid::symmetric(cfg.grid.tau_max_s, cfg.grid.tau_step_s);
    AtomicOutput files(output_dir(opts, cfg));
    for (const EmitterSpec& e : cfg.emitters) {
        const CorrelationCurve curve = g2_measured(MeasuredG2Model{e.params, e.bunching, cfg.irf}, grid);
        std::vector<ExtraColumn> extra;
        if (oracle) {
            // Residual of the ideal closed form against the oracle, at |tau|.
            const TauGrid half = TauGrid::non_negative(cfg.grid.tau_max_s, cfg.grid.tau_step_s);
            const BlochCorrelations ref = bloch_oracle(e.params, half);
            const std::size_t centre = grid.index_of_zero();
            std::vector<double> residual(grid.size);
            for (std::size_t i = 0; i < grid.size; ++i) {
                const std::size_t k = i >= centre ? i - centre : centre - i;
                residual[i] = g2_tls(e.params, grid.at(i)) - ref.g2[k];
            }
            out << "g2 " << e.name << ": max |oracle residual| = " << format_number(max_abs(residual)) << '\n';
            extra.push_back({"oracle_residual", std::move(residual)});
        }
        add_curve(files, cfg, "g2_" + e.name, curve, extra);
    }
    report(out, files.commit());
    return kSuccess;
}

double g2zero_of(const EmitterSpec& e) {
    return e.g2_zero ? *e.g2_zero : impurity_to_g2zero(e.params.impurity());
}

int cmd_hom(const GlobalOptions& opts, std::optional<double> ensemble_flag, std::ostream& out) {
    const RunConfig cfg = load_or_default(opts);
    cfg.require_emitters(2);
    const HomSpec& hom = cfg.require_hom();
    require_grid_resolves_irf(cfg);
    const EmitterSpec& a = cfg.emitters[0];
    const EmitterSpec& b = cfg.emitters[1];

    std::optional<double> ensemble = ensemble_flag ? ensemble_flag : hom.ensemble_sigma_mhz;
    Detuning detuning = FixedDetuning{AngularFrequency::mhz_over_2pi(hom.detuning_mhz).rad_per_s()};
    if (ensemble) {
        if (*ensemble < 0.0) throw ConfigError("/hom/ensemble_sigma_mhz_over_2pi", "must be non-negative");
        detuning = GaussianDetuning{AngularFrequency::mhz_over_2pi(*ensemble).rad_per_s()};
    }
    const HomConfig config(a.params, b.params, hom.weight_a, hom.weight_b, g2zero_of(a), g2zero_of(b),
                           hom.r_constant, detuning);
    const TauGrid grid = TauGrid::symmetric(cfg.grid.tau_max_s, cfg.grid.tau_step_s);
    HomCurves curves = simulate_hom(config, grid, cfg.irf, a.bunching, b.bunching);

    json summary{{"R", curves.r_constant},
                 {"r_solved", !hom.r_constant.has_value()},
                 {"weight_a", config.weight_a()},
                 {"weight_b", config.weight_b()},
                 {"zeta_a", config.zeta_a()},
                 {"zeta_b", config.zeta_b()}};
    if (ensemble) {
        summary["ensemble_sigma_mhz_over_2pi"] = *ensemble;
        if (hom.monte_carlo_samples > 0) {
            MonteCarloAverage mc = monte_carlo_average_parallel(config, curves.g2_a, curves.g2_b, curves.g1_a,
                                                                curves.g1_b, hom.monte_carlo_samples, opts.seed);
            curves.parallel = mc.mean;
            curves.vis = visibility(curves.parallel, curves.cross);
            summary["monte_carlo_samples"] = mc.samples;
            summary["seed"] = opts.seed;
            summary["max_standard_error"] = max_abs(mc.standard_error);
        }
    } else {
        summary["detuning_mhz_over_2pi"] = hom.detuning_mhz;
    }
    const auto& v = curves.vis.values();
    summary["V_peak"] = *std::max_element(v.begin(), v.end());
    summary["V_zero"] = curves.vis.at_zero();
    summary["g2_parallel_zero"] = curves.parallel.at_zero();
    summary["g2_cross_zero"] = curves.cross.at_zero();

    AtomicOutput files(output_dir(opts, cfg));
    add_curve(files, cfg, "g2_cross", curves.cross);
    add_curve(files, cfg, "g2_parallel", curves.parallel);
    add_curve(files, cfg, "visibility", curves.vis);
    files.add("hom_summary.json", summary.dump(2) + "\n");
    out << "R = " << format_number(curves.r_constant) << ", V_peak = " << format_number(summary["V_peak"].get<double>())
        << ", g2_parallel(0) = " << format_number(summary["g2_parallel_zero"].get<double>()) << '\n';
    report(out, files.commit());
    return kSuccess;
}

struct DataSet {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
};

DataSet read_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open data file '" + path + "'");
    DataSet d;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            header_seen = true;
            if (cells.size() >= 2 && cells[0] == "x" && cells[1] == "y") {
                if (cells.size() > 3 || (cells.size() == 3 && cells[2] != "sigma_y")) {
                    throw ConfigError("", path + ": header must be x,y[,sigma_y]");
                }
                columns = cells.size();
                continue;
            }
        }
        if (columns == 0) columns = cells.size();
        if (cells.size() != columns || columns < 2 || columns > 3) {
            throw ConfigError("", path + ":" + std::to_string(row) + ": expected " + std::to_string(columns) +
                                      " columns");
        }
        try {
            d.x.push_back(std::stod(cells[0]));
            d.y.push_back(std::stod(cells[1]));
            if (columns == 3) d.sigma.push_back(std::stod(cells[2]));
        } catch (const std::exception&) {
            throw ConfigError("", path + ":" + std::to_string(row) + ": not a number");
        }
    }
    if (d.x.empty()) throw ConfigError("", path + ": no data rows");
    return d;
}

int cmd_fit(const GlobalOptions& opts, const std::string& model_name, const std::string& data_path,
            std::ostream& out) {
    const RunConfig cfg = load_or_default(opts);
    const FitSpec spec = cfg.fit.value_or(FitSpec{});

    const std::vector<std::string> names = model_names();
    if (std::find(names.begin(), names.end(), model_name) == names.end()) {
        throw ConfigError("", "unknown model '" + model_name + "'");
    }
    double irf_setting = 0.0;
    for (const auto& [key, value] : spec.settings.items()) {
        const bool ok = (model_name == "decay" && key == "irf_fwhm_ns") || (model_name == "g2" && key == "irf_fwhm_ps");
        if (!ok) throw ConfigError("/fit/settings/" + key, "not a setting of model " + model_name);
        irf_setting = value.get<double>();
        if (irf_setting < 0.0) throw ConfigError("/fit/settings/" + key, "must be non-negative");
    }
    const ModelSpec model = model_by_name(model_name, irf_setting);
    const DataSet data = read_data(data_path);

    auto index_of = [&](const std::string& pointer, const std::string& param) {
        const auto it = std::find(model.params.begin(), model.params.end(), param);
        if (it == model.params.end()) throw ConfigError(pointer, "model " + model_name + " has no parameter '" + param + "'");
        return static_cast<std::size_t>(it - model.params.begin());
    };

    FitProblem problem;
    problem.model = model.model;
    problem.x = data.x;
    problem.y = data.y;
    problem.sigma_y = data.sigma;
    problem.names = model.params;
    problem.bounds = model.bounds;
    problem.fixed_mask.assign(model.params.size(), false);

    std::vector<std::optional<double>> initial(model.params.size());
    if (model.guess) {
        const std::vector<double> g = model.guess(data.x, data.y);
        for (std::size_t k = 0; k < g.size(); ++k) initial[k] = g[k];
    }
    for (const auto& [key, value] : spec.initial.items()) initial[index_of("/fit/initial/" + key, key)] = value.get<double>();
    for (std::size_t i = 0; i < spec.fixed.size(); ++i) {
        problem.fixed_mask[index_of("/fit/fixed/" + std::to_string(i), spec.fixed[i])] = true;
    }
    for (const auto& [key, value] : spec.bounds.items()) {
        problem.bounds[index_of("/fit/bounds/" + key, key)] = Bound{value[0].get<double>(), value[1].get<double>()};
    }
    std::string missing;
    for (std::size_t k = 0; k < initial.size(); ++k) {
        if (!initial[k]) missing += (missing.empty() ? "" : ", ") + model.params[k];
    }
    if (!missing.empty()) throw ConfigError("/fit/initial", "model " + model_name + " needs starting values for: " + missing);
    for (std::size_t k = 0; k < initial.size(); ++k) {
        double v = *initial[k];
        if (problem.bounds[k]) {
            if (spec.initial.contains(model.params[k]) && (v < problem.bounds[k]->lo || v > problem.bounds[k]->hi)) {
                throw ConfigError("/fit/initial/" + model.params[k], "outside its bounds");
            }
            v = std::clamp(v, problem.bounds[k]->lo, problem.bounds[k]->hi);
        }
        problem.initial.push_back(v);
    }
    try {
        problem.validate();
    } catch (const DomainError& e) {
        throw ConfigError("/fit", e.what());
    }

    const FitResult result = fit(problem);
    json params = json::array();
    for (std::size_t k = 0; k < model.params.size(); ++k) {
        params.push_back({{"name", model.params[k]},
                          {"value", result.params[k]},
                          {"uncertainty", result.uncertainties[k]},
                          {"fixed", static_cast<bool>(problem.fixed_mask[k])}});
    }
    json free = json::array();
    for (std::size_t k : result.free_indices) free.push_back(model.params[k]);
    json covariance = json::array();
    for (Eigen::Index r = 0; r < result.covariance.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < result.covariance.cols(); ++c) row.push_back(result.covariance(r, c));
        covariance.push_back(row);
    }
    const json report_json{{"model", model_name},
                           {"converged", result.converged},
                           {"message", result.message},
                           {"iterations", result.iterations},
                           {"chi2", result.chi2},
                           {"reduced_chi2", result.reduced_chi2},
                           {"parameters", params},
                           {"free_parameters", free},
                           {"covariance", covariance}};
    if (!result.converged) {
        out << report_json.dump(2) << '\n';
        throw NumericalError("fit did not converge: " + result.message);
    }
    AtomicOutput files(output_dir(opts, cfg));
    files.add("fit_" + model_name + ".json", report_json.dump(2) + "\n");
    for (std::size_t k = 0; k < model.params.size(); ++k) {
        out << model.params[k] << " = " << format_number(result.params[k]) << " +- "
            << format_number(result.uncertainties[k]) << (problem.fixed_mask[k] ? " (fixed)" : "") << '\n';
    }
    report(out, files.commit());
    return kSuccess;
}

int cmd_yield_map(const GlobalOptions& opts, std::ostream& out) {
    const RunConfig cfg = load_or_default(opts);
    const YieldSpec& spec = cfg.require_yield();
    const YieldGrid grid = yield_map(spec.config, spec.delta_lambda_nm, spec.density_per_um2);
    std::ostringstream csv;
    write_csv(csv, grid);
    AtomicOutput files(output_dir(opts, cfg));
    files.add("yield_map.csv", csv.str());
    report(out, files.commit());
    return kSuccess;
}

int cmd_irf_sweep(const GlobalOptions& opts, std::ostream& out) {
    const RunConfig cfg = load_or_default(opts);
    const SweepSpec& s = cfg.sweep;
    const auto points = jitter_sweep(s.gamma_min_mhz, s.gamma_max_mhz, s.count, cfg.irf, s.omega_over_gamma);
    std::ostringstream csv;
    csv << "gamma_mhz_over_2pi,g2_zero\n" << std::setprecision(17);
    for (const auto& p : points) csv << p.gamma_mhz_over_2pi << ',' << p.g2_zero << '\n';
    AtomicOutput files(output_dir(opts, cfg));
    files.add("irf_sweep.csv", csv.str());
    report(out, files.commit());
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photon statistics of two resonantly driven quantum emitters", "qdstat"};
    app.require_subcommand(1);
    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", opts.out_dir, "Output directory (overrides output.path)");
    app.add_option("--seed", opts.seed, "Seed for Monte Carlo averaging");

    bool g1_oracle = false;
    auto* g1 = app.add_subcommand("g1", "First-order coherence of each emitter");
    g1->add_flag("--oracle", g1_oracle, "Also integrate the Bloch equations and write the residual");

    bool g2_oracle = false;
    auto* g2 = app.add_subcommand("g2", "Measured second-order correlation of each emitter");
    g2->add_flag("--oracle", g2_oracle, "Also integrate the Bloch equations and write the residual");

    std::optional<double> ensemble;
    auto* hom = app.add_subcommand("hom", "Two-photon interference curves and visibility");
    hom->add_option("--ensemble", ensemble, "Average over a Gaussian mutual detuning of this width (MHz, /2pi)");

    std::string model_name;
    std::string data_path;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model to x,y[,sigma_y] data");
    fit_cmd->add_option("model", model_name, "Model name")->required();
    fit_cmd->add_option("--data", data_path, "CSV with columns x,y[,sigma_y]")->required();

    auto* yield = app.add_subcommand("yield-map", "Expected resonant emitter pairs over tuning range and density");
    auto* sweep = app.add_subcommand("irf-sweep", "Jitter-limited g2(0) versus decay rate");

    for (auto* sub : {g1, g2, hom, fit_cmd, yield, sweep}) sub->fallthrough();

    std::vector<std::string> argv_storage{"qdstat"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        if (g1->parsed()) return cmd_g1(opts, g1_oracle, out);
        if (g2->parsed()) return cmd_g2(opts, g2_oracle, out);
        if (hom->parsed()) return cmd_hom(opts, ensemble, out);
        if (fit_cmd->parsed()) return cmd_fit(opts, model_name, data_path, out);
        if (yield->parsed()) return cmd_yield_map(opts, out);
        if (sweep->parsed()) return cmd_irf_sweep(opts, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return kConfigError;
}

}  // namespace qdstat::cli
