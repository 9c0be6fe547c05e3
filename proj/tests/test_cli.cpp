#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "doctest.h"
#include "qdstat/cli/app.hpp"
#include "qdstat/cli/atomic_output.hpp"
#include "qdstat/lineshapes.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

using namespace qdstat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

json reference_config() {
    return json::parse(R"({
      "emitters": [
        {"name": "A", "gamma_mhz_over_2pi": 233, "omega_over_gamma": 0.48, "g2_zero": 0.13},
        {"name": "B", "gamma_mhz_over_2pi": 167, "omega_over_gamma": 0.34, "g2_zero": 0.04}
      ],
      "hom": {"weight_a": 0.59},
      "grid": {"tau_max_ns": 5, "tau_step_ps": 10}
    })");
}

std::vector<std::string> files_in(const fs::path& dir) {
    std::vector<std::string> names;
    if (!fs::exists(dir)) return names;
    for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("g1 with a minimal config writes one csv and one json") {
        testing::TempDir tmp("g1");
        const json cfg = json::parse(R"({"emitters": [{"gamma_per_ns": 1.46, "omega_over_gamma": 0.48}]})");
        const fs::path out = tmp.path() / "out";
        const Outcome r = run_cli({"--config", write_json(tmp.path(), "c.json", cfg).string(), "--out", out.string(), "g1"});
        CHECK(r.code == 0);
        CHECK(files_in(out) == std::vector<std::string>{"g1_A.csv", "g1_A.json"});
        const std::string csv = slurp(out / "g1_A.csv");
        CHECK(csv.rfind("tau_s,value\n", 0) == 0);
        CHECK(csv.find("oracle_residual") == std::string::npos);
        const json curve = json::parse(slurp(out / "g1_A.json"));
        CHECK(curve["kind"] == "g1_normalized");
    }

    TEST_CASE("oracle residual column and summary") {
        testing::TempDir tmp("oracle");
        const fs::path out = tmp.path() / "out";
        const Outcome r = run_cli({"--config", write_json(tmp.path(), "c.json", reference_config()).string(), "--out",
                                   out.string(), "g2", "--oracle"});
        REQUIRE(r.code == 0);
        CHECK(slurp(out / "g2_B.csv").rfind("tau_s,value,oracle_residual\n", 0) == 0);
        const auto pos = r.out.find("g2 B: max |oracle residual| = ");
        REQUIRE(pos != std::string::npos);
        const double residual = std::stod(r.out.substr(pos + 30));
        CHECK(residual <= 1e-6);
    }

    TEST_CASE("malformed configs fail cleanly without output") {
        testing::TempDir tmp("bad");
        const fs::path out = tmp.path() / "out";
        json cfg = reference_config();
        cfg["emitters"][1]["omega_over_gamma"] = "fast";
        Outcome r = run_cli({"--config", write_json(tmp.path(), "c.json", cfg).string(), "--out", out.string(), "hom"});
        CHECK(r.code == 2);
        CHECK(r.err.find("/emitters/1/omega_over_gamma") != std::string::npos);
        CHECK_FALSE(fs::exists(out));

        cfg = reference_config();
        cfg["grid"]["tau_step_ps"] = 100;
        cfg["irf"] = {{"fwhm_ps", 226}};
        r = run_cli({"--config", write_json(tmp.path(), "c.json", cfg).string(), "--out", out.string(), "g2"});
        CHECK(r.code == 2);
        CHECK(r.err.find("/grid/tau_step_ps") != std::string::npos);
        CHECK_FALSE(fs::exists(out));

        std::ofstream(tmp.path() / "broken.json") << "{\"emitters\": [";
        r = run_cli({"--config", (tmp.path() / "broken.json").string(), "--out", out.string(), "g1"});
        CHECK(r.code == 2);
        CHECK_FALSE(fs::exists(out));

        r = run_cli({"--config", (tmp.path() / "missing.json").string(), "g1"});
        CHECK(r.code == 2);
        r = run_cli({"--out", out.string(), "frobnicate"});
        CHECK(r.code == 2);
        r = run_cli({"--help"});
        CHECK(r.code == 0);
        CHECK_FALSE(fs::exists(out));
    }

    TEST_CASE("a failing run leaves earlier output untouched") {
        testing::TempDir tmp("keep");
        const fs::path out = tmp.path() / "out";
        const std::string cfg = write_json(tmp.path(), "c.json", reference_config()).string();
        REQUIRE(run_cli({"--config", cfg, "--out", out.string(), "g1"}).code == 0);
        const std::string before = slurp(out / "g1_A.csv");
        const auto listing = files_in(out);

        json dark = reference_config();
        dark["emitters"][0]["omega_over_gamma"] = 0.0;
        const Outcome r = run_cli({"--config", write_json(tmp.path(), "d.json", dark).string(), "--out", out.string(),
                                   "g1", "--oracle"});
        CHECK(r.code == 3);
        CHECK(slurp(out / "g1_A.csv") == before);
        CHECK(files_in(out) == listing);
    }

    TEST_CASE("atomic writer cleans up when it cannot publish") {
        testing::TempDir tmp("atomic");
        fs::create_directories(tmp.path() / "out" / "b.csv");  // a directory where a file must go
        cli::AtomicOutput files(tmp.path() / "out");
        files.add("a.csv", "1\n");
        files.add("b.csv", "2\n");
        CHECK_THROWS(files.commit());
        for (const std::string& name : files_in(tmp.path() / "out")) CHECK(name.find(".tmp") == std::string::npos);
    }

    TEST_CASE("hom summary for the reference parameters") {
        testing::TempDir tmp("hom");
        const fs::path out = tmp.path() / "out";
        const std::string cfg = write_json(tmp.path(), "c.json", reference_config()).string();
        REQUIRE(run_cli({"--config", cfg, "--out", out.string(), "hom"}).code == 0);
        CHECK(files_in(out) == std::vector<std::string>{"g2_cross.csv", "g2_cross.json", "g2_parallel.csv",
                                                         "g2_parallel.json", "hom_summary.json", "visibility.csv",
                                                         "visibility.json"});
        const json s = json::parse(slurp(out / "hom_summary.json"));
        CHECK(s["R"].get<double>() == doctest::Approx(2.033).epsilon(1e-3));
        CHECK(s["V_peak"].get<double>() == doctest::Approx(0.745).epsilon(1e-3));
        CHECK(s["g2_parallel_zero"].get<double>() == doctest::Approx(0.1367).epsilon(1e-3));

        const fs::path ens = tmp.path() / "ens";
        REQUIRE(run_cli({"--config", cfg, "--out", ens.string(), "hom", "--ensemble", "177"}).code == 0);
        const json e = json::parse(slurp(ens / "hom_summary.json"));
        CHECK(e["V_zero"].get<double>() <= s["V_zero"].get<double>());
        CHECK(e["ensemble_sigma_mhz_over_2pi"] == 177.0);
    }

    TEST_CASE("identical ideal emitters interfere perfectly") {
        testing::TempDir tmp("ideal");
        const json cfg = json::parse(R"({
          "emitters": [{"gamma_mhz_over_2pi": 233, "omega_over_gamma": 0.48},
                       {"gamma_mhz_over_2pi": 233, "omega_over_gamma": 0.48}],
          "hom": {"weight_a": 0.5, "r_constant": 1.0}, "grid": {"tau_max_ns": 2, "tau_step_ps": 10}})");
        const fs::path out = tmp.path() / "out";
        REQUIRE(run_cli({"--config", write_json(tmp.path(), "c.json", cfg).string(), "--out", out.string(), "hom"}).code == 0);
        const json s = json::parse(slurp(out / "hom_summary.json"));
        CHECK(s["V_peak"].get<double>() == 1.0);
    }

    TEST_CASE("reruns are byte-identical") {
        testing::TempDir tmp("determinism");
        json cfg = reference_config();
        cfg["hom"]["monte_carlo_samples"] = 2000;
        cfg["hom"]["ensemble_sigma_mhz_over_2pi"] = 177;
        cfg["irf"] = {{"fwhm_ps", 226}};
        const std::string path = write_json(tmp.path(), "c.json", cfg).string();
        const fs::path a = tmp.path() / "a";
        const fs::path b = tmp.path() / "b";
        const fs::path c = tmp.path() / "c";
        for (const fs::path& dir : {a, b}) {
            REQUIRE(run_cli({"--config", path, "--out", dir.string(), "--seed", "12345", "hom"}).code == 0);
            REQUIRE(run_cli({"--config", path, "--out", dir.string(), "g2"}).code == 0);
        }
        REQUIRE(run_cli({"--config", path, "--out", c.string(), "--seed", "54321", "hom"}).code == 0);
        for (const std::string& name : files_in(a)) CHECK(slurp(a / name) == slurp(b / name));
        CHECK(slurp(a / "g2_parallel.csv") != slurp(c / "g2_parallel.csv"));
        CHECK(json::parse(slurp(a / "hom_summary.json"))["seed"] == 12345);
    }

    TEST_CASE("fit subcommand") {
        testing::TempDir tmp("fit");
        const LineshapeParams truth = testing::lorentzian_truth();
        const testing::Synthetic s = testing::with_relative_noise(
            testing::linspace(-1500.0, 1500.0, 201), [&](double nu) { return lorentzian(nu, truth); }, 99);
        {
            std::ofstream data(tmp.path() / "rf.csv");
            data << "x,y,sigma_y\n" << std::setprecision(17);
            for (std::size_t i = 0; i < s.x.size(); ++i) data << s.x[i] << ',' << s.y[i] << ',' << s.sigma[i] << '\n';
        }
        const fs::path out = tmp.path() / "out";
        const std::string data = (tmp.path() / "rf.csv").string();
        Outcome r = run_cli({"--out", out.string(), "fit", "lorentzian", "--data", data});
        REQUIRE(r.code == 0);
        json report = json::parse(slurp(out / "fit_lorentzian.json"));
        CHECK(report["converged"] == true);
        CHECK(report["parameters"][1]["name"] == "fwhm");
        CHECK(report["parameters"][1]["value"].get<double>() == doctest::Approx(468.0).epsilon(0.01));
        CHECK(report["covariance"].size() == 4);

        const json cfg = {{"fit", {{"initial", {{"offset", 50.0}}}, {"fixed", {"offset"}}}}};
        r = run_cli({"--config", write_json(tmp.path(), "c.json", cfg).string(), "--out", out.string(), "fit",
                     "lorentzian", "--data", data});
        REQUIRE(r.code == 0);
        report = json::parse(slurp(out / "fit_lorentzian.json"));
        CHECK(report["parameters"][3]["fixed"] == true);
        CHECK(report["parameters"][3]["value"] == 50.0);
        CHECK(report["parameters"][3]["uncertainty"] == 0.0);
        CHECK(report["covariance"].size() == 3);
        CHECK(report["free_parameters"] == json({"center", "fwhm", "amplitude"}));

        r = run_cli({"--out", (tmp.path() / "none").string(), "fit", "lorentzian", "--data",
                     (tmp.path() / "absent.csv").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("absent.csv") != std::string::npos);
        CHECK_FALSE(fs::exists(tmp.path() / "none"));

        r = run_cli({"--config", write_json(tmp.path(), "u.json", {{"fit", {{"fixed", {"width"}}}}}).string(), "fit",
                     "lorentzian", "--data", data});
        CHECK(r.code == 2);
        CHECK(r.err.find("/fit/fixed/0") != std::string::npos);

        r = run_cli({"--out", (tmp.path() / "none").string(), "fit", "decay", "--data", data});
        CHECK(r.code == 2);
        CHECK(r.err.find("starting values") != std::string::npos);
    }

    TEST_CASE("unidentifiable fit exits with a numerical failure and no file") {
        testing::TempDir tmp("fit_fail");
        {
            std::ofstream data(tmp.path() / "flat.csv");
            data << "x,y\n";
            for (int i = 0; i < 10; ++i) data << "5," << 100 + (i % 3) << '\n';
        }
        const fs::path out = tmp.path() / "out";
        const Outcome r = run_cli({"--out", out.string(), "fit", "saturation", "--data", (tmp.path() / "flat.csv").string()});
        CHECK(r.code == 3);
        CHECK_FALSE(fs::exists(out));
    }

    TEST_CASE("yield map and jitter sweep") {
        testing::TempDir tmp("yield");
        const json cfg = json::parse(R"({
          "yield": {"waveguide_length_um": 40, "waveguide_width_um": 0.2,
                    "delta_lambda_nm": [0.05, 0.1, 1.0], "density_per_um2": [0, 5, 10]},
          "irf": {"fwhm_ps": 226},
          "sweep": {"gamma_min_mhz_over_2pi": 100, "gamma_max_mhz_over_2pi": 500, "count": 9}})");
        const std::string path = write_json(tmp.path(), "c.json", cfg).string();
        const fs::path out = tmp.path() / "out";
        REQUIRE(run_cli({"--config", path, "--out", out.string(), "yield-map"}).code == 0);
        std::istringstream csv(slurp(out / "yield_map.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line == "delta_lambda_nm,density_per_um2,expected_pairs");
        int rows = 0;
        while (std::getline(csv, line)) {
            ++rows;
            double d = 0, rho = 0, n = 0;
            char c1 = 0, c2 = 0;
            std::istringstream(line) >> d >> c1 >> rho >> c2 >> n;
            if (rho == 0.0) CHECK(n == 0.0);
            if (d == 0.1 && rho == 10.0) {
                CHECK(n == doctest::Approx(17.02).epsilon(1e-3));
                CHECK(n >= 12.5);
                CHECK(n <= 50.0);
            }
        }
        CHECK(rows == 9);

        REQUIRE(run_cli({"--config", path, "--out", out.string(), "irf-sweep"}).code == 0);
        const std::string sweep = slurp(out / "irf_sweep.csv");
        CHECK(sweep.rfind("gamma_mhz_over_2pi,g2_zero\n", 0) == 0);
        CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 10);

        const Outcome missing = run_cli({"--out", out.string(), "yield-map"});
        CHECK(missing.code == 2);
        CHECK(missing.err.find("/yield") != std::string::npos);
    }

    TEST_CASE("installed binary reports exit codes") {
        testing::TempDir tmp("binary");
        const std::string bad = write_json(tmp.path(), "c.json", {{"emitters", 3}}).string();
        const std::string cmd = std::string(QDSTAT_BINARY) + " --config " + bad + " --out " +
                                (tmp.path() / "out").string() + " g1 > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        CHECK(WIFEXITED(status));
        CHECK(WEXITSTATUS(status) == 2);
    }
}
