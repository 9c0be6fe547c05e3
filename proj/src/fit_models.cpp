#include "qdstat/fit_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdstat/correlation.hpp"
#include "qdstat/error.hpp"
#include "qdstat/lineshapes.hpp"

namespace qdstat {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Peak position, height above the floor and full width at half height.
struct PeakEstimate {
    double center;
    double height;
    double floor;
    double fwhm;
};

PeakEstimate estimate_peak(std::span<const double> x, std::span<const double> y) {
    const auto top = std::max_element(y.begin(), y.end());
    const double floor = *std::min_element(y.begin(), y.end());
    const auto i = static_cast<std::size_t>(top - y.begin());
    const double half = floor + 0.5 * (*top - floor);
    double lo = x.front();
    double hi = x.back();
    for (std::size_t k = i; k-- > 0;) {
        if (y[k] < half) {
            lo = x[k];
            break;
        }
    }
    for (std::size_t k = i; k < y.size(); ++k) {
        if (y[k] < half) {
            hi = x[k];
            break;
        }
    }
    return {x[i], *top - floor, floor, std::max(hi - lo, 1e-12)};
}

LineshapeParams line(double center, double lorentz, double gauss, double amplitude, double offset) {
    LineshapeParams p;
    p.center = center;
    p.lorentz_fwhm = lorentz;
    p.gauss_sigma = gauss;
    p.amplitude = amplitude;
    p.offset = offset;
    return p;
}

}  // namespace

std::size_t ModelSpec::index_of(const std::string& param) const {
    const auto it = std::find(params.begin(), params.end(), param);
    if (it == params.end()) throw DomainError("model " + name + " has no parameter '" + param + "'");
    return static_cast<std::size_t>(it - params.begin());
}

ModelSpec lorentzian_model() {
    ModelSpec m;
    m.name = "lorentzian";
    m.params = {"center", "fwhm", "amplitude", "offset"};
    m.model = pointwise([](std::span<const double> p, double x) {
        return lorentzian(x, line(p[0], p[1], 0.0, p[2], p[3]));
    });
    m.bounds = {std::nullopt, Bound{0.0, kInf}, std::nullopt, std::nullopt};
    m.guess = [](std::span<const double> x, std::span<const double> y) {
        const PeakEstimate e = estimate_peak(x, y);
        return std::vector<double>{e.center, e.fwhm, e.height, e.floor};
    };
    return m;
}

ModelSpec gaussian_model() {
    ModelSpec m;
    m.name = "gaussian";
    m.params = {"center", "sigma", "amplitude", "offset"};
    m.model = pointwise([](std::span<const double> p, double x) {
        if (!(p[1] > 0.0)) throw DomainError("gaussian: sigma must be positive");
        return gaussian(x, line(p[0], 0.0, p[1], p[2], p[3]));
    });
    m.bounds = {std::nullopt, Bound{0.0, kInf}, std::nullopt, std::nullopt};
    m.guess = [](std::span<const double> x, std::span<const double> y) {
        const PeakEstimate e = estimate_peak(x, y);
        return std::vector<double>{e.center, e.fwhm / kFwhmPerSigma, e.height, e.floor};
    };
    return m;
}

ModelSpec voigt_model() {
    ModelSpec m;
    m.name = "voigt";
    m.params = {"center", "lorentz_fwhm", "gauss_sigma", "amplitude", "offset"};
    m.model = pointwise([](std::span<const double> p, double x) {
        return voigt(x, line(p[0], p[1], p[2], p[3], p[4]));
    });
    m.bounds = {std::nullopt, Bound{0.0, kInf}, Bound{0.0, kInf}, std::nullopt, std::nullopt};
    m.guess = [](std::span<const double> x, std::span<const double> y) {
        const PeakEstimate e = estimate_peak(x, y);
        return std::vector<double>{e.center, 0.5 * e.fwhm, 0.25 * e.fwhm, e.height, e.floor};
    };
    return m;
}

ModelSpec saturation_model() {
    ModelSpec m;
    m.name = "saturation";
    m.params = {"i_inf", "p_sat"};
    m.model = pointwise([](std::span<const double> p, double x) {
        SaturationParams s;
        s.i_inf = p[0];
        s.p_sat = p[1];
        s.validate();
        return saturation_intensity(x, s);
    });
    m.bounds = {Bound{0.0, kInf}, Bound{0.0, kInf}};
    m.guess = [](std::span<const double> x, std::span<const double> y) {
        const double top = *std::max_element(y.begin(), y.end());
        // Power where the signal first exceeds half of the largest value.
        double p_half = x.back();
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] >= 0.5 * top) {
                p_half = x[i];
                break;
            }
        }
        return std::vector<double>{top, p_half};
    };
    return m;
}

ModelSpec power_broadening_model() {
    ModelSpec m;
    m.name = "power-broadening";
    m.params = {"gamma_mhz_over_2pi", "b_mhz"};
    m.model = pointwise([](std::span<const double> p, double x) {
        return power_broadened_fwhm(AngularFrequency::mhz_over_2pi(x), AngularFrequency::mhz_over_2pi(p[0]),
                                    AngularFrequency::mhz_over_2pi(p[1]))
            .in_mhz_over_2pi();
    });
    m.bounds = {Bound{0.0, kInf}, Bound{0.0, kInf}};
    m.guess = [](std::span<const double>, std::span<const double> y) {
        const double low = *std::min_element(y.begin(), y.end());
        return std::vector<double>{0.8 * low, 0.2 * low};
    };
    return m;
}

ModelSpec decay_model(double irf_fwhm_ns) {
    if (!(irf_fwhm_ns >= 0.0)) throw DomainError("decay model: IRF FWHM must be non-negative");
    ModelSpec m;
    m.name = "decay";
    m.params = {"amp_fast", "gamma_fast", "amp_slow", "gamma_slow", "fss_ghz", "beat_visibility", "beat_phase",
                "t0_ns"};
    m.model = [irf_fwhm_ns](std::span<const double> p, std::span<const double> x) {
        DecayModelParams d;
        d.amp_fast = p[0];
        d.gamma_fast = p[1];
        d.amp_slow = p[2];
        d.gamma_slow = p[3];
        d.fss_splitting = p[4];
        d.beat_visibility = p[5];
        d.beat_phase = p[6];
        d.t0 = p[7];
        d.irf_fwhm = irf_fwhm_ns;
        return decay_intensity(std::vector<double>(x.begin(), x.end()), d);
    };
    m.bounds = {Bound{0.0, kInf}, Bound{0.0, kInf}, Bound{0.0, kInf}, Bound{0.0, kInf},
                Bound{0.0, kInf}, Bound{0.0, 1.0}, std::nullopt,      std::nullopt};
    return m;
}

ModelSpec g2_model(double irf_fwhm_ps) {
    const IrfParams irf(ps_to_s(irf_fwhm_ps));
    ModelSpec m;
    m.name = "g2";
    m.params = {"gamma_per_ns", "omega_over_gamma", "impurity", "bunching_amplitude", "bunching_timescale_ns"};
    m.model = [irf](std::span<const double> p, std::span<const double> x) {
        if (x.size() < 2) throw GridError("g2 model: need at least two delays");
        const double step_ns = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
        const TauGrid grid = TauGrid::from_start(ns_to_s(x.front()), ns_to_s(step_ns), x.size());
        const MeasuredG2Model model{
            EmitterParams::with_rabi_ratio(AngularFrequency::per_ns(p[0]), p[1], {}, p[2]),
            BunchingEnvelope(p[3], ns_to_s(p[4])), irf};
        return g2_measured(model, grid).values();
    };
    m.bounds = {Bound{1e-6, kInf}, Bound{0.0, kInf}, Bound{0.0, 0.999}, Bound{0.0, kInf}, Bound{1e-6, kInf}};
    return m;
}

ModelSpec model_by_name(const std::string& name, double irf_setting) {
    if (name == "lorentzian") return lorentzian_model();
    if (name == "gaussian") return gaussian_model();
    if (name == "voigt") return voigt_model();
    if (name == "saturation") return saturation_model();
    if (name == "power-broadening") return power_broadening_model();
    if (name == "decay") return decay_model(irf_setting);
    if (name == "g2") return g2_model(irf_setting);
    throw DomainError("unknown model '" + name + "'");
}

std::vector<std::string> model_names() {
    return {"lorentzian", "gaussian", "voigt", "saturation", "power-broadening", "decay", "g2"};
}

}  // namespace qdstat
