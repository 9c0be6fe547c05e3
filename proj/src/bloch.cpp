#include "qdstat/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdstat/error.hpp"

namespace qdstat {
namespace {

using cd = std::complex<double>;

enum : std::size_t { kEE = 0, kEG = 1, kGE = 2, kGG = 3 };

Operator2 axpy(const Operator2& x, double a, const Operator2& y) {
    Operator2 out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = x[i] + a * y[i];
    return out;
}

double max_abs(const Operator2& x) {
    double m = 0.0;
    for (const auto& v : x) m = std::max(m, std::abs(v));
    return m;
}

Operator2 rk4_step(const EmitterParams& p, const Operator2& x, double h) {
    const Operator2 k1 = lindblad_rhs(p, x);
    const Operator2 k2 = lindblad_rhs(p, axpy(x, 0.5 * h, k1));
    const Operator2 k3 = lindblad_rhs(p, axpy(x, 0.5 * h, k2));
    const Operator2 k4 = lindblad_rhs(p, axpy(x, h, k3));
    Operator2 out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

double max_stable_step(const EmitterParams& p) {
    const double fastest = std::max(p.gamma(), p.omega());
    return 1.0 / (200.0 * fastest);
}

double resolve_step(const EmitterParams& p, const BlochOptions& options) {
    const double limit = max_stable_step(p);
    if (!options.step) return limit;
    const double h = *options.step;
    if (!(h > 0.0) || h > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "bloch oracle: step " << h << " s exceeds the limit " << limit
            << " s = (1/200) min(1/gamma, 1/Omega) for gamma = " << p.gamma() << " rad/s, Omega = " << p.omega()
            << " rad/s";
        throw NumericalError(msg.str());
    }
    return h;
}

// Advances x by `duration` in equal sub-steps no longer than h_max.
Operator2 propagate(const EmitterParams& p, Operator2 x, double duration, double h_max) {
    if (duration <= 0.0) return x;
    const auto n = static_cast<std::size_t>(std::ceil(duration / h_max - 1e-9));
    const double h = duration / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x = rk4_step(p, x, h);
    return x;
}

}  // namespace

Operator2 lindblad_rhs(const EmitterParams& p, const Operator2& x) {
    // H = (Omega/2)(sigma_+ + sigma_-), collapse operator sqrt(gamma) sigma_-.
    const double g = p.gamma();
    const cd half_rabi_i{0.0, 0.5 * p.omega()};
    const cd a = x[kEE];
    const cd b = x[kEG];
    const cd c = x[kGE];
    const cd d = x[kGG];
    return {
        -half_rabi_i * (c - b) - g * a,
        -half_rabi_i * (d - a) - 0.5 * g * b,
        -half_rabi_i * (a - d) - 0.5 * g * c,
        -half_rabi_i * (b - c) + g * a,
    };
}

BlochSteadyState bloch_steady_state(const EmitterParams& params, const BlochOptions& options) {
    const double h = resolve_step(params, options);
    const double lifetime = 1.0 / params.gamma();
    const double t_max = options.max_settle_time_in_lifetimes * lifetime;
    const std::size_t check_every = 64;

    Operator2 rho{cd{0.0}, cd{0.0}, cd{0.0}, cd{1.0}};
    std::size_t steps = 0;
    double t = 0.0;
    double drift = max_abs(lindblad_rhs(params, rho)) * lifetime;
    while (drift > options.settle_tolerance) {
        if (t > t_max) {
            std::ostringstream msg;
            msg << "bloch oracle: no steady state after " << t / lifetime << " lifetimes (" << steps
                << " steps of " << h << " s); residual drift " << drift;
            throw NumericalError(msg.str());
        }
        for (std::size_t i = 0; i < check_every; ++i) rho = rk4_step(params, rho, h);
        steps += check_every;
        t += static_cast<double>(check_every) * h;
        drift = max_abs(lindblad_rhs(params, rho)) * lifetime;
    }
    return BlochSteadyState{rho, rho[kEE].real(), t, steps};
}

BlochCorrelations bloch_oracle(const EmitterParams& params, const TauGrid& grid, const BlochOptions& options) {
    if (grid.start < -1e-9 * grid.step) {
        throw DomainError("bloch oracle: delays must be non-negative");
    }
    if (params.omega() == 0.0) {
        throw DomainError("bloch oracle: undriven emitter has zero population; correlations are undefined");
    }
    const double h = resolve_step(params, options);
    BlochSteadyState steady = bloch_steady_state(params, options);
    const double pop = steady.excited_population;
    const Operator2& rho = steady.rho;

    // G1(tau) = Tr[sigma_+ X(tau)], X(0) = sigma_- rho.
    Operator2 x{cd{0.0}, cd{0.0}, rho[kEE], rho[kEG]};
    // G2(tau) = Tr[sigma_+ sigma_- Y(tau)], Y(0) = sigma_- rho sigma_+.
    Operator2 y{cd{0.0}, cd{0.0}, cd{0.0}, rho[kEE]};

    std::vector<double> g1(grid.size);
    std::vector<double> g2(grid.size);
    double t = 0.0;
    for (std::size_t i = 0; i < grid.size; ++i) {
        const double target = std::max(0.0, grid.at(i));
        x = propagate(params, x, target - t, h);
        y = propagate(params, y, target - t, h);
        t = target;
        g1[i] = std::min(1.0, std::abs(x[kGE].real() / pop));
        g2[i] = std::max(0.0, y[kEE].real() / (pop * pop));
    }
    return BlochCorrelations{std::move(steady), CorrelationCurve(grid, std::move(g1), CurveKind::G1Normalized),
                             CorrelationCurve(grid, std::move(g2), CurveKind::G2)};
}

}  // namespace qdstat
