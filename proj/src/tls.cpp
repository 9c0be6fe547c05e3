#include "qdstat/tls.hpp"

#include <algorithm>
#include <cmath>

namespace qdstat {
namespace {

// exp(-rate tau) * cos_term(tau) and exp(-rate tau) * sinc_term(tau), written
// so the overdamped branch cannot overflow at long delay.
struct Damped {
    double cos;
    double sinc;
};

Damped damped_terms(const GeneralizedRabi& mu, double rate, double tau) {
    const double m = mu.magnitude();
    if (mu.oscillatory() || m * tau < 20.0) {
        const double env = std::exp(-rate * tau);
        return {env * mu.cos_term(tau), env * mu.sinc_term(tau)};
    }
    const double slow = std::exp(-(rate - m) * tau);
    const double fast = std::exp(-(rate + m) * tau);
    return {0.5 * (slow + fast), 0.5 * (slow - fast) / m};
}

// G1(tau) / G1(0): the bracketed part of the resonance-fluorescence field
// correlation. The decaying factor on the second term is exp(-gamma tau / 2).
double g1_bracket(const EmitterParams& p, double tau) {
    const double g = p.gamma();
    const double w2 = p.omega() * p.omega();
    const double d = g * g + 2.0 * w2;
    const GeneralizedRabi mu(p);
    const Damped osc = damped_terms(mu, 0.75 * g, tau);
    const double cos_coeff = 0.5 * (2.0 * w2 - g * g) / d;
    const double sin_coeff = -0.25 * (-5.0 * g * w2 + 0.5 * g * g * g) / d;
    return g * g / d + 0.5 * std::exp(-0.5 * g * tau) + cos_coeff * osc.cos + sin_coeff * osc.sinc;
}

}  // namespace

GeneralizedRabi::GeneralizedRabi(const EmitterParams& params) {
    const double w = params.omega();
    const double q = 0.25 * params.gamma();
    // (w - q)(w + q) avoids cancellation next to the branch point.
    const double mu2 = (w - q) * (w + q);
    oscillatory_ = mu2 > 0.0;
    magnitude_ = std::sqrt(std::abs(mu2));
}

double GeneralizedRabi::cos_term(double tau) const {
    const double x = magnitude_ * tau;
    return oscillatory_ ? std::cos(x) : std::cosh(x);
}

double GeneralizedRabi::sinc_term(double tau) const {
    if (magnitude_ == 0.0) return tau;
    const double x = magnitude_ * tau;
    return (oscillatory_ ? std::sin(x) : std::sinh(x)) / magnitude_;
}

GeneralizedRabi generalized_rabi(const EmitterParams& params) { return GeneralizedRabi(params); }

double g1_normalized(const EmitterParams& params, double tau) {
    return g1_bracket(params, std::abs(tau));
}

double g1_raw(const EmitterParams& params, double tau) {
    return params.excited_population() * g1_bracket(params, std::abs(tau));
}

double g2_tls(const EmitterParams& params, double tau) {
    const double t = std::abs(tau);
    const double g = params.gamma();
    const GeneralizedRabi mu(params);
    const Damped osc = damped_terms(mu, 0.75 * g, t);
    // Rounding can leave -1e-17 next to tau = 0; the function is non-negative.
    return std::max(0.0, 1.0 - (osc.cos + 0.75 * g * osc.sinc));
}

CorrelationCurve g1_curve(const EmitterParams& params, const TauGrid& grid) {
    return CorrelationCurve::sample(
        grid, [&](double tau) { return std::min(1.0, std::abs(g1_normalized(params, tau))); },
        CurveKind::G1Normalized);
}

CorrelationCurve g2_tls_curve(const EmitterParams& params, const TauGrid& grid) {
    return CorrelationCurve::sample(grid, [&](double tau) { return g2_tls(params, tau); }, CurveKind::G2);
}

}  // namespace qdstat
