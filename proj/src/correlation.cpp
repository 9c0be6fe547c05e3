#include "qdstat/correlation.hpp"

#include <cmath>
#include <string>

#include "qdstat/error.hpp"
#include "qdstat/tls.hpp"

namespace qdstat {

BunchingEnvelope::BunchingEnvelope(double amplitude, double timescale_s)
    : amplitude_(amplitude), timescale_(timescale_s) {
    if (!(amplitude_ >= 0.0)) throw DomainError("bunching: amplitude must be non-negative");
    if (!(timescale_ > 0.0)) throw DomainError("bunching: timescale must be positive");
}

double BunchingEnvelope::operator()(double tau) const {
    return 1.0 + amplitude_ * std::exp(-std::abs(tau) / timescale_);
}

double impurity_to_g2zero(double xi) {
    if (!(xi >= 0.0 && xi < 1.0)) {
        throw DomainError("impurity must lie in [0, 1), got " + std::to_string(xi));
    }
    return 2.0 * xi - xi * xi;
}

double g2zero_to_impurity(double g2zero) {
    if (!(g2zero >= 0.0 && g2zero < 1.0)) {
        throw DomainError("g2(0) must lie in [0, 1), got " + std::to_string(g2zero));
    }
    return 1.0 - std::sqrt(1.0 - g2zero);
}

double mix_impurity(double g2_ideal, double xi) {
    const double signal = (1.0 - xi) * (1.0 - xi);
    return signal * g2_ideal + (1.0 - signal);
}

CorrelationCurve g2_measured(const MeasuredG2Model& model, const TauGrid& grid) {
    if (!grid.is_symmetric()) {
        throw GridError("g2_measured: delay grid must be symmetric about zero");
    }
    if (model.irf.enabled() && grid.step > 0.25 * model.irf.fwhm()) {
        throw GridError("g2_measured: grid step exceeds IRF FWHM / 4");
    }
    const double xi = model.emitter.impurity();
    const std::size_t n = grid.size;
    std::vector<double> values(n);
    // Fill from the centre outwards so mirrored samples are bitwise equal.
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = std::abs(grid.at(std::max(i, n - 1 - i)));
        const double dressed = g2_tls(model.emitter, tau) * model.bunching(tau);
        values[i] = mix_impurity(dressed, xi);
    }
    CorrelationCurve curve = convolve_irf(CorrelationCurve(grid, std::move(values), CurveKind::G2), model.irf);
    // The convolution sums mirrored samples in opposite order; restore exact parity.
    return model.irf.enabled() ? symmetrize(curve) : curve;
}

}  // namespace qdstat
