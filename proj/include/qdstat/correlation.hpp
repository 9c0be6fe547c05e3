#pragma once

#include "qdstat/curve.hpp"
#include "qdstat/emitter.hpp"
#include "qdstat/irf.hpp"

namespace qdstat {

/// Multiplicative bunching shoulder 1 + B exp(-|tau| / tau_b).
class BunchingEnvelope {
public:
    BunchingEnvelope() = default;
    /// Throws DomainError unless amplitude >= 0 and timescale > 0.
    BunchingEnvelope(double amplitude, double timescale_s);

    double amplitude() const { return amplitude_; }
    double timescale() const { return timescale_; }
    double operator()(double tau) const;

private:
    double amplitude_ = 0.0;
    double timescale_ = 1e-9;
};

/// g2 as seen by the detectors: ideal emitter, bunching shoulders, leaked
/// laser light and IRF smoothing.
struct MeasuredG2Model {
    EmitterParams emitter;
    BunchingEnvelope bunching{};
    IrfParams irf{};
};

/// Zero-delay correlation produced by a laser impurity xi: 2 xi - xi^2.
/// Throws DomainError outside [0, 1).
double impurity_to_g2zero(double xi);

/// Inverse of impurity_to_g2zero: xi = 1 - sqrt(1 - g2zero).
double g2zero_to_impurity(double g2zero);

/// Mixes an ideal correlation value with Poissonian laser background:
/// (1 - xi)^2 g2 + [1 - (1 - xi)^2].
double mix_impurity(double g2_ideal, double xi);

/// Evaluates the measured-g2 model on a symmetric grid.
/// Throws GridError if the grid is not symmetric or too coarse for the IRF.
CorrelationCurve g2_measured(const MeasuredG2Model& model, const TauGrid& grid);

}  // namespace qdstat
