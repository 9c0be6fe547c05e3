#pragma once

#include "qdstat/curve.hpp"
#include "qdstat/emitter.hpp"

namespace qdstat {

/// Generalized Rabi frequency mu = sqrt(Omega^2 - gamma^2/16).
///
/// Below the branch point (Omega <= gamma/4) mu is imaginary; the oscillating
/// factors then continue to cosh/sinh so every result stays real.
class GeneralizedRabi {
public:
    explicit GeneralizedRabi(const EmitterParams& params);

    /// |mu| in rad/s.
    double magnitude() const { return magnitude_; }
    /// True when Omega > gamma/4 (real mu, oscillating correlations).
    bool oscillatory() const { return oscillatory_; }

    /// cos(mu tau), or cosh(|mu| tau) on the overdamped branch.
    double cos_term(double tau) const;
    /// sin(mu tau)/mu, or sinh(|mu| tau)/|mu|; equals tau when mu = 0.
    double sinc_term(double tau) const;

private:
    double magnitude_;
    bool oscillatory_;
};

GeneralizedRabi generalized_rabi(const EmitterParams& params);

/// Normalized first-order coherence g1(tau) = G1(tau)/G1(0) of resonance
/// fluorescence without pure dephasing. Even in tau.
double g1_normalized(const EmitterParams& params, double tau);

/// Unnormalized G1(tau); G1(0) = Omega^2 / (gamma^2 + 2 Omega^2).
double g1_raw(const EmitterParams& params, double tau);

/// Ideal resonant second-order correlation
/// g2(tau) = 1 - exp(-3 gamma |tau| / 4) [cos(mu tau) + 3 gamma / (4 mu) sin(mu tau)].
double g2_tls(const EmitterParams& params, double tau);

/// Curves on a grid; g1 values are stored as magnitudes.
CorrelationCurve g1_curve(const EmitterParams& params, const TauGrid& grid);
CorrelationCurve g2_tls_curve(const EmitterParams& params, const TauGrid& grid);

}  // namespace qdstat
