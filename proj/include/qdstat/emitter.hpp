#pragma once

#include "qdstat/units.hpp"

namespace qdstat {

/// A resonantly driven two-level emitter.
///
/// All rates are angular frequencies in rad/s. `gamma` is the radiative decay
/// rate, `omega` the Rabi frequency, `sigma_diffusion` the standard deviation
/// of slow spectral diffusion and `impurity` the fraction of detected light
/// that is leaked excitation laser.
class EmitterParams {
public:
    /// Throws DomainError unless gamma > 0, omega >= 0, sigma_diffusion >= 0
    /// and 0 <= impurity < 1.
    EmitterParams(AngularFrequency gamma, AngularFrequency omega,
                  AngularFrequency sigma_diffusion = {}, double impurity = 0.0);

    /// Drive expressed relative to the decay rate (omega = ratio * gamma).
    static EmitterParams with_rabi_ratio(AngularFrequency gamma, double omega_over_gamma,
                                         AngularFrequency sigma_diffusion = {},
                                         double impurity = 0.0);

    double gamma() const { return gamma_; }
    double omega() const { return omega_; }
    double sigma_diffusion() const { return sigma_diffusion_; }
    double impurity() const { return impurity_; }

    /// Steady-state excited-state population Omega^2 / (gamma^2 + 2 Omega^2).
    double excited_population() const;
    /// Coherently scattered fraction gamma^2 / (gamma^2 + 2 Omega^2); the long-delay limit of g1.
    double coherent_fraction() const;

private:
    double gamma_;
    double omega_;
    double sigma_diffusion_;
    double impurity_;
};

}  // namespace qdstat
