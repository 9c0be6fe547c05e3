#include "qdstat/emitter.hpp"

#include <cmath>
#include <string>

#include "qdstat/error.hpp"

namespace qdstat {

EmitterParams::EmitterParams(AngularFrequency gamma, AngularFrequency omega,
                             AngularFrequency sigma_diffusion, double impurity)
    : gamma_(gamma.rad_per_s()),
      omega_(omega.rad_per_s()),
      sigma_diffusion_(sigma_diffusion.rad_per_s()),
      impurity_(impurity) {
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
        throw DomainError("emitter: decay rate must be positive, got " + std::to_string(gamma_));
    }
    if (!(omega_ >= 0.0) || !std::isfinite(omega_)) {
        throw DomainError("emitter: Rabi frequency must be non-negative, got " + std::to_string(omega_));
    }
    if (!(sigma_diffusion_ >= 0.0) || !std::isfinite(sigma_diffusion_)) {
        throw DomainError("emitter: spectral-diffusion width must be non-negative");
    }
    if (!(impurity_ >= 0.0 && impurity_ < 1.0)) {
        throw DomainError("emitter: impurity must lie in [0, 1), got " + std::to_string(impurity_));
    }
}

EmitterParams EmitterParams::with_rabi_ratio(AngularFrequency gamma, double omega_over_gamma,
                                             AngularFrequency sigma_diffusion, double impurity) {
    return EmitterParams(gamma, gamma * omega_over_gamma, sigma_diffusion, impurity);
}

double EmitterParams::excited_population() const {
    const double w2 = omega_ * omega_;
    return w2 / (gamma_ * gamma_ + 2.0 * w2);
}

double EmitterParams::coherent_fraction() const {
    const double g2 = gamma_ * gamma_;
    return g2 / (g2 + 2.0 * omega_ * omega_);
}

}  // namespace qdstat
