#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "qdstat/irf.hpp"
#include "qdstat/units.hpp"

namespace qdstat {

/// Spectral line in MHz (frequencies are f = omega/2pi).
struct LineshapeParams {
    double center = 0.0;
    double lorentz_fwhm = 0.0;
    double gauss_sigma = 0.0;
    double amplitude = 1.0;
    double offset = 0.0;

    /// Throws DomainError if a width is negative or both widths are zero.
    void validate() const;
};

/// amplitude * L(nu) + offset with L(center) = 1.
double lorentzian(double nu, const LineshapeParams& p);
/// amplitude * exp(-(nu - center)^2 / (2 sigma^2)) + offset.
double gaussian(double nu, const LineshapeParams& p);

/// Voigt profile: convolution of the Lorentzian and Gaussian parts, scaled so
/// that amplitude is the peak height above offset. Evaluated through the
/// Faddeeva function. Reduces to lorentzian / gaussian when the other width is zero.
double voigt(double nu, const LineshapeParams& p);

/// Same profile computed by adaptive quadrature of the convolution integral.
/// Slow; independent cross-check for voigt().
double voigt_by_quadrature(double nu, const LineshapeParams& p);

/// Faddeeva function w(z) = exp(-z^2) erfc(-i z) for Im z >= 0.
std::complex<double> faddeeva(std::complex<double> z);

/// Saturation curve I(P) = I_inf / (1 + P_sat / P).
struct SaturationParams {
    double i_inf = 1.0;
    double p_sat = 1.0;
    double b_offset = 0.0;  ///< power-broadening constant b, MHz

    void validate() const;
};

/// Throws DomainError for non-positive power.
double saturation_intensity(double power, const SaturationParams& p);

/// Rabi frequency reached at `power`: Omega = gamma / sqrt(2) * sqrt(P / P_sat).
AngularFrequency rabi_from_power(double power, double p_sat, AngularFrequency gamma);

/// Power-broadened linewidth sqrt(Gamma^2 + 2 Omega^2) + b, computed in rad/s.
AngularFrequency power_broadened_fwhm(AngularFrequency omega, AngularFrequency gamma_fwhm,
                                      AngularFrequency b);

/// Time-resolved decay with a beating fast component.
/// Times in ns, rates in ns^-1, splitting in GHz (Delta/2pi).
struct DecayModelParams {
    double gamma_fast = 1.0;
    double gamma_slow = 0.1;
    double amp_fast = 1.0;
    double amp_slow = 0.0;
    std::optional<double> fss_splitting;  ///< GHz; no beating when unset
    double beat_visibility = 0.0;
    double beat_phase = 0.0;
    double irf_fwhm = 0.0;  ///< ns
    double t0 = 0.0;        ///< ns

    /// Throws DomainError if rates are non-positive, gamma_slow >= gamma_fast,
    /// visibility is outside [0, 1], or beating is requested without a splitting.
    void validate() const;
};

/// Unconvolved decay intensity at time t (ns).
double decay_intensity_raw(double t, const DecayModelParams& p);

/// Decay intensity on an ascending time grid (ns), convolved with the IRF
/// (which requires a uniform grid). The sample whose cell contains t0 is
/// scaled by the fraction of the cell after t0.
std::vector<double> decay_intensity(const std::vector<double>& t, const DecayModelParams& p);

}  // namespace qdstat
