#pragma once

#include <span>
#include <vector>

#include "qdstat/curve.hpp"
#include "qdstat/units.hpp"

namespace qdstat {

/// Gaussian detector timing jitter.
class IrfParams {
public:
    /// FWHM in seconds; throws DomainError if negative. Zero disables convolution.
    explicit IrfParams(double fwhm_s = 0.0);

    double fwhm() const { return fwhm_; }
    double sigma() const { return fwhm_to_sigma(fwhm_); }
    bool enabled() const { return fwhm_ > 0.0; }

private:
    double fwhm_;
};

/// Discrete Gaussian kernel sampled at multiples of `step`, truncated at
/// +-5 sigma and renormalized to unit sum. Odd length, centred.
std::vector<double> gaussian_kernel(double sigma, double step);

/// Convolves uniformly sampled data with a truncated Gaussian, extending the
/// edge values as padding. `sigma` and `step` share a unit. Throws GridError
/// when step > fwhm/4.
std::vector<double> convolve_gaussian(std::span<const double> samples, double step, double sigma);

/// IRF convolution of a curve; output grid equals input grid.
CorrelationCurve convolve_irf(const CorrelationCurve& curve, const IrfParams& irf);

/// Best achievable g2(0) of an ideal emitter with Omega = omega_ratio * gamma
/// when the only imperfection is detector jitter.
double jitter_limited_g2zero(AngularFrequency gamma, const IrfParams& irf, double omega_ratio);

struct JitterSweepPoint {
    double gamma_mhz_over_2pi;
    double g2_zero;
};

/// jitter_limited_g2zero over `count` decay rates spaced linearly in
/// [gamma_min, gamma_max] (MHz, /2pi convention).
std::vector<JitterSweepPoint> jitter_sweep(double gamma_min_mhz, double gamma_max_mhz, std::size_t count,
                                           const IrfParams& irf, double omega_ratio);

}  // namespace qdstat
