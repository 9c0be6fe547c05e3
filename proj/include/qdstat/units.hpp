#pragma once

#include <cmath>
#include <numbers>

namespace qdstat {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FWHM of a Gaussian in units of its standard deviation: 2*sqrt(2 ln 2).
inline constexpr double kFwhmPerSigma = 2.354820045030949382;

/// Angular frequency stored in rad/s.
///
/// Spectroscopy numbers are usually quoted as f = omega/2pi in MHz or GHz,
/// while decay rates are quoted directly in ns^-1. The named constructors
/// make the convention explicit at every call site.
class AngularFrequency {
public:
    constexpr AngularFrequency() = default;

    static constexpr AngularFrequency rad_per_s(double value) { return AngularFrequency(value); }
    static constexpr AngularFrequency mhz_over_2pi(double mhz) { return AngularFrequency(kTwoPi * mhz * 1e6); }
    static constexpr AngularFrequency ghz_over_2pi(double ghz) { return AngularFrequency(kTwoPi * ghz * 1e9); }
    static constexpr AngularFrequency per_ns(double rate) { return AngularFrequency(rate * 1e9); }

    constexpr double rad_per_s() const { return value_; }
    constexpr double in_mhz_over_2pi() const { return value_ / (kTwoPi * 1e6); }
    constexpr double in_per_ns() const { return value_ * 1e-9; }

    constexpr AngularFrequency operator*(double k) const { return AngularFrequency(value_ * k); }
    constexpr auto operator<=>(const AngularFrequency&) const = default;

private:
    constexpr explicit AngularFrequency(double value) : value_(value) {}
    double value_ = 0.0;
};

constexpr double ns_to_s(double ns) { return ns * 1e-9; }
constexpr double ps_to_s(double ps) { return ps * 1e-12; }
constexpr double s_to_ns(double s) { return s * 1e9; }

constexpr double fwhm_to_sigma(double fwhm) { return fwhm / kFwhmPerSigma; }
constexpr double sigma_to_fwhm(double sigma) { return sigma * kFwhmPerSigma; }

}  // namespace qdstat
