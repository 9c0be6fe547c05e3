#include "qdstat/lineshapes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdstat/error.hpp"

namespace qdstat {
namespace {

// Weideman's rational expansion of the Faddeeva function (SIAM J. Numer.
// Anal. 31, 1994) with 40 terms: ~1e-11 relative accuracy on Re w in the
// upper half plane.
constexpr int kFaddeevaTerms = 40;

struct FaddeevaTable {
    double l;
    std::array<double, kFaddeevaTerms> coeff;  // coeff[n - 1] multiplies Z^(n-1)
};

FaddeevaTable make_faddeeva_table() {
    constexpr int n_terms = kFaddeevaTerms;
    constexpr int m = 2 * n_terms;
    constexpr int m2 = 2 * m;
    FaddeevaTable table{};
    table.l = std::sqrt(n_terms / std::numbers::sqrt2);
    const double l = table.l;
    // Samples of exp(-t^2)(L^2 + t^2) at t = L tan(theta/2), theta = k pi / M,
    // arranged in FFT order (k >= 0 first, the Nyquist slot is zero).
    std::array<double, m2> f{};
    for (int j = 0; j < m2; ++j) {
        int k = 0;
        if (j < m) {
            k = j;
        } else if (j == m) {
            f[j] = 0.0;
            continue;
        } else {
            k = j - m2;
        }
        const double t = l * std::tan(0.5 * k * std::numbers::pi / m);
        f[j] = std::exp(-t * t) * (l * l + t * t);
    }
    for (int n = 1; n <= n_terms; ++n) {
        double acc = 0.0;
        for (int j = 0; j < m2; ++j) acc += f[j] * std::cos(2.0 * std::numbers::pi * j * n / m2);
        table.coeff[n - 1] = acc / m2;
    }
    return table;
}

const FaddeevaTable& faddeeva_table() {
    static const FaddeevaTable table = make_faddeeva_table();
    return table;
}

constexpr double kInvSqrtPi = 0.56418958354775628695;

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    if (z.imag() < 0.0) throw DomainError("faddeeva: only Im z >= 0 is supported");
    const FaddeevaTable& t = faddeeva_table();
    const std::complex<double> iz{-z.imag(), z.real()};
    const std::complex<double> denom = t.l - iz;
    const std::complex<double> zz = (t.l + iz) / denom;
    std::complex<double> p = t.coeff[kFaddeevaTerms - 1];
    for (int n = kFaddeevaTerms - 2; n >= 0; --n) p = p * zz + t.coeff[n];
    return 2.0 * p / (denom * denom) + kInvSqrtPi / denom;
}

void LineshapeParams::validate() const {
    if (!(lorentz_fwhm >= 0.0) || !(gauss_sigma >= 0.0)) {
        throw DomainError("lineshape: widths must be non-negative");
    }
    if (lorentz_fwhm == 0.0 && gauss_sigma == 0.0) {
        throw DomainError("lineshape: at least one width must be positive");
    }
}

double lorentzian(double nu, const LineshapeParams& p) {
    const double hw = 0.5 * p.lorentz_fwhm;
    const double d = nu - p.center;
    return p.amplitude * hw * hw / (d * d + hw * hw) + p.offset;
}

double gaussian(double nu, const LineshapeParams& p) {
    const double d = (nu - p.center) / p.gauss_sigma;
    return p.amplitude * std::exp(-0.5 * d * d) + p.offset;
}

double voigt(double nu, const LineshapeParams& p) {
    p.validate();
    if (p.gauss_sigma == 0.0) return lorentzian(nu, p);
    if (p.lorentz_fwhm == 0.0) return gaussian(nu, p);
    const double scale = 1.0 / (p.gauss_sigma * std::numbers::sqrt2);
    const double x = (nu - p.center) * scale;
    const double y = 0.5 * p.lorentz_fwhm * scale;
    const double peak = faddeeva({0.0, y}).real();
    return p.amplitude * faddeeva({x, y}).real() / peak + p.offset;
}

double voigt_by_quadrature(double nu, const LineshapeParams& p) {
    p.validate();
    if (p.gauss_sigma == 0.0) return lorentzian(nu, p);
    if (p.lorentz_fwhm == 0.0) return gaussian(nu, p);
    const double sigma = p.gauss_sigma;
    const double hw = 0.5 * p.lorentz_fwhm;
    // Unnormalized convolution of a Gaussian density with a Lorentzian at detuning d.
    auto profile = [&](double d) {
        auto integrand = [&](double t) {
            const double u = d - t;
            return std::exp(-0.5 * t * t / (sigma * sigma)) / (u * u + hw * hw);
        };
        using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
        const double reach = 14.0 * sigma;
        // Split at the Lorentzian centre so a narrow peak is never straddled.
        if (d > -reach && d < reach) {
            return Quad::integrate(integrand, -reach, d, 20, 1e-14) + Quad::integrate(integrand, d, reach, 20, 1e-14);
        }
        return Quad::integrate(integrand, -reach, reach, 20, 1e-14);
    };
    return p.amplitude * profile(nu - p.center) / profile(0.0) + p.offset;
}

void SaturationParams::validate() const {
    if (!(i_inf > 0.0)) throw DomainError("saturation: I_inf must be positive");
    if (!(p_sat > 0.0)) throw DomainError("saturation: P_sat must be positive");
    if (!(b_offset >= 0.0)) throw DomainError("saturation: b must be non-negative");
}

double saturation_intensity(double power, const SaturationParams& p) {
    if (!(power > 0.0)) throw DomainError("saturation: power must be positive, got " + std::to_string(power));
    return p.i_inf / (1.0 + p.p_sat / power);
}

AngularFrequency rabi_from_power(double power, double p_sat, AngularFrequency gamma) {
    if (!(power >= 0.0)) throw DomainError("rabi_from_power: power must be non-negative");
    if (!(p_sat > 0.0)) throw DomainError("rabi_from_power: P_sat must be positive");
    return AngularFrequency::rad_per_s(gamma.rad_per_s() / std::numbers::sqrt2 * std::sqrt(power / p_sat));
}

AngularFrequency power_broadened_fwhm(AngularFrequency omega, AngularFrequency gamma_fwhm, AngularFrequency b) {
    const double g = gamma_fwhm.rad_per_s();
    const double w = omega.rad_per_s();
    return AngularFrequency::rad_per_s(std::sqrt(g * g + 2.0 * w * w) + b.rad_per_s());
}

void DecayModelParams::validate() const {
    if (!(gamma_fast > 0.0) || !(gamma_slow > 0.0)) throw DomainError("decay: rates must be positive");
    if (!(gamma_slow < gamma_fast)) throw DomainError("decay: slow rate must be below the fast rate");
    if (!(beat_visibility >= 0.0 && beat_visibility <= 1.0)) {
        throw DomainError("decay: beat visibility must lie in [0, 1]");
    }
    if (beat_visibility > 0.0 && !fss_splitting) {
        throw DomainError("decay: beating requires a fine-structure splitting");
    }
    if (!(irf_fwhm >= 0.0)) throw DomainError("decay: IRF FWHM must be non-negative");
}

double decay_intensity_raw(double t, const DecayModelParams& p) {
    const double dt = t - p.t0;
    if (dt < 0.0) return 0.0;
    double beat = 1.0;
    if (p.fss_splitting) {
        beat += p.beat_visibility * std::cos(kTwoPi * *p.fss_splitting * dt + p.beat_phase);
    }
    return p.amp_fast * std::exp(-p.gamma_fast * dt) * beat + p.amp_slow * std::exp(-p.gamma_slow * dt);
}

std::vector<double> decay_intensity(const std::vector<double>& t, const DecayModelParams& p) {
    p.validate();
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = decay_intensity_raw(t[i], p);
    if (t.size() < 2) return out;
    // Each sample stands for its cell, bounded by the midpoints to its
    // neighbours. The cell containing t0 is weighted by the fraction lying
    // after t0, which keeps the curve continuous in t0 instead of jumping
    // from one sample to the next.
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double lo = i == 0 ? t[0] - 0.5 * (t[1] - t[0]) : 0.5 * (t[i - 1] + t[i]);
        const double hi = i + 1 == t.size() ? t[i] + 0.5 * (t[i] - t[i - 1]) : 0.5 * (t[i] + t[i + 1]);
        if (p.t0 > lo && p.t0 < hi) {
            out[i] = (hi - p.t0) / (hi - lo) * decay_intensity_raw(std::max(t[i], p.t0), p);
        }
    }
    if (p.irf_fwhm == 0.0) return out;
    const double step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i] - t[i - 1] - step) > 1e-6 * step) {
            throw GridError("decay: time grid must be uniform for IRF convolution");
        }
    }
    return convolve_gaussian(out, step, fwhm_to_sigma(p.irf_fwhm));
}

}  // namespace qdstat
