#include "qdstat/irf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdstat/emitter.hpp"
#include "qdstat/error.hpp"
#include "qdstat/tls.hpp"

namespace qdstat {

IrfParams::IrfParams(double fwhm_s) : fwhm_(fwhm_s) {
    if (!(fwhm_ >= 0.0) || !std::isfinite(fwhm_)) {
        throw DomainError("irf: FWHM must be non-negative");
    }
}

std::vector<double> gaussian_kernel(double sigma, double step) {
    if (!(step > 0.0)) throw GridError("irf: step must be positive");
    if (sigma <= 0.0) return {1.0};
    const auto half = static_cast<std::size_t>(std::floor(5.0 * sigma / step));
    std::vector<double> k(2 * half + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(half)) * step;
        k[i] = std::exp(-0.5 * t * t / (sigma * sigma));
        total += k[i];
    }
    for (double& v : k) v /= total;
    return k;
}

std::vector<double> convolve_gaussian(std::span<const double> samples, double step, double sigma) {
    if (sigma <= 0.0) return {samples.begin(), samples.end()};
    const double fwhm = sigma_to_fwhm(sigma);
    if (step > 0.25 * fwhm) {
        std::ostringstream msg;
        msg << "irf: grid step " << step << " is coarser than FWHM/4 = " << 0.25 * fwhm;
        throw GridError(msg.str());
    }
    const std::vector<double> kernel = gaussian_kernel(sigma, step);
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
    std::vector<double> out(samples.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = -half; j <= half; ++j) {
            const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(i - j, 0, n - 1);
            acc += kernel[static_cast<std::size_t>(j + half)] * samples[static_cast<std::size_t>(src)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

CorrelationCurve convolve_irf(const CorrelationCurve& curve, const IrfParams& irf) {
    if (!irf.enabled()) return curve;
    return CorrelationCurve(curve.tau_start(), curve.tau_step(),
                            convolve_gaussian(curve.values(), curve.tau_step(), irf.sigma()), curve.kind());
}

double jitter_limited_g2zero(AngularFrequency gamma, const IrfParams& irf, double omega_ratio) {
    const EmitterParams emitter = EmitterParams::with_rabi_ratio(gamma, omega_ratio);
    if (!irf.enabled()) return g2_tls(emitter, 0.0);
    // Resolve both the jitter and the emitter dynamics; cover the kernel support.
    const double step = std::min(irf.fwhm() / 40.0, 0.02 / emitter.gamma());
    const double reach = 6.0 * irf.sigma() + 2.0 * step;
    const TauGrid grid = TauGrid::symmetric(reach, step);
    const CorrelationCurve convolved = convolve_irf(g2_tls_curve(emitter, grid), irf);
    return convolved.at_zero();
}

std::vector<JitterSweepPoint> jitter_sweep(double gamma_min_mhz, double gamma_max_mhz, std::size_t count,
                                           const IrfParams& irf, double omega_ratio) {
    if (count == 0) return {};
    if (!(gamma_min_mhz > 0.0) || gamma_max_mhz < gamma_min_mhz) {
        throw DomainError("irf sweep: need 0 < gamma_min <= gamma_max");
    }
    std::vector<JitterSweepPoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const double mhz = gamma_min_mhz + f * (gamma_max_mhz - gamma_min_mhz);
        out.push_back({mhz, jitter_limited_g2zero(AngularFrequency::mhz_over_2pi(mhz), irf, omega_ratio)});
    }
    return out;
}

}  // namespace qdstat
