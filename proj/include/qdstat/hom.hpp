#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "qdstat/correlation.hpp"
#include "qdstat/curve.hpp"
#include "qdstat/emitter.hpp"

namespace qdstat {

/// Mutual detuning held at a fixed value (rad/s).
struct FixedDetuning {
    double delta_omega = 0.0;
};

/// Mutual detuning drawn from N(0, sigma^2) (rad/s), e.g. from uncorrelated
/// spectral diffusion of the two emitters.
struct GaussianDetuning {
    double sigma = 0.0;
};

using Detuning = std::variant<FixedDetuning, GaussianDetuning>;

/// Two-emitter Hong-Ou-Mandel configuration.
///
/// Weights are the intensity fractions c_n = I_n / (I_A + I_B). g2zero_n are
/// the zero-delay correlations that set the purity factors
/// zeta_n = sqrt(1 - g2zero_n).
class HomConfig {
public:
    /// Throws DomainError unless the weights are non-negative and sum to one
    /// (1e-9), 0 <= g2zero < 1, and R (when supplied) is positive.
    HomConfig(EmitterParams emitter_a, EmitterParams emitter_b, double weight_a, double weight_b,
              double g2zero_a, double g2zero_b, std::optional<double> r_constant = std::nullopt,
              Detuning detuning = FixedDetuning{});

    const EmitterParams& emitter_a() const { return emitter_a_; }
    const EmitterParams& emitter_b() const { return emitter_b_; }
    double weight_a() const { return weight_a_; }
    double weight_b() const { return weight_b_; }
    double g2zero_a() const { return g2zero_a_; }
    double g2zero_b() const { return g2zero_b_; }
    double zeta_a() const;
    double zeta_b() const;
    const std::optional<double>& r_constant() const { return r_constant_; }
    const Detuning& detuning() const { return detuning_; }

    /// Supplied R, or the closed-form solution of solve_r.
    double effective_r() const;

    HomConfig with_detuning(Detuning detuning) const;
    HomConfig with_r(std::optional<double> r) const;
    /// Exchanges the roles of A and B (weights included).
    HomConfig swapped() const;

private:
    EmitterParams emitter_a_;
    EmitterParams emitter_b_;
    double weight_a_;
    double weight_b_;
    double g2zero_a_;
    double g2zero_b_;
    std::optional<double> r_constant_;
    Detuning detuning_;
};

/// Purity factor sqrt(1 - g2zero).
double purity_factor(double g2zero);

/// Cross-polarized (distinguishable) coincidences c_A^2 g2_A + c_B^2 g2_B + 2 c_A c_B.
CorrelationCurve g2_cross(const HomConfig& config, const CorrelationCurve& g2_a,
                          const CorrelationCurve& g2_b);

/// Co-polarized coincidences at fixed detuning:
/// c_A^2 g2_A + c_B^2 g2_B + 2 R c_A c_B [1 - zeta_A zeta_B |g1_A| |g1_B| cos(delta_omega tau)].
CorrelationCurve g2_parallel(const HomConfig& config, const CorrelationCurve& g2_a,
                             const CorrelationCurve& g2_b, const CorrelationCurve& g1_a,
                             const CorrelationCurve& g1_b, double delta_omega);

/// Normalization constant enforcing g2_parallel -> 1 at long delay:
/// R = 1 / [1 - zeta_A zeta_B g1_A(inf) g1_B(inf)].
/// Throws NumericalError when the denominator vanishes.
double solve_r(const HomConfig& config);

/// Ensemble average of g2_parallel over the configured detuning, using the
/// Gaussian characteristic function cos(d tau) -> exp(-sigma^2 tau^2 / 2).
/// With a FixedDetuning this is g2_parallel at that detuning.
CorrelationCurve ensemble_average_parallel(const HomConfig& config, const CorrelationCurve& g2_a,
                                           const CorrelationCurve& g2_b, const CorrelationCurve& g1_a,
                                           const CorrelationCurve& g1_b);

struct MonteCarloAverage {
    CorrelationCurve mean;
    std::vector<double> standard_error;
    std::size_t samples;
};

/// Brute-force ensemble average: draws `samples` detunings from the
/// configured Gaussian with a generator seeded by `seed`. Samples are split
/// into fixed chunks with per-chunk seeds, so the result is independent of
/// the number of worker threads.
MonteCarloAverage monte_carlo_average_parallel(const HomConfig& config, const CorrelationCurve& g2_a,
                                               const CorrelationCurve& g2_b, const CorrelationCurve& g1_a,
                                               const CorrelationCurve& g1_b, std::size_t samples,
                                               std::uint64_t seed);

/// V(tau) = 1 - g2_parallel / g2_cross. Throws NumericalError naming the
/// first index where g2_cross is not positive.
CorrelationCurve visibility(const CorrelationCurve& g2_parallel_curve, const CorrelationCurve& g2_cross_curve);

/// sqrt(sigma_a^2 + sigma_b^2): width of the mutual detuning of two emitters
/// with independent Gaussian spectral diffusion.
double combined_detuning_sigma(double sigma_a, double sigma_b);

/// Full width of the central peak of a curve at half its tau = 0 value,
/// linearly interpolated between samples. Symmetric grid required.
double central_peak_fwhm(const CorrelationCurve& curve);

/// Everything a HOM prediction produces on one grid.
struct HomCurves {
    double r_constant;
    CorrelationCurve g2_a;
    CorrelationCurve g2_b;
    CorrelationCurve g1_a;
    CorrelationCurve g1_b;
    CorrelationCurve cross;
    CorrelationCurve parallel;
    CorrelationCurve vis;
};

/// Builds single-emitter curves from the measured-g2 model and then the
/// cross, parallel and visibility curves. The impurity used for each emitter's
/// g2 curve is derived from its g2zero so that the curve reproduces it at tau = 0
/// before IRF smoothing.
HomCurves simulate_hom(const HomConfig& config, const TauGrid& grid, const IrfParams& irf = IrfParams{},
                       const BunchingEnvelope& bunching_a = {}, const BunchingEnvelope& bunching_b = {});

}  // namespace qdstat
