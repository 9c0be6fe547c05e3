#include "qdstat/hom.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "qdstat/error.hpp"
#include "qdstat/tls.hpp"

namespace qdstat {
namespace {

void require_aligned(std::initializer_list<const CorrelationCurve*> curves, std::string_view what) {
    const CorrelationCurve& first = **curves.begin();
    for (const CorrelationCurve* c : curves) require_same_grid(first, *c, what);
}

// Fixed partition of the Monte Carlo samples; the seed of each chunk depends
// only on (seed, chunk index).
constexpr std::size_t kMonteCarloChunks = 64;

struct CosineMoments {
    std::vector<double> sum;
    std::vector<double> sum_sq;
};

CosineMoments sample_chunk(const std::vector<double>& taus, double sigma, std::size_t count, std::uint64_t seed,
                           std::size_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> detuning(0.0, sigma);
    CosineMoments m{std::vector<double>(taus.size(), 0.0), std::vector<double>(taus.size(), 0.0)};
    for (std::size_t s = 0; s < count; ++s) {
        const double d = detuning(rng);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const double c = std::cos(d * taus[i]);
            m.sum[i] += c;
            m.sum_sq[i] += c * c;
        }
    }
    return m;
}

// c_A^2 g2_A + c_B^2 g2_B + 2 R c_A c_B [1 - zeta_A zeta_B |g1_A g1_B| * phase_factor(i)]
template <typename PhaseFactor>
std::vector<double> parallel_values(const HomConfig& cfg, const CorrelationCurve& g2_a,
                                    const CorrelationCurve& g2_b, const CorrelationCurve& g1_a,
                                    const CorrelationCurve& g1_b, PhaseFactor phase_factor) {
    const double ca = cfg.weight_a();
    const double cb = cfg.weight_b();
    const double r = cfg.effective_r();
    const double zz = cfg.zeta_a() * cfg.zeta_b();
    std::vector<double> out(g2_a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double overlap = zz * std::abs(g1_a[i]) * std::abs(g1_b[i]) * phase_factor(i);
        out[i] = ca * ca * g2_a[i] + cb * cb * g2_b[i] + 2.0 * r * ca * cb * (1.0 - overlap);
    }
    return out;
}

}  // namespace

HomConfig::HomConfig(EmitterParams emitter_a, EmitterParams emitter_b, double weight_a, double weight_b,
                     double g2zero_a, double g2zero_b, std::optional<double> r_constant, Detuning detuning)
    : emitter_a_(emitter_a),
      emitter_b_(emitter_b),
      weight_a_(weight_a),
      weight_b_(weight_b),
      g2zero_a_(g2zero_a),
      g2zero_b_(g2zero_b),
      r_constant_(r_constant),
      detuning_(detuning) {
    if (!(weight_a_ >= 0.0 && weight_b_ >= 0.0)) throw DomainError("hom: weights must be non-negative");
    if (std::abs(weight_a_ + weight_b_ - 1.0) > 1e-9) throw DomainError("hom: weights must sum to one");
    for (double g : {g2zero_a_, g2zero_b_}) {
        if (!(g >= 0.0 && g < 1.0)) throw DomainError("hom: g2(0) must lie in [0, 1)");
    }
    if (r_constant_ && !(*r_constant_ > 0.0)) throw DomainError("hom: R must be positive");
    if (const auto* g = std::get_if<GaussianDetuning>(&detuning_); g && !(g->sigma >= 0.0)) {
        throw DomainError("hom: detuning width must be non-negative");
    }
}

double HomConfig::zeta_a() const { return purity_factor(g2zero_a_); }
double HomConfig::zeta_b() const { return purity_factor(g2zero_b_); }

double HomConfig::effective_r() const { return r_constant_ ? *r_constant_ : solve_r(*this); }

HomConfig HomConfig::with_detuning(Detuning detuning) const {
    HomConfig c = *this;
    c.detuning_ = detuning;
    return c;
}

HomConfig HomConfig::with_r(std::optional<double> r) const {
    return HomConfig(emitter_a_, emitter_b_, weight_a_, weight_b_, g2zero_a_, g2zero_b_, r, detuning_);
}

HomConfig HomConfig::swapped() const {
    return HomConfig(emitter_b_, emitter_a_, weight_b_, weight_a_, g2zero_b_, g2zero_a_, r_constant_, detuning_);
}

double purity_factor(double g2zero) {
    if (!(g2zero >= 0.0 && g2zero < 1.0)) throw DomainError("purity factor: g2(0) must lie in [0, 1)");
    return std::sqrt(1.0 - g2zero);
}

CorrelationCurve g2_cross(const HomConfig& config, const CorrelationCurve& g2_a, const CorrelationCurve& g2_b) {
    require_same_grid(g2_a, g2_b, "g2_cross");
    const double ca = config.weight_a();
    const double cb = config.weight_b();
    std::vector<double> out(g2_a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = ca * ca * g2_a[i] + cb * cb * g2_b[i] + 2.0 * ca * cb;
    }
    return CorrelationCurve(g2_a.grid(), std::move(out), CurveKind::G2Cross);
}

CorrelationCurve g2_parallel(const HomConfig& config, const CorrelationCurve& g2_a, const CorrelationCurve& g2_b,
                             const CorrelationCurve& g1_a, const CorrelationCurve& g1_b, double delta_omega) {
    require_aligned({&g2_a, &g2_b, &g1_a, &g1_b}, "g2_parallel");
    const TauGrid grid = g2_a.grid();
    const std::vector<double> taus = grid.taus();
    auto values = parallel_values(config, g2_a, g2_b, g1_a, g1_b,
                                  [&](std::size_t i) { return std::cos(delta_omega * taus[i]); });
    return CorrelationCurve(grid, std::move(values), CurveKind::G2Parallel);
}

double solve_r(const HomConfig& config) {
    const double overlap = config.zeta_a() * config.zeta_b() * config.emitter_a().coherent_fraction() *
                           config.emitter_b().coherent_fraction();
    const double denom = 1.0 - overlap;
    if (denom <= 1e-12) {
        throw NumericalError("solve_r: interference term never decays (undriven, perfectly pure emitters); "
                             "R is undefined");
    }
    return 1.0 / denom;
}

CorrelationCurve ensemble_average_parallel(const HomConfig& config, const CorrelationCurve& g2_a,
                                           const CorrelationCurve& g2_b, const CorrelationCurve& g1_a,
                                           const CorrelationCurve& g1_b) {
    if (const auto* fixed = std::get_if<FixedDetuning>(&config.detuning())) {
        return g2_parallel(config, g2_a, g2_b, g1_a, g1_b, fixed->delta_omega);
    }
    require_aligned({&g2_a, &g2_b, &g1_a, &g1_b}, "ensemble_average_parallel");
    const double sigma = std::get<GaussianDetuning>(config.detuning()).sigma;
    const TauGrid grid = g2_a.grid();
    const std::vector<double> taus = grid.taus();
    auto values = parallel_values(config, g2_a, g2_b, g1_a, g1_b, [&](std::size_t i) {
        const double x = sigma * taus[i];
        return std::exp(-0.5 * x * x);
    });
    return CorrelationCurve(grid, std::move(values), CurveKind::G2Parallel);
}

MonteCarloAverage monte_carlo_average_parallel(const HomConfig& config, const CorrelationCurve& g2_a,
                                               const CorrelationCurve& g2_b, const CorrelationCurve& g1_a,
                                               const CorrelationCurve& g1_b, std::size_t samples,
                                               std::uint64_t seed) {
    require_aligned({&g2_a, &g2_b, &g1_a, &g1_b}, "monte_carlo_average_parallel");
    if (samples < 2) throw DomainError("monte carlo: need at least two samples");
    double sigma = 0.0;
    if (const auto* g = std::get_if<GaussianDetuning>(&config.detuning())) {
        sigma = g->sigma;
    } else {
        throw DomainError("monte carlo: configuration has a fixed detuning");
    }
    const std::vector<double> taus = g2_a.grid().taus();

    std::vector<std::size_t> counts(kMonteCarloChunks, samples / kMonteCarloChunks);
    for (std::size_t c = 0; c < samples % kMonteCarloChunks; ++c) ++counts[c];

    std::vector<CosineMoments> parts(kMonteCarloChunks);
    const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    for (std::size_t first = 0; first < kMonteCarloChunks; first += workers) {
        const std::size_t last = std::min(kMonteCarloChunks, first + workers);
        std::vector<std::future<CosineMoments>> jobs;
        for (std::size_t c = first; c < last; ++c) {
            jobs.push_back(std::async(std::launch::async, sample_chunk, std::cref(taus), sigma, counts[c], seed, c));
        }
        for (std::size_t c = first; c < last; ++c) parts[c] = jobs[c - first].get();
    }

    // Merge in chunk order so the result does not depend on scheduling.
    std::vector<double> sum(taus.size(), 0.0);
    std::vector<double> sum_sq(taus.size(), 0.0);
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < taus.size(); ++i) {
            sum[i] += p.sum[i];
            sum_sq[i] += p.sum_sq[i];
        }
    }
    const auto n = static_cast<double>(samples);
    std::vector<double> mean_cos(taus.size());
    std::vector<double> se_cos(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        mean_cos[i] = sum[i] / n;
        const double var = std::max(0.0, (sum_sq[i] - n * mean_cos[i] * mean_cos[i]) / (n - 1.0));
        se_cos[i] = std::sqrt(var / n);
    }

    auto values = parallel_values(config, g2_a, g2_b, g1_a, g1_b, [&](std::size_t i) { return mean_cos[i]; });
    // The estimate is linear in the mean cosine; scale its standard error accordingly.
    const double coeff = 2.0 * config.effective_r() * config.weight_a() * config.weight_b() * config.zeta_a() *
                         config.zeta_b();
    std::vector<double> se(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        se[i] = coeff * std::abs(g1_a[i]) * std::abs(g1_b[i]) * se_cos[i];
    }
    return MonteCarloAverage{CorrelationCurve(g2_a.grid(), std::move(values), CurveKind::G2Parallel),
                             std::move(se), samples};
}

CorrelationCurve visibility(const CorrelationCurve& g2_parallel_curve, const CorrelationCurve& g2_cross_curve) {
    require_same_grid(g2_parallel_curve, g2_cross_curve, "visibility");
    std::vector<double> out(g2_cross_curve.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double denom = g2_cross_curve[i];
        if (!(denom > 0.0)) {
            std::ostringstream msg;
            msg << "visibility: g2_cross is not positive at index " << i << " (tau = " << g2_cross_curve.tau(i)
                << " s)";
            throw NumericalError(msg.str());
        }
        out[i] = 1.0 - g2_parallel_curve[i] / denom;
    }
    return CorrelationCurve(g2_cross_curve.grid(), std::move(out), CurveKind::Visibility);
}

double combined_detuning_sigma(double sigma_a, double sigma_b) { return std::hypot(sigma_a, sigma_b); }

double central_peak_fwhm(const CorrelationCurve& curve) {
    const TauGrid grid = curve.grid();
    if (!grid.is_symmetric()) throw GridError("peak width: grid must be symmetric");
    const std::size_t centre = grid.index_of_zero();
    const double half = 0.5 * curve[centre];
    for (std::size_t i = centre + 1; i < curve.size(); ++i) {
        if (curve[i] < half) {
            const double frac = (curve[i - 1] - half) / (curve[i - 1] - curve[i]);
            const double t = grid.at(i - 1) + frac * grid.step;
            return 2.0 * t;
        }
    }
    throw NumericalError("peak width: curve does not fall to half maximum inside the grid");
}

HomCurves simulate_hom(const HomConfig& config, const TauGrid& grid, const IrfParams& irf,
                       const BunchingEnvelope& bunching_a, const BunchingEnvelope& bunching_b) {
    auto with_g2zero = [](const EmitterParams& e, double g2zero) {
        return EmitterParams(AngularFrequency::rad_per_s(e.gamma()), AngularFrequency::rad_per_s(e.omega()),
                             AngularFrequency::rad_per_s(e.sigma_diffusion()), g2zero_to_impurity(g2zero));
    };
    const MeasuredG2Model model_a{with_g2zero(config.emitter_a(), config.g2zero_a()), bunching_a, irf};
    const MeasuredG2Model model_b{with_g2zero(config.emitter_b(), config.g2zero_b()), bunching_b, irf};
    CorrelationCurve g2_a = g2_measured(model_a, grid);
    CorrelationCurve g2_b = g2_measured(model_b, grid);
    CorrelationCurve g1_a = g1_curve(config.emitter_a(), grid);
    CorrelationCurve g1_b = g1_curve(config.emitter_b(), grid);
    CorrelationCurve cross = g2_cross(config, g2_a, g2_b);
    CorrelationCurve parallel = ensemble_average_parallel(config, g2_a, g2_b, g1_a, g1_b);
    CorrelationCurve vis = visibility(parallel, cross);
    return HomCurves{config.effective_r(),
                     std::move(g2_a),
                     std::move(g2_b),
                     std::move(g1_a),
                     std::move(g1_b),
                     std::move(cross),
                     std::move(parallel),
                     std::move(vis)};
}

}  // namespace qdstat
