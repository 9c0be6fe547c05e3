#pragma once

#include <iosfwd>
#include <vector>

namespace qdstat {

/// How the number of emitter pairs scales with the emitter count N = A * rho.
enum class PairConvention {
    Squared,       ///< N^2
    Combinations,  ///< N (N - 1) / 2
};

struct YieldConfig {
    double sigma_nm = 15.0;   ///< inhomogeneous standard deviation
    double center_nm = 930.0; ///< informational only
    double area_um2 = 8.0;
    double density_per_um2 = 10.0;
    double penalty = 0.5;
    PairConvention convention = PairConvention::Squared;

    /// Throws DomainError unless sigma, area > 0, density >= 0 and penalty in (0, 1].
    void validate() const;
};

/// Probability that the wavelength difference of two emitters lies within
/// the tuning range: erf(delta / (sigma sqrt 2)).
double pair_probability(double delta_lambda_nm, double sigma_nm);

/// penalty * pair_probability * (number of pairs).
double expected_pairs(const YieldConfig& config, double delta_lambda_nm);

struct YieldGrid {
    std::vector<double> delta_lambda_nm;
    std::vector<double> density_per_um2;
    /// counts[i][j] for delta_lambda_nm[i], density_per_um2[j]
    std::vector<std::vector<double>> counts;
};

/// Expected pair counts over both axes; density in `config` is ignored.
/// Throws DomainError when an axis is empty or not strictly increasing.
YieldGrid yield_map(const YieldConfig& config, const std::vector<double>& delta_lambda_nm,
                    const std::vector<double>& density_per_um2);

/// CSV `delta_lambda_nm,density_per_um2,expected_pairs`, one row per cell.
void write_csv(std::ostream& out, const YieldGrid& grid);

}  // namespace qdstat
