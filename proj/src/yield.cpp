#include "qdstat/yield.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "qdstat/error.hpp"

namespace qdstat {
namespace {

void require_increasing(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw DomainError(std::string("yield map: empty ") + name + " axis");
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            throw DomainError(std::string("yield map: ") + name + " axis must be strictly increasing");
        }
    }
}

}  // namespace

void YieldConfig::validate() const {
    if (!(sigma_nm > 0.0)) throw DomainError("yield: sigma must be positive");
    if (!(area_um2 > 0.0)) throw DomainError("yield: area must be positive");
    if (!(density_per_um2 >= 0.0)) throw DomainError("yield: density must be non-negative");
    if (!(penalty > 0.0 && penalty <= 1.0)) throw DomainError("yield: penalty must lie in (0, 1]");
}

double pair_probability(double delta_lambda_nm, double sigma_nm) {
    if (!(sigma_nm > 0.0)) throw DomainError("pair probability: sigma must be positive");
    if (!(delta_lambda_nm >= 0.0)) throw DomainError("pair probability: tuning range must be non-negative");
    return std::erf(delta_lambda_nm / (sigma_nm * std::numbers::sqrt2));
}

double expected_pairs(const YieldConfig& config, double delta_lambda_nm) {
    config.validate();
    const double emitters = config.area_um2 * config.density_per_um2;
    const double pairs = config.convention == PairConvention::Squared ? emitters * emitters
                                                                       : 0.5 * emitters * std::max(0.0, emitters - 1.0);
    return config.penalty * pair_probability(delta_lambda_nm, config.sigma_nm) * pairs;
}

YieldGrid yield_map(const YieldConfig& config, const std::vector<double>& delta_lambda_nm,
                    const std::vector<double>& density_per_um2) {
    require_increasing(delta_lambda_nm, "tuning-range");
    require_increasing(density_per_um2, "density");
    YieldGrid grid{delta_lambda_nm, density_per_um2, {}};
    grid.counts.assign(delta_lambda_nm.size(), std::vector<double>(density_per_um2.size(), 0.0));
    YieldConfig cell = config;
    for (std::size_t i = 0; i < delta_lambda_nm.size(); ++i) {
        for (std::size_t j = 0; j < density_per_um2.size(); ++j) {
            cell.density_per_um2 = density_per_um2[j];
            grid.counts[i][j] = expected_pairs(cell, delta_lambda_nm[i]);
        }
    }
    return grid;
}

void write_csv(std::ostream& out, const YieldGrid& grid) {
    out << "delta_lambda_nm,density_per_um2,expected_pairs\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < grid.delta_lambda_nm.size(); ++i) {
        for (std::size_t j = 0; j < grid.density_per_um2.size(); ++j) {
            out << grid.delta_lambda_nm[i] << ',' << grid.density_per_um2[j] << ',' << grid.counts[i][j] << '\n';
        }
    }
}

}  // namespace qdstat
