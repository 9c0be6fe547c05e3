#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "qdstat/error.hpp"
#include "qdstat/yield.hpp"
#include "test_support.hpp"

using namespace qdstat;
using qdstat::testing::rel_err;

namespace {

// Half-normal density of the wavelength difference, integrated numerically.
double probability_by_quadrature(double delta, double sigma) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const auto density = [sigma](double x) {
        return std::sqrt(2.0 / std::numbers::pi) / sigma * std::exp(-0.5 * x * x / (sigma * sigma));
    };
    return integrator.integrate(density, 0.0, delta);
}

}  // namespace

TEST_SUITE("yield") {
    TEST_CASE("pair probability") {
        CHECK(pair_probability(0.0, 15.0) == 0.0);
        CHECK(pair_probability(1e4, 15.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(rel_err(pair_probability(0.1, 15.0), 5.319191003908406e-03) < 1e-13);
        CHECK(pair_probability(0.1, 15.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi) * 0.1 / 15.0).epsilon(1e-4));
        for (double d : {0.01, 0.1, 1.0, 5.0, 15.0, 40.0}) {
            INFO("delta " << d);
            CHECK(std::abs(pair_probability(d, 15.0) - probability_by_quadrature(d, 15.0)) <= 1e-10);
        }
    }

    TEST_CASE("probability is increasing, concave and bounded") {
        double prev = -1.0;
        double prev_slope = std::numeric_limits<double>::infinity();
        for (double d = 0.0; d <= 80.0; d += 0.25) {
            const double p = pair_probability(d, 15.0);
            const double slope = (pair_probability(d + 0.125, 15.0) - p) / 0.125;
            CHECK(p > prev);
            CHECK(p <= 1.0);
            CHECK(slope <= prev_slope);
            prev = p;
            prev_slope = slope;
        }
    }

    TEST_CASE("expected pairs") {
        YieldConfig c;
        CHECK(rel_err(expected_pairs(c, 0.1), 17.021411212507) < 1e-12);
        const double one_nm = expected_pairs(c, 1.0);
        CHECK(one_nm / expected_pairs(c, 0.1) == doctest::Approx(10.0).epsilon(0.01));

        YieldConfig doubled = c;
        doubled.density_per_um2 = 20.0;
        CHECK(expected_pairs(doubled, 0.1) == doctest::Approx(4.0 * expected_pairs(c, 0.1)).epsilon(1e-15));
        YieldConfig wider = c;
        wider.area_um2 = 24.0;
        CHECK(expected_pairs(wider, 0.1) == doctest::Approx(9.0 * expected_pairs(c, 0.1)).epsilon(1e-15));

        YieldConfig empty = c;
        empty.density_per_um2 = 0.0;
        CHECK(expected_pairs(empty, 0.1) == 0.0);

        YieldConfig combos = c;
        combos.convention = PairConvention::Combinations;
        CHECK(expected_pairs(combos, 0.1) == doctest::Approx(expected_pairs(c, 0.1) * 3160.0 / 6400.0).epsilon(1e-14));

        YieldConfig bad = c;
        bad.penalty = 1.5;
        CHECK_THROWS_AS(expected_pairs(bad, 0.1), DomainError);
        bad = c;
        bad.sigma_nm = 0.0;
        CHECK_THROWS_AS(expected_pairs(bad, 0.1), DomainError);
    }

    TEST_CASE("map") {
        const YieldConfig c;
        const YieldGrid single = yield_map(c, {0.1}, {10.0});
        CHECK(single.counts[0][0] == expected_pairs(c, 0.1));

        std::vector<double> deltas;
        std::vector<double> densities;
        for (int i = 1; i <= 20; ++i) deltas.push_back(0.05 * i);
        for (int j = 0; j <= 20; ++j) densities.push_back(1.0 * j);
        const YieldGrid g = yield_map(c, deltas, densities);
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            CHECK(g.counts[i][0] == 0.0);
            for (std::size_t j = 0; j < densities.size(); ++j) {
                CHECK(g.counts[i][j] >= 0.0);
                if (i > 0) CHECK(g.counts[i][j] >= g.counts[i - 1][j]);
                if (j > 0) CHECK(g.counts[i][j] >= g.counts[i][j - 1]);
            }
        }
        CHECK_THROWS_AS(yield_map(c, {0.2, 0.1}, {1.0}), DomainError);
        CHECK_THROWS_AS(yield_map(c, {0.1}, {1.0, 1.0}), DomainError);

        std::ostringstream csv;
        write_csv(csv, single);
        CHECK(csv.str().rfind("delta_lambda_nm,density_per_um2,expected_pairs\n", 0) == 0);
    }
}
