#include <numeric>

#include "doctest.h"
#include "qdstat/error.hpp"
#include "qdstat/irf.hpp"
#include "qdstat/tls.hpp"
#include "test_support.hpp"

using namespace qdstat;
using qdstat::testing::rel_err;

TEST_SUITE("irf") {
    TEST_CASE("kernel mass") {
        for (double ratio : {0.25, 1.0, 4.0, 17.3}) {
            const std::vector<double> k = gaussian_kernel(ratio, 1.0);
            CHECK(std::abs(std::accumulate(k.begin(), k.end(), 0.0) - 1.0) <= 1e-6);
            CHECK(k.size() % 2 == 1);
            CHECK(k.front() == doctest::Approx(k.back()));
        }
        CHECK(IrfParams(226e-12).sigma() == doctest::Approx(226e-12 / 2.354820045030949).epsilon(1e-14));
        CHECK_THROWS_AS(IrfParams(-1.0), DomainError);
    }

    TEST_CASE("zero width is the identity") {
        const CorrelationCurve c(TauGrid::symmetric(1.0, 0.5), {1.0, 0.2, 0.0, 0.2, 1.0}, CurveKind::G2);
        const CorrelationCurve out = convolve_irf(c, IrfParams(0.0));
        CHECK(out.values() == c.values());
    }

    TEST_CASE("constant curve unchanged") {
        const TauGrid grid = TauGrid::symmetric(2e-9, 1e-11);
        const CorrelationCurve c(grid, std::vector<double>(grid.size, 0.7), CurveKind::G2);
        const CorrelationCurve out = convolve_irf(c, IrfParams(226e-12));
        for (double v : out.values()) CHECK(std::abs(v - 0.7) <= 1e-12);
    }

    TEST_CASE("narrow dip is filled in") {
        const TauGrid grid = TauGrid::symmetric(2e-9, 1e-11);
        std::vector<double> v(grid.size, 1.0);
        v[grid.index_of_zero()] = 0.0;
        const CorrelationCurve out = convolve_irf(CorrelationCurve(grid, v, CurveKind::G2), IrfParams(226e-12));
        CHECK(out.at_zero() > 0.0);
        CHECK(out.at_zero() < 1.0);
    }

    TEST_CASE("convolution commutes with symmetrization for even input") {
        const EmitterParams a = testing::emitter(233.0, 0.48);
        const TauGrid grid = TauGrid::symmetric(3e-9, 1e-11);
        const CorrelationCurve c = g2_tls_curve(a, grid);
        const CorrelationCurve lhs = convolve_irf(symmetrize(c), IrfParams(226e-12));
        const CorrelationCurve rhs = symmetrize(convolve_irf(c, IrfParams(226e-12)));
        for (std::size_t i = 0; i < grid.size; ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-14);
    }

    TEST_CASE("grid must resolve the response") {
        const CorrelationCurve c(TauGrid::symmetric(1e-9, 1e-10), std::vector<double>(21, 1.0), CurveKind::G2);
        CHECK_THROWS_AS(convolve_irf(c, IrfParams(226e-12)), GridError);
    }

    TEST_CASE("jitter-limited antibunching against quadrature") {
        // Adaptive quadrature of g2_tls against the Gaussian response.
        struct Point {
            double gamma_mhz;
            double value;
        };
        constexpr Point kPoints[] = {{100.0, 1.022679198358e-03},
                                     {167.0, 2.763391099589e-03},
                                     {233.0, 5.215866584766e-03},
                                     {500.0, 2.126456101378e-02}};
        const IrfParams irf(226e-12);
        for (const Point& p : kPoints) {
            const double v = jitter_limited_g2zero(AngularFrequency::mhz_over_2pi(p.gamma_mhz), irf, 0.3);
            INFO("gamma " << p.gamma_mhz);
            CHECK(rel_err(v, p.value) < 1e-4);
        }
        CHECK(jitter_limited_g2zero(AngularFrequency::mhz_over_2pi(233.0), IrfParams(0.0), 0.3) == 0.0);
    }

    TEST_CASE("jitter-limited value is monotone in rate and width") {
        const double gammas[] = {100.0, 200.0, 300.0, 400.0, 500.0};
        const double widths[] = {50.0, 100.0, 226.0, 350.0, 500.0};
        for (double g : gammas) {
            double prev = 0.0;
            for (double w : widths) {
                const double v = jitter_limited_g2zero(AngularFrequency::mhz_over_2pi(g), IrfParams(ps_to_s(w)), 0.3);
                CHECK(v >= prev);
                prev = v;
            }
        }
        for (double w : widths) {
            double prev = 0.0;
            for (double g : gammas) {
                const double v = jitter_limited_g2zero(AngularFrequency::mhz_over_2pi(g), IrfParams(ps_to_s(w)), 0.3);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }

    TEST_CASE("sweep layout") {
        const auto pts = jitter_sweep(100.0, 500.0, 5, IrfParams(226e-12), 0.3);
        REQUIRE(pts.size() == 5);
        CHECK(pts.front().gamma_mhz_over_2pi == 100.0);
        CHECK(pts.back().gamma_mhz_over_2pi == 500.0);
        CHECK(jitter_sweep(1.0, 2.0, 0, IrfParams(226e-12), 0.3).empty());
        CHECK_THROWS_AS(jitter_sweep(0.0, 2.0, 3, IrfParams(226e-12), 0.3), DomainError);
    }
}
