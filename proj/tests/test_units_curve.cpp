#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "qdstat/curve.hpp"
#include "qdstat/error.hpp"
#include "qdstat/units.hpp"

using namespace qdstat;

TEST_SUITE("units") {
    TEST_CASE("frequency conventions") {
        const auto g = AngularFrequency::mhz_over_2pi(233.0);
        CHECK(g.rad_per_s() == doctest::Approx(2.0 * 3.141592653589793 * 233e6).epsilon(1e-15));
        CHECK(g.in_mhz_over_2pi() == doctest::Approx(233.0).epsilon(1e-15));
        CHECK(AngularFrequency::per_ns(1.46).rad_per_s() == doctest::Approx(1.46e9).epsilon(1e-15));
        CHECK(AngularFrequency::ghz_over_2pi(3.45).in_mhz_over_2pi() == doctest::Approx(3450.0).epsilon(1e-14));
        CHECK((g * 0.5).in_mhz_over_2pi() == doctest::Approx(116.5).epsilon(1e-15));
        CHECK(AngularFrequency::per_ns(1.0) < AngularFrequency::per_ns(2.0));
    }

    TEST_CASE("fwhm and sigma") {
        CHECK(fwhm_to_sigma(226e-12) * kFwhmPerSigma == doctest::Approx(226e-12).epsilon(1e-15));
        CHECK(kFwhmPerSigma == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-15));
        CHECK(sigma_to_fwhm(fwhm_to_sigma(3.0)) == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(ps_to_s(10.0) == doctest::Approx(1e-11));
        CHECK(s_to_ns(ns_to_s(7.5)) == doctest::Approx(7.5));
    }
}

TEST_SUITE("curve") {
    TEST_CASE("grids") {
        const TauGrid s = TauGrid::symmetric(1e-9, 1e-11);
        CHECK(s.size == 201);
        CHECK(s.is_symmetric());
        CHECK(s.index_of_zero() == 100);
        CHECK(s.at(s.index_of_zero()) == 0.0);
        const TauGrid n = TauGrid::non_negative(1e-9, 1e-11);
        CHECK(n.size == 101);
        CHECK(n.at(0) == 0.0);
        CHECK_FALSE(n.is_symmetric());
        CHECK_THROWS_AS(TauGrid::from_start(0.0, 0.0, 3), GridError);
        CHECK_THROWS_AS(TauGrid::symmetric(-1.0, 0.1), GridError);
    }

    TEST_CASE("validation by kind") {
        CHECK_THROWS_AS(CorrelationCurve(0.0, 1.0, {0.5, -0.1}, CurveKind::G2), DomainError);
        CHECK_THROWS_AS(CorrelationCurve(0.0, 1.0, {1.5}, CurveKind::G1Normalized), DomainError);
        CHECK_THROWS_AS(CorrelationCurve(0.0, 1.0, {std::nan("")}, CurveKind::Visibility), NumericalError);
        CHECK_THROWS_AS(CorrelationCurve(0.0, 1.0, {}, CurveKind::G2), GridError);
        CHECK_NOTHROW(CorrelationCurve(0.0, 1.0, {-0.2, 0.3}, CurveKind::Visibility));
    }

    TEST_CASE("kind tags round trip") {
        for (CurveKind k : {CurveKind::G1Raw, CurveKind::G1Normalized, CurveKind::G2, CurveKind::G2Cross,
                            CurveKind::G2Parallel, CurveKind::Visibility, CurveKind::IntensityDecay}) {
            CHECK(curve_kind_from_string(to_string(k)) == k);
        }
        CHECK_THROWS_AS(curve_kind_from_string("g3"), DomainError);
    }

    TEST_CASE("csv and json round trip") {
        const CorrelationCurve c(TauGrid::symmetric(2e-10, 1e-10), {0.9, 0.4, 0.1, 0.4, 0.9}, CurveKind::G2);
        std::stringstream ss;
        write_csv(ss, c, {{"extra", {1, 2, 3, 4, 5}}});
        const std::string text = ss.str();
        CHECK(text.rfind("tau_s,value,extra\n", 0) == 0);
        std::stringstream plain;
        write_csv(plain, c);
        const CorrelationCurve back = read_csv(plain, CurveKind::G2);
        REQUIRE(back.size() == c.size());
        for (std::size_t i = 0; i < c.size(); ++i) CHECK(back[i] == c[i]);
        CHECK(back.tau_step() == doctest::Approx(c.tau_step()).epsilon(1e-12));

        const CorrelationCurve j = curve_from_json(to_json(c));
        CHECK(j.values() == c.values());
        CHECK(j.kind() == CurveKind::G2);
        CHECK(j.tau_start() == c.tau_start());
    }

    TEST_CASE("symmetrize and grid checks") {
        const CorrelationCurve c(TauGrid::symmetric(1.0, 1.0), {1.0, 0.0, 3.0}, CurveKind::Visibility);
        const CorrelationCurve s = symmetrize(c);
        CHECK(s[0] == 2.0);
        CHECK(s[2] == 2.0);
        CHECK(s.at_zero() == 0.0);
        const CorrelationCurve other(TauGrid::symmetric(2.0, 1.0), {1, 1, 1, 1, 1}, CurveKind::Visibility);
        CHECK_THROWS_AS(require_same_grid(c, other, "test"), GridError);
    }
}
