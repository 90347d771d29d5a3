#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fracdg/potentials.hpp"
#include "fracdg/rng.hpp"

using namespace fracdg;

static const Point O{0.0, 0.0};

TEST_CASE("double well evaluation") {
    auto ps = PotentialSpec::double_well(2.0);
    CHECK(ps.eval(O, 0.0) == Catch::Approx(1.0));
    CHECK(ps.eval(O, 1.0) == 0.0);
    CHECK(ps.eval(O, -1.0) == 0.0);
}

TEST_CASE("jump variants use open-interval conventions") {
    auto chi = PotentialSpec::chi_positive();
    CHECK(chi.eval(O, -3.0) == 0.0);
    CHECK(chi.eval(O, 0.0) == 0.0);
    CHECK(chi.eval(O, 0.1) == 1.0);

    auto tp = PotentialSpec::two_phase(1.0, 2.0);
    CHECK(tp.eval(O, -1.0) == 1.0);
    CHECK(tp.eval(O, 1.0) == 2.0);
    CHECK(tp.eval(O, 0.0) == 0.0);

    auto ci = PotentialSpec::chi_interval();
    CHECK(ci.eval(O, 0.0) == 1.0);
    CHECK(ci.eval(O, 1.0) == 0.0);
    CHECK(ci.eval(O, -1.0) == 0.0);
}

TEST_CASE("derivative of the double well") {
    auto ps = PotentialSpec::double_well(2.0);
    CHECK(ps.eval_f(O, 0.0) == 0.0);
    // symbolic oracle: F(u) = (u^2-1)^2, F'(u) = 4u(u^2-1); at u=2: 24
    CHECK(ps.eval_f(O, 2.0) == Catch::Approx(24.0));
    CHECK_THROWS_AS(PotentialSpec::chi_positive().eval_f(O, 1.0), unsupported_operation_error);
    CHECK_THROWS_AS(PotentialSpec::double_well(1.0).eval_f(O, 0.5), unsupported_operation_error);
}

TEST_CASE("gradient consistency by central differences") {
    Rng rng(5);
    const double eps = 1e-5;
    auto dw = PotentialSpec::double_well(2.0);
    auto tab = PotentialSpec::smooth_table({-2.0, -1.0, -0.3, 0.4, 1.1, 2.0},
                                           {3.0, 0.5, 0.2, 0.3, 0.6, 2.5}, {5.0, 0.0, 1.0});
    for (int t = 0; t < 200; ++t) {
        double u = rng.uniform(-1.8, 1.8);
        if (std::abs(1.0 - u * u) < 0.05) continue; // away from the well roots
        const double fd = (dw.eval(O, u + eps) - dw.eval(O, u - eps)) / (2.0 * eps);
        const double an = dw.eval_f(O, u);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
    for (int t = 0; t < 200; ++t) {
        double u = rng.uniform(-1.9, 1.9);
        // skip table nodes where the cubic has derivative kinks
        bool near_node = false;
        for (double xn : tab.table.x)
            if (std::abs(u - xn) < 1e-3) near_node = true;
        if (near_node) continue;
        const double fd = (tab.eval(O, u + eps) - tab.eval(O, u - eps)) / (2.0 * eps);
        const double an = tab.eval_f(O, u);
        CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("growth audits") {
    // chi_positive with (1, 0, 1) passes
    CHECK(check_growth(PotentialSpec::chi_positive(), -5.0, 5.0, 100).pass);

    // double_well(2) with (1,0,1) passes on [-1,1]
    CHECK(check_growth(PotentialSpec::double_well(2.0), -1.0, 1.0, 100).pass);

    // ... but fails on [-3,3]: F(3) = 64 (direct maximization oracle: max at range end)
    auto rep = check_growth(PotentialSpec::double_well(2.0), -3.0, 3.0, 100);
    CHECK_FALSE(rep.pass);
    double worst_lhs = 0.0;
    for (const auto& r : rep.samples) worst_lhs = std::max(worst_lhs, r.lhs);
    CHECK(worst_lhs == Catch::Approx(64.0));
}

TEST_CASE("local boundedness of the well family on its working range") {
    for (double d : {0.5, 1.0, 2.0, 3.5}) {
        auto ps = PotentialSpec::double_well(d);
        CHECK(check_growth(ps, -1.0, 1.0, 200).pass); // d1 = 1 suffices on [-1,1]
    }
}

TEST_CASE("smooth table interpolates its nodes monotonically between samples") {
    auto ps = PotentialSpec::smooth_table({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 5.0},
                                          {5.0, 0.0, 1.0});
    CHECK(ps.eval(O, 0.0) == Catch::Approx(0.0));
    CHECK(ps.eval(O, 1.0) == Catch::Approx(1.0));
    CHECK(ps.eval(O, 3.0) == Catch::Approx(5.0));
    // monotone segments stay within node bounds
    for (double u = 0.0; u <= 1.0; u += 0.01) {
        CHECK(ps.eval(O, u) >= -1e-12);
        CHECK(ps.eval(O, u) <= 1.0 + 1e-12);
    }
}
