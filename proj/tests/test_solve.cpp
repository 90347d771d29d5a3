#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fracdg/solve.hpp"

using namespace fracdg;

namespace {

ProblemSpec sign_problem(double h, double s = 0.5, double p = 2.0) {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, h);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::sampled(prob.grid,
                                    [](const Point& x) { return x[0] > 0.0 ? 1.0 : -1.0; },
                                    ExteriorExtension::sign_profile());
    prob.kernel = KernelSpec::standard(1, s, p);
    prob.potential = PotentialSpec::zero();
    prob.mode = ProblemSpec::Mode::minimize;
    return prob;
}

} // namespace

TEST_CASE("constant exterior data yields the constant minimizer") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 8);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::constant(prob.grid, 0.7);
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::zero();
    prob.mode = ProblemSpec::Mode::minimize;
    auto [u, rep] = minimize(prob);
    CHECK(rep.converged);
    for (double v : u.values) CHECK(v == Catch::Approx(0.7).margin(1e-7));
    CHECK(rep.final_energy.total == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("double well with constant-one exterior keeps the pure state") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 8);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::constant(prob.grid, 1.0);
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::double_well(2.0);
    prob.mode = ProblemSpec::Mode::minimize;
    auto [u, rep] = minimize(prob);
    CHECK(rep.converged);
    for (double v : u.values) CHECK(v == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("sign exterior data produces a monotone minimizer") {
    auto prob = sign_problem(1.0 / 16);
    auto [u, rep] = minimize(prob);
    CHECK(rep.converged);
    for (std::size_t i = 1; i < u.values.size(); ++i)
        CHECK(u.values[i] >= u.values[i - 1] - 1e-9);
    // odd symmetry of the configuration
    const std::size_t n = u.values.size();
    for (std::size_t i = 0; i < n / 2; ++i)
        CHECK(u.values[i] == Catch::Approx(-u.values[n - 1 - i]).margin(1e-6));
}

TEST_CASE("coarse minimizer matches exhaustive search on a value lattice") {
    // 5 region cells; exhaustive search over an 11-point value lattice per cell
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 0.4);
    prob.omega = Region::make(Ball(0.2, 1.01));
    prob.u0 = GridFunction::sampled(prob.grid,
                                    [](const Point& x) { return x[0] > 0.0 ? 1.0 : -1.0; },
                                    ExteriorExtension::sign_profile());
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::zero();
    prob.mode = ProblemSpec::Mode::minimize;

    auto rs = detail::RowSystem::build(prob, nullptr);
    REQUIRE(rs.unknown_pos.size() == 5);

    std::vector<double> lattice;
    for (int i = -5; i <= 5; ++i) lattice.push_back(0.2 * i);
    std::array<int, 5> pick{0, 0, 0, 0, 0};
    double best = std::numeric_limits<double>::infinity();
    std::array<int, 5> best_pick = pick;
    for (pick[0] = 0; pick[0] < 11; ++pick[0])
        for (pick[1] = 0; pick[1] < 11; ++pick[1])
            for (pick[2] = 0; pick[2] < 11; ++pick[2])
                for (pick[3] = 0; pick[3] < 11; ++pick[3])
                    for (pick[4] = 0; pick[4] < 11; ++pick[4]) {
                        for (int c = 0; c < 5; ++c)
                            rs.values[rs.unknown_pos[c]] = lattice[pick[c]];
                        if (rs.quadratic())
                            for (std::size_t ui = 0; ui < 5; ++ui) rs.refresh_sums(ui);
                        const double E = rs.objective();
                        if (E < best) {
                            best = E;
                            best_pick = pick;
                        }
                    }
    // exhaustive best is monotone nondecreasing
    for (int c = 1; c < 5; ++c) CHECK(lattice[best_pick[c]] >= lattice[best_pick[c - 1]]);

    auto [u, rep] = minimize(prob);
    CHECK(rep.converged);
    // the continuous minimizer does at least as well as the lattice search
    for (std::size_t pos = 0; pos < rs.cells.size(); ++pos)
        rs.values[pos] = u.value_at(rs.cells[pos]);
    if (rs.quadratic())
        for (std::size_t ui = 0; ui < 5; ++ui) rs.refresh_sums(ui);
    CHECK(rs.objective() <= best + 1e-10);
    // and sits within one value-lattice spacing of it
    for (std::size_t c = 0; c < 5; ++c) {
        const std::size_t pos = rs.unknown_pos[c];
        CHECK(std::abs(rs.values[pos] - lattice[best_pick[c]]) <= 0.2);
    }
}

TEST_CASE("minimize reports and invariants") {
    auto prob = sign_problem(1.0 / 16);
    prob.potential = PotentialSpec::double_well(2.0);
    auto [u, rep] = minimize(prob);
    CHECK(rep.converged);

    // energy trajectory monotone within 1e-12
    for (std::size_t i = 1; i < rep.energy_trajectory.size(); ++i)
        CHECK(rep.energy_trajectory[i] <=
              rep.energy_trajectory[i - 1] +
                  1e-12 * std::max(1.0, std::abs(rep.energy_trajectory[i - 1])));

    // exterior invariance: bitwise equality outside the region
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        const Point c = u.grid.cell_center(u.grid.from_linear(k));
        if (!prob.omega.contains(c, 1)) CHECK(u.values[k] == prob.u0.values[k]);
    }

    // stationarity in every hat direction, scaled by the coordinate curvature
    auto rs = detail::RowSystem::build(prob, nullptr);
    for (std::size_t pos = 0; pos < rs.cells.size(); ++pos)
        rs.values[pos] = u.value_at(rs.cells[pos]);
    if (rs.quadratic())
        for (std::size_t ui = 0; ui < rs.unknown_pos.size(); ++ui) rs.refresh_sums(ui);
    for (std::size_t ui = 0; ui < rs.unknown_pos.size(); ui += 7) {
        const std::size_t pos = rs.unknown_pos[ui];
        std::vector<double> hat(u.grid.cell_count(), 0.0);
        hat[u.grid.linear(rs.cells[pos])] = 1.0;
        auto dir = GridFunction(u.grid, std::move(hat), ExteriorExtension::zero());
        const double fv = first_variation(u, dir, prob.kernel, prob.potential);
        const double t0 = rs.values[pos];
        const double dd = 1e-4;
        const double curv = (rs.restriction(ui, t0 + dd) - 2.0 * rs.restriction(ui, t0) +
                             rs.restriction(ui, t0 - dd)) /
                            (dd * dd);
        CHECK(std::abs(fv) <=
              10.0 * std::abs(curv) * prob.solver.line_search_tol + 1e4 * prob.solver.tol_E);
    }
}

TEST_CASE("comparison principle for the monotone scheme") {
    auto probA = sign_problem(1.0 / 8);
    auto probB = probA;
    probB.u0 = GridFunction::sampled(
        probB.grid, [](const Point& x) { return (x[0] > 0.0 ? 1.0 : -1.0) + 0.5; },
        ExteriorExtension::custom(
            [](const Point& x, int) { return (x[0] > 0.0 ? 1.0 : -1.0) + 0.5; }, 1.5, 0.0, 0.0));
    auto [uA, repA] = minimize(probA);
    auto [uB, repB] = minimize(probB);
    REQUIRE(repA.converged);
    REQUIRE(repB.converged);
    for (std::size_t i = 0; i < uA.values.size(); ++i)
        CHECK(uA.values[i] <= uB.values[i] + 10.0 * probA.solver.tol_u);
}

TEST_CASE("minimality audit accepts the constant minimizer") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 8);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::constant(prob.grid, 0.3);
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::zero();
    prob.mode = ProblemSpec::Mode::minimize;
    auto rep = verify_minimality(prob.u0, prob, 40, 99);
    CHECK(rep.pass);
    CHECK(rep.worst_ratio <= 1.0);
}

TEST_CASE("minimality audit rejects a perturbed minimizer") {
    auto prob = sign_problem(1.0 / 16);
    auto [u, rep0] = minimize(prob);
    REQUIRE(rep0.converged);
    auto v = u;
    // +0.1 at one interior cell
    const CellIndex mid = v.grid.cell_of({0.1, 0.0});
    v.values[v.grid.linear(mid)] += 0.1;
    auto rep = verify_minimality(v, prob, 60, 7);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("truncation competitor at the maximum leaves the energy unchanged") {
    auto prob = sign_problem(1.0 / 16);
    auto [u, rep0] = minimize(prob);
    REQUIRE(rep0.converged);
    auto rs = detail::RowSystem::build(prob, nullptr);
    for (std::size_t pos = 0; pos < rs.cells.size(); ++pos)
        rs.values[pos] = u.value_at(rs.cells[pos]);
    if (rs.quadratic())
        for (std::size_t ui = 0; ui < rs.unknown_pos.size(); ++ui) rs.refresh_sums(ui);
    const double E0 = rs.objective();
    double kmax = -1e300;
    for (std::size_t ui = 0; ui < rs.unknown_pos.size(); ++ui)
        kmax = std::max(kmax, rs.values[rs.unknown_pos[ui]]);
    for (std::size_t ui = 0; ui < rs.unknown_pos.size(); ++ui) {
        double& t = rs.values[rs.unknown_pos[ui]];
        t -= 0.5 * std::max(t - kmax, 0.0); // empty truncation
    }
    if (rs.quadratic())
        for (std::size_t ui = 0; ui < rs.unknown_pos.size(); ++ui) rs.refresh_sums(ui);
    CHECK(rs.objective() == Catch::Approx(E0).epsilon(1e-14));
}

TEST_CASE("equation mode: constants are harmonic") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 8);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::constant(prob.grid, 1.4);
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::zero();
    prob.mode = ProblemSpec::Mode::equation;
    auto [u, rep] = solve_equation(prob);
    CHECK(rep.converged);
    for (double v : u.values) CHECK(v == Catch::Approx(1.4).margin(1e-7));
}

TEST_CASE("equation mode satisfies the discrete maximum principle") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 16);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::sampled(
        prob.grid, [](const Point& x) { return 1.0 + 0.5 * std::sin(2.0 * x[0]); },
        ExteriorExtension::sin_profile(1.0, 0.5, 2.0, 0.0));
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::zero();
    prob.mode = ProblemSpec::Mode::equation;
    auto [u, rep] = solve_equation(prob);
    CHECK(rep.converged);
    const double lo = 0.5, hi = 1.5;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        const Point c = u.grid.cell_center(u.grid.from_linear(k));
        if (prob.omega.contains(c, 1)) {
            CHECK(u.values[k] >= lo - 1e-6);
            CHECK(u.values[k] <= hi + 1e-6);
        }
    }
}

TEST_CASE("minimize and equation modes agree for the smooth double well") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 16); // 64 cells
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::sampled(
        prob.grid, [](const Point& x) { return 1.0 + 0.2 * std::sin(1.5 * x[0]); },
        ExteriorExtension::sin_profile(1.0, 0.2, 1.5, 0.0));
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::double_well(2.0);
    prob.solver.tol_u = 1e-9;
    prob.solver.line_search_tol = 1e-12;
    prob.solver.tol_E = 1e-12;
    prob.solver.max_sweeps = 2000;

    prob.mode = ProblemSpec::Mode::minimize;
    auto [um, repm] = minimize(prob);
    prob.mode = ProblemSpec::Mode::equation;
    auto [ue, repe] = solve_equation(prob);
    REQUIRE(repm.converged);
    REQUIRE(repe.converged);
    double sup = 0.0;
    for (std::size_t i = 0; i < um.values.size(); ++i)
        sup = std::max(sup, std::abs(um.values[i] - ue.values[i]));
    CHECK(sup <= 10.0 * prob.solver.tol_u);
}

TEST_CASE("equation mode rejects nondifferentiable potentials") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-2.0, 0.0}, {2.0, 0.0}, 1.0 / 8);
    prob.omega = Region::make(Ball(0.0, 1.0));
    prob.u0 = GridFunction::constant(prob.grid, 0.0);
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::chi_positive();
    prob.mode = ProblemSpec::Mode::equation;
    CHECK_THROWS_AS(solve_equation(prob), unsupported_operation_error);
}

TEST_CASE("problem validation") {
    ProblemSpec prob;
    prob.grid = Grid::make(1, {-1.0, 0.0}, {1.0, 0.0}, 1.0 / 8);
    prob.omega = Region::make(Ball(0.0, 1.0)); // no boundary layer
    prob.u0 = GridFunction::constant(prob.grid, 0.0);
    prob.kernel = KernelSpec::standard(1, 0.5, 2.0);
    prob.potential = PotentialSpec::zero();
    CHECK_THROWS_AS(prob.validate(), config_error);
}
