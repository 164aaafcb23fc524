#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "uvclt/gheat.hpp"

using namespace uvclt;

TEST_SUITE_BEGIN("gheat");

// ============================================================================
// G and psi
// ============================================================================

TEST_CASE("g_function closed cases and shape") {
    CHECK(g_function(0.0, 0.3, 2.0) == 0.0);
    CHECK(g_function(1.0, 0.0, 2.0) == 2.0);
    CHECK(g_function(-2.0, 1.0, 2.0) == -1.0);
    // Positively homogeneous, monotone, convex on a sample.
    for (double s : {-3.0, -0.5, 0.2, 4.0}) {
        CHECK(g_function(2.0 * s, 0.5, 1.5) == doctest::Approx(2.0 * g_function(s, 0.5, 1.5)));
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (double s = -4.0; s <= 4.0; s += 0.25) {
        const double g = g_function(s, 0.5, 1.5);
        CHECK(g >= prev);
        prev = g;
    }
    const double left = g_function(-1.0, 0.5, 1.5), right = g_function(1.0, 0.5, 1.5);
    CHECK(g_function(0.0, 0.5, 1.5) <= 0.5 * (left + right) + 1e-15);
}

TEST_CASE("psi_epsilon") {
    CHECK(psi_epsilon(0.0, 0.25) == 0.25);
    CHECK(psi_epsilon(10.0, 0.1) == doctest::Approx(std::sqrt(100.01) - 10.0).epsilon(1e-12));
    double prev = 2.0;
    for (double lambda = 0.0; lambda <= 5.0; lambda += 0.5) {
        const double psi = psi_epsilon(lambda, 1.0);
        CHECK(psi > 0.0);
        CHECK(psi <= 1.0);
        CHECK(psi < prev);
        prev = psi;
    }
}

TEST_CASE("gaussian_expectation") {
    CHECK(gaussian_expectation(TerminalFunction::constant(3.25), 2.0) ==
          doctest::Approx(3.25).epsilon(1e-13));
    CHECK(gaussian_expectation(TerminalFunction::cosine(), 0.0) == 1.0);
    const double expected = std::exp(-0.5);
    CHECK(gaussian_expectation(TerminalFunction::cosine(), 1.0, 40) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(gaussian_expectation(TerminalFunction::cosine(), 1.0, 96) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_expectation(TerminalFunction::cosine(), -1.0),
                    std::invalid_argument);
}

// ============================================================================
// Grid and time stepping
// ============================================================================

TEST_CASE("grid snaps symmetric about zero and respects CFL") {
    const PdeGrid grid(4.0, 0.25);
    CHECK(grid.node_count() % 2 == 1);
    CHECK(grid.node(grid.origin_index()) == 0.0);
    CHECK(grid.node(0) == -grid.node(grid.node_count() - 1));

    const auto ts = grid.time_stepping(1.5);
    CHECK(ts.steps * ts.dt == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ts.dt * 1.5 * 1.5 / (0.25 * 0.25) <= 1.0 + 1e-12);

    const auto degenerate = grid.time_stepping(0.0);
    CHECK(degenerate.steps == 1);
    CHECK(degenerate.dt == 1.0);

    CHECK_THROWS_AS(PdeGrid(4.0, 0.25, 1.5), ConfigError);
    CHECK_THROWS_AS(PdeGrid(-1.0, 0.25), ConfigError);
}

// ============================================================================
// Solver basics
// ============================================================================

TEST_CASE("constants solve the equation exactly") {
    const GheatProblem problem{0.4, 1.3, TerminalFunction::constant(0.75)};
    const auto solution = solve_gheat(problem, PdeGrid(3.0, 0.1));
    for (double t : {0.0, 0.3, 1.0}) {
        for (double x : {-2.0, 0.0, 1.7}) {
            CHECK(solution.value(t, x) == 0.75);
        }
    }
}

TEST_CASE("classical heat case reproduces E cos(Z)") {
    const GheatProblem problem{1.0, 1.0, TerminalFunction::cosine()};
    const auto solution = solve_gheat(problem, PdeGrid(8.0, 0.02, 0.5));
    CHECK(solution.value_at_origin() == doctest::Approx(std::exp(-0.5)).epsilon(2e-4));
}

TEST_CASE("degenerate band reduces to the terminal data exactly") {
    const GheatProblem problem{0.0, 0.0, TerminalFunction::cosine()};
    const PdeGrid grid(3.0, 0.1);
    const auto solution = solve_gheat(problem, grid);
    for (int i = 0; i < grid.node_count(); ++i) {
        CHECK(solution.value(0.0, grid.node(i)) == problem.terminal(grid.node(i)));
    }
}

TEST_CASE("terminal slice holds f at grid nodes exactly") {
    const GheatProblem problem{0.5, 1.0, TerminalFunction::gaussian_bump()};
    const PdeGrid grid(4.0, 0.05);
    const auto solution = solve_gheat(problem, grid);
    for (int i = 0; i < grid.node_count(); i += 7) {
        CHECK(solution.value(1.0, grid.node(i)) == problem.terminal(grid.node(i)));
    }
}

TEST_CASE("maximum principle on the stored field") {
    const GheatProblem problem{0.3, 1.4, TerminalFunction::cosine()};
    const PdeGrid grid(5.0, 0.05);
    const auto solution = solve_gheat(problem, grid);
    for (double t : {0.0, 0.25, 0.6, 1.0}) {
        const auto slice = solution.slice_at_or_after(t);
        for (double v : slice) {
            CHECK(v >= -1.0 - 1e-9);
            CHECK(v <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    const GheatProblem problem{0.6, 1.2, TerminalFunction::cosine()};
    const PdeGrid grid(4.0, 0.05);
    SolveOptions serial;
    serial.exec = ExecMode::serial;
    SolveOptions parallel;
    parallel.exec = ExecMode::parallel;
    const auto a = solve_gheat(problem, grid, serial);
    const auto b = solve_gheat(problem, grid, parallel);
    const auto sa = a.slice_at_or_after(0.0);
    const auto sb = b.slice_at_or_after(0.0);
    for (int i = 0; i < grid.node_count(); ++i) CHECK(sa[i] == sb[i]);
}

TEST_CASE("non-finite terminal data is reported with the offending node") {
    const auto bad = TerminalFunction::custom(
        "bad", [](double x) { return x > 2.9 ? std::numeric_limits<double>::infinity() : 0.0; },
        1.0, std::nullopt, true);
    const GheatProblem problem{0.5, 1.0, bad};
    CHECK_THROWS_AS(solve_gheat(problem, PdeGrid(3.0, 0.1)), NumericalError);
}

// ============================================================================
// Scheme properties
// ============================================================================

TEST_CASE("one-step monotonicity on random slices") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int count = 8 + static_cast<int>(unit(rng) * 40);
        const double dx = 0.02 + 0.2 * unit(rng);
        const double lo = unit(rng);
        const double hi = lo + unit(rng);
        const double theta = 0.1 + 0.9 * unit(rng);
        const double dt = theta * dx * dx / (hi * hi);
        std::vector<double> u(count), w(count), su(count), sw(count);
        for (int i = 0; i < count; ++i) {
            u[i] = 2.0 * unit(rng) - 1.0;
            w[i] = u[i] + unit(rng);  // componentwise dominating slice
        }
        // The default boundary mode is the monotone one; the extrapolating
        // boundary row carries a negative stencil weight and is excluded.
        gheat_step_serial(u, su, dt, 1.0 / (dx * dx), lo, hi, BoundaryMode::dirichlet_terminal);
        gheat_step_serial(w, sw, dt, 1.0 / (dx * dx), lo, hi, BoundaryMode::dirichlet_terminal);
        for (int i = 0; i < count; ++i) CHECK(su[i] <= sw[i] + 1e-12);
    }
}

TEST_CASE("comparison: dominated terminal data stays dominated") {
    const auto f = TerminalFunction::custom(
        "bump_scaled", [](double x) { return 0.7 * std::exp(-x * x); }, 0.7, std::nullopt, true);
    const GheatProblem small{0.5, 1.2, f};
    const GheatProblem large{0.5, 1.2, TerminalFunction::gaussian_bump()};
    const PdeGrid grid(5.0, 0.05);
    const auto a = solve_gheat(small, grid);
    const auto b = solve_gheat(large, grid);
    for (int i = 0; i < grid.node_count(); ++i) {
        CHECK(a.value(0.0, grid.node(i)) <= b.value(0.0, grid.node(i)) + 1e-12);
    }
}

TEST_CASE("positive homogeneity at scheme level") {
    const PdeGrid grid(5.0, 0.05);
    const GheatProblem base{0.5, 1.2, TerminalFunction::cosine()};
    const auto base_solution = solve_gheat(base, grid);

    // Power-of-two scaling commutes with the arithmetic exactly.
    const GheatProblem doubled{0.5, 1.2,
                               TerminalFunction::custom(
                                   "2cos", [](double x) { return 2.0 * std::cos(x); }, 2.0,
                                   std::nullopt, true)};
    const auto doubled_solution = solve_gheat(doubled, grid);
    for (int i = 0; i < grid.node_count(); i += 3) {
        CHECK(doubled_solution.value(0.0, grid.node(i)) ==
              2.0 * base_solution.value(0.0, grid.node(i)));
    }

    const double c = 1.7;
    const GheatProblem scaled{0.5, 1.2,
                              TerminalFunction::custom(
                                  "1.7cos", [c](double x) { return c * std::cos(x); }, c,
                                  std::nullopt, true)};
    const auto scaled_solution = solve_gheat(scaled, grid);
    for (int i = 0; i < grid.node_count(); i += 3) {
        CHECK(scaled_solution.value(0.0, grid.node(i)) ==
              doctest::Approx(c * base_solution.value(0.0, grid.node(i))).epsilon(1e-12));
    }
}

TEST_CASE("sublinearity at scheme level") {
    const PdeGrid grid(5.0, 0.05);
    const auto sum_fn = TerminalFunction::custom(
        "cos_plus_bump", [](double x) { return std::cos(x) + std::exp(-x * x); }, 2.0,
        std::nullopt, true);
    const double lo = 0.4, hi = 1.3;
    const double v_sum = solve_gheat({lo, hi, sum_fn}, grid).value_at_origin();
    const double v_f = solve_gheat({lo, hi, TerminalFunction::cosine()}, grid).value_at_origin();
    const double v_g =
        solve_gheat({lo, hi, TerminalFunction::gaussian_bump()}, grid).value_at_origin();
    CHECK(v_sum <= v_f + v_g + 1e-12);
}

TEST_CASE("band enlargement never decreases the origin value") {
    const PdeGrid grid(5.0, 0.05);
    SolveOptions matched;
    matched.cfl_lambda_hi = 1.4;  // both bands march on the wide band's dt
    const double narrow =
        solve_gheat({0.9, 1.1, TerminalFunction::cosine()}, grid, matched).value_at_origin();
    const double wide =
        solve_gheat({0.7, 1.4, TerminalFunction::cosine()}, grid, matched).value_at_origin();
    CHECK(wide >= narrow - 1e-12);
}

TEST_CASE("grid refinement shrinks the classical error") {
    const GheatProblem problem{1.0, 1.0, TerminalFunction::cosine()};
    const double expected = std::exp(-0.5);
    double previous_error = std::numeric_limits<double>::infinity();
    for (double dx : {0.08, 0.04, 0.02}) {
        const double error =
            std::abs(solve_gheat(problem, PdeGrid(8.0, dx, 0.5)).value_at_origin() - expected);
        CHECK(error < previous_error / 1.5);
        previous_error = error;
    }
}

// ============================================================================
// Vanishing viscosity
// ============================================================================

TEST_CASE("epsilon zero delegates unchanged") {
    const GheatProblem problem{0.8, 1.2, TerminalFunction::cosine()};
    const PdeGrid grid(4.0, 0.05);
    CHECK(vanishing_viscosity_solve(problem, 0.0, grid).value_at_origin() ==
          solve_gheat(problem, grid).value_at_origin());
}

TEST_CASE("viscosity sweep shrinks toward the degenerate solve") {
    const GheatProblem problem{0.0, 1.0, TerminalFunction::cosine()};
    const PdeGrid grid(8.0, 0.02, 0.5);
    const double v0 = solve_gheat(problem, grid).value_at_origin();
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {0.4, 0.2, 0.1, 0.05}) {
        const auto solution = vanishing_viscosity_solve(problem, eps, grid);
        CHECK(solution.epsilon() == eps);
        CHECK(solution.value_at_origin() >= -1.0 - 1e-9);
        CHECK(solution.value_at_origin() <= 1.0 + 1e-9);
        const double diff = std::abs(solution.value_at_origin() - v0);
        CHECK(diff < previous);
        previous = diff;
    }
    CHECK(previous > 0.0);
}

// ============================================================================
// Solution accessors
// ============================================================================

TEST_CASE("slice selection is nearest-at-or-after") {
    const GheatProblem problem{0.5, 1.0, TerminalFunction::cosine()};
    SolveOptions options;
    options.store_times = {0.5};
    const auto solution = solve_gheat(problem, PdeGrid(3.0, 0.1), options);
    REQUIRE(solution.stored_times().size() == 3);
    const double mid_time = solution.stored_times()[1];
    CHECK(mid_time >= 0.5);
    CHECK(mid_time <= 0.5 + solution.stepping().dt + 1e-12);
    // Queries between 0 and the stored middle time resolve to the middle slice.
    CHECK(solution.value(0.2, 0.3) == solution.value(mid_time, 0.3));
    CHECK(solution.value(0.0, 0.3) != solution.value(mid_time, 0.3));
}

TEST_CASE("second difference: central interior, zero at boundary columns") {
    const GheatProblem problem{0.0, 0.0, TerminalFunction::square()};
    const PdeGrid grid(2.0, 0.1);
    const auto solution = solve_gheat(problem, grid);  // field equals x^2 at all times
    CHECK(solution.second_difference(0.5, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(solution.second_difference(0.5, 0.731) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(solution.second_difference(0.5, grid.node(0)) == 0.0);
    bool outside = false;
    CHECK(solution.second_difference(0.5, 5.0, &outside) == 0.0);
    CHECK(outside);
}

TEST_CASE("csv dump shape") {
    const GheatProblem problem{0.5, 1.0, TerminalFunction::cosine()};
    const auto solution = solve_gheat(problem, PdeGrid(1.0, 0.5));
    std::ostringstream out;
    solution.dump_csv(out, false);
    const std::string text = out.str();
    CHECK(text.rfind("t,x,v\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 5);  // header + five nodes
}

TEST_SUITE_END();
