// Serial-vs-OpenMP benchmark for the three hot kernels: the explicit G-heat
// time-stepper, the backward dynamic program, and the Monte Carlo path loop.
// Also asserts that both execution modes give bit-identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>
#include <memory>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "uvclt/control.hpp"
#include "uvclt/gheat.hpp"
#include "uvclt/montecarlo.hpp"

using namespace uvclt;

namespace {

double time_once(const char* label, double serial_value, double serial_seconds,
                 double parallel_value, double parallel_seconds) {
    const bool identical = serial_value == parallel_value;
    std::printf("%-22s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n", label,
                serial_seconds, parallel_seconds, serial_seconds / parallel_seconds,
                identical ? "bit-identical" : "MISMATCH");
    return identical ? 0 : 1;
}

template <class F>
std::pair<double, double> timed(F&& run) {
    const auto start = std::chrono::steady_clock::now();
    const double value = run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {value, seconds};
}

}  // namespace

int main() {
#if defined(_OPENMP)
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; both paths run serially\n");
#endif

    int mismatches = 0;

    {
        const GheatProblem problem{0.8, 1.2, TerminalFunction::cosine()};
        const PdeGrid grid(9.2, 0.01, 0.5);
        SolveOptions serial;
        serial.exec = ExecMode::serial;
        SolveOptions parallel;
        parallel.exec = ExecMode::parallel;
        auto [sv, st] = timed([&] { return solve_gheat(problem, grid, serial).value_at_origin(); });
        auto [pv, pt] =
            timed([&] { return solve_gheat(problem, grid, parallel).value_at_origin(); });
        mismatches += time_once("gheat solve (1.8k)", sv, st, pv, pt);
    }

    {
        // Kernel-scale run: wide enough that the spatial loop clears the
        // parallel grain threshold.
        const int count = 200001;
        const double dx = 1e-4;
        std::vector<double> a(count), b(count);
        for (int i = 0; i < count; ++i) a[i] = std::cos(i * dx);
        const double dt = 0.5 * dx * dx;
        const int steps = 2000;
        auto run = [&](bool parallel) {
            for (int i = 0; i < count; ++i) a[i] = std::cos(i * dx);
            for (int k = 0; k < steps; ++k) {
                if (parallel) {
                    gheat_step(a, b, dt, 1.0 / (dx * dx), 0.8, 1.2,
                               BoundaryMode::dirichlet_terminal);
                } else {
                    gheat_step_serial(a, b, dt, 1.0 / (dx * dx), 0.8, 1.2,
                                      BoundaryMode::dirichlet_terminal);
                }
                std::swap(a, b);
            }
            return a[count / 2];
        };
        auto [sv, st] = timed([&] { return run(false); });
        auto [pv, pt] = timed([&] { return run(true); });
        mismatches += time_once("gheat step (200k)", sv, st, pv, pt);
    }

    {
        ModelSpec spec{NoiseDistribution::rademacher(), VarianceSequence::constant(1.0),
                       UncertaintyBand::constant(0.8, 1.2), 256};
        DpProblem problem{spec, TerminalFunction::cosine(), CandidateRule::lambda_grid, 21,
                          PdeGrid(9.2, 0.005), true, false};
        problem.exec = ExecMode::serial;
        auto [sv, st] = timed([&] { return dp_value(problem).value_at_origin; });
        problem.exec = ExecMode::parallel;
        auto [pv, pt] = timed([&] { return dp_value(problem).value_at_origin; });
        mismatches += time_once("dp backward induction", sv, st, pv, pt);
    }

    {
        ModelSpec spec{NoiseDistribution::rademacher(), VarianceSequence::constant(1.0),
                       UncertaintyBand::constant(0.5, 1.5), 256};
        const auto policy = AdaptedPolicy::constant(1.0, spec.band);
        SimulationConfig config;
        config.paths = 400000;
        config.seed = 7;
        config.exec = ExecMode::serial;
        auto [sv, st] =
            timed([&] { return simulate_value(spec, policy, TerminalFunction::cosine(), config).mean; });
        config.exec = ExecMode::parallel;
        auto [pv, pt] =
            timed([&] { return simulate_value(spec, policy, TerminalFunction::cosine(), config).mean; });
        mismatches += time_once("monte carlo paths", sv, st, pv, pt);
    }

    return mismatches;
}
