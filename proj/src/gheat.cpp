#include "uvclt/gheat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "uvclt/quadrature.hpp"
#include "uvclt/report.hpp"

namespace uvclt {

void GheatProblem::validate() const {
    if (!(lambda_lo >= 0.0 && lambda_hi >= lambda_lo)) {
        throw std::invalid_argument("gheat: needs 0 <= lambda_lo <= lambda_hi");
    }
}

double g_function(double s, double lambda_lo, double lambda_hi) {
    return s > 0.0 ? 0.5 * lambda_hi * lambda_hi * s : 0.5 * lambda_lo * lambda_lo * s;
}

double psi_epsilon(double lambda, double epsilon) {
    return std::sqrt(lambda * lambda + epsilon * epsilon) - lambda;
}

// ============================================================================
// Step kernels
// ============================================================================

namespace {

inline double step_node(std::span<const double> in, int i, double dt, double inv_dx2,
                        double half_lo2, double half_hi2) {
    const double second = (in[i + 1] - 2.0 * in[i] + in[i - 1]) * inv_dx2;
    const double g = second > 0.0 ? half_hi2 * second : half_lo2 * second;
    return in[i] + dt * g;
}

inline void step_boundaries(std::span<const double> in, std::span<double> out,
                            BoundaryMode boundary) {
    const int last = static_cast<int>(in.size()) - 1;
    if (boundary == BoundaryMode::dirichlet_terminal) {
        out[0] = in[0];
        out[last] = in[last];
    } else {
        out[0] = 2.0 * out[1] - out[2];
        out[last] = 2.0 * out[last - 1] - out[last - 2];
    }
}

// First non-finite node index, or -1. Serial scan keeps "first" well defined.
int first_non_finite(std::span<const double> v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        if (!std::isfinite(v[i])) return i;
    }
    return -1;
}

PdeSolution solve_tagged(const GheatProblem& problem, const PdeGrid& grid,
                         const SolveOptions& options, double epsilon_tag) {
    problem.validate();
    if (grid.node_count() < 3) throw ConfigError("gheat: grid needs at least 3 nodes");
    const auto ts = grid.time_stepping(std::max(problem.lambda_hi, options.cfl_lambda_hi));

    const int n = grid.node_count();
    std::vector<double> current(n), next(n);
    for (int i = 0; i < n; ++i) current[i] = problem.terminal(grid.node(i));
    if (int bad = first_non_finite(current); bad >= 0) {
        throw NumericalError("gheat: terminal data non-finite at node " + std::to_string(bad));
    }

    // Slice k lives at time (steps - k) * dt; the final slice is exactly 0.
    // A requested time tau maps to the smallest slice time >= tau.
    std::vector<bool> keep(ts.steps + 1, options.store_all);
    keep[0] = true;
    keep[ts.steps] = true;
    for (double tau : options.store_times) {
        if (tau < 0.0 || tau > 1.0) continue;
        int k = static_cast<int>(std::floor((1.0 - tau) / ts.dt + 1e-9));
        keep[std::clamp(k, 0, ts.steps)] = true;
    }

    std::vector<double> times;
    std::vector<std::vector<double>> slices;
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());

    if (keep[0]) {
        times.push_back(static_cast<double>(ts.steps) * ts.dt);
        slices.push_back(current);
    }
    for (int k = 1; k <= ts.steps; ++k) {
        if (options.exec == ExecMode::parallel) {
            gheat_step(current, next, ts.dt, inv_dx2, problem.lambda_lo, problem.lambda_hi,
                       grid.boundary());
        } else {
            gheat_step_serial(current, next, ts.dt, inv_dx2, problem.lambda_lo,
                              problem.lambda_hi, grid.boundary());
        }
        if (int bad = first_non_finite(next); bad >= 0) {
            char msg[96];
            std::snprintf(msg, sizeof(msg), "gheat: non-finite value at node %d, time %.9g", bad,
                          (ts.steps - k) * ts.dt);
            throw NumericalError(msg);
        }
        std::swap(current, next);
        if (keep[k]) {
            times.push_back(static_cast<double>(ts.steps - k) * ts.dt);
            slices.push_back(current);
        }
    }

    std::reverse(times.begin(), times.end());
    std::reverse(slices.begin(), slices.end());
    return PdeSolution(problem, grid, epsilon_tag, std::move(times), std::move(slices), ts);
}

}  // namespace

void gheat_step(std::span<const double> in, std::span<double> out, double dt, double inv_dx2,
                double lambda_lo, double lambda_hi, BoundaryMode boundary) {
    const double half_lo2 = 0.5 * lambda_lo * lambda_lo;
    const double half_hi2 = 0.5 * lambda_hi * lambda_hi;
    const int last = static_cast<int>(in.size()) - 1;
    // The update is a handful of flops per node; below this size the fork/join
    // overhead per time step dwarfs the work.
    constexpr int kParallelGrainNodes = 32768;
    if (last >= kParallelGrainNodes) {
#pragma omp parallel for schedule(static)
        for (int i = 1; i < last; ++i) {
            out[i] = step_node(in, i, dt, inv_dx2, half_lo2, half_hi2);
        }
    } else {
        for (int i = 1; i < last; ++i) {
            out[i] = step_node(in, i, dt, inv_dx2, half_lo2, half_hi2);
        }
    }
    step_boundaries(in, out, boundary);
}

void gheat_step_serial(std::span<const double> in, std::span<double> out, double dt,
                       double inv_dx2, double lambda_lo, double lambda_hi,
                       BoundaryMode boundary) {
    const double half_lo2 = 0.5 * lambda_lo * lambda_lo;
    const double half_hi2 = 0.5 * lambda_hi * lambda_hi;
    const int last = static_cast<int>(in.size()) - 1;
    for (int i = 1; i < last; ++i) {
        out[i] = step_node(in, i, dt, inv_dx2, half_lo2, half_hi2);
    }
    step_boundaries(in, out, boundary);
}

PdeSolution solve_gheat(const GheatProblem& problem, const PdeGrid& grid,
                        const SolveOptions& options) {
    return solve_tagged(problem, grid, options, 0.0);
}

PdeSolution vanishing_viscosity_solve(const GheatProblem& problem, double epsilon,
                                      const PdeGrid& grid, const SolveOptions& options) {
    problem.validate();
    if (epsilon < 0.0) throw std::invalid_argument("gheat: epsilon must be >= 0");
    if (epsilon == 0.0) return solve_gheat(problem, grid, options);
    GheatProblem regularized = problem;
    regularized.lambda_lo = std::sqrt(problem.lambda_lo * problem.lambda_lo + epsilon * epsilon);
    regularized.lambda_hi = std::sqrt(problem.lambda_hi * problem.lambda_hi + epsilon * epsilon);
    return solve_tagged(regularized, grid, options, epsilon);
}

// ============================================================================
// PdeSolution
// ============================================================================

PdeSolution::PdeSolution(GheatProblem problem, PdeGrid grid, double epsilon,
                         std::vector<double> times, std::vector<std::vector<double>> slices,
                         PdeGrid::TimeStepping stepping)
    : problem_(std::move(problem)),
      grid_(grid),
      epsilon_(epsilon),
      times_(std::move(times)),
      slices_(std::move(slices)),
      stepping_(stepping) {}

int PdeSolution::slice_index(double t) const {
    // Smallest stored time >= t (within tolerance); clamps at the ends.
    int lo = 0, hi = static_cast<int>(times_.size()) - 1;
    if (t <= times_.front() + 1e-9) return 0;
    if (t > times_.back() + 1e-9) return hi;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (times_[mid] >= t - 1e-9) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

std::span<const double> PdeSolution::slice_at_or_after(double t) const {
    return slices_[slice_index(t)];
}

double PdeSolution::value(double t, double x) const {
    return interp_linear(grid_, slices_[slice_index(t)], x, nullptr);
}

double PdeSolution::value_at_origin() const {
    return slices_[slice_index(0.0)][grid_.origin_index()];
}

double PdeSolution::second_difference(double t, double x, bool* left_grid) const {
    const auto& slice = slices_[slice_index(t)];
    const int last = grid_.node_count() - 1;
    const double inv_dx2 = 1.0 / (grid_.dx() * grid_.dx());
    const auto nodal = [&](int i) -> double {
        if (i <= 0 || i >= last) return 0.0;  // boundary columns
        return (slice[i + 1] - 2.0 * slice[i] + slice[i - 1]) * inv_dx2;
    };
    const double u = x / grid_.dx() + grid_.half_nodes();
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-9 && nearest >= 0.0 && nearest <= last) {
        return nodal(static_cast<int>(nearest));
    }
    if (u <= 0.0 || u >= static_cast<double>(last)) {
        if (left_grid != nullptr) *left_grid = true;
        return 0.0;
    }
    const int i = static_cast<int>(u);
    const double w = u - i;
    return nodal(i) + w * (nodal(i + 1) - nodal(i));
}

void PdeSolution::dump_csv(std::ostream& os, bool full_field) const {
    os << "t,x,v\n";
    const auto dump_slice = [&](std::size_t k) {
        for (int i = 0; i < grid_.node_count(); ++i) {
            os << format_double(times_[k]) << ',' << format_double(grid_.node(i)) << ','
               << format_double(slices_[k][i]) << '\n';
        }
    };
    if (full_field) {
        for (std::size_t k = 0; k < times_.size(); ++k) dump_slice(k);
    } else {
        dump_slice(static_cast<std::size_t>(slice_index(0.0)));
    }
}

// ============================================================================
// Gaussian expectation oracle
// ============================================================================

double gaussian_expectation(const TerminalFunction& f, double variance, int node_count) {
    if (variance < 0.0) throw std::invalid_argument("gaussian_expectation: variance must be >= 0");
    if (variance == 0.0) return f(0.0);
    const QuadratureRule rule = gauss_hermite(node_count);
    const double scale = std::sqrt(2.0 * variance);
    double acc = 0.0, mass = 0.0;
    for (int i = 0; i < node_count; ++i) {
        acc += rule.weights[i] * f(scale * rule.nodes[i]);
        mass += rule.weights[i];
    }
    return acc / mass;
}

}  // namespace uvclt
