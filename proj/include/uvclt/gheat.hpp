#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "uvclt/grid.hpp"
#include "uvclt/model.hpp"

namespace uvclt {

/// Terminal-value problem v_t + G(v_xx) = 0 on [0,1] x R, v(1,.) = f, with
/// G(s) = (upper^2 s+ - lower^2 s-) / 2.
struct GheatProblem {
    double lambda_lo = 0.0;
    double lambda_hi = 1.0;
    TerminalFunction terminal = TerminalFunction::cosine();

    void validate() const;  // 0 <= lambda_lo <= lambda_hi
};

double g_function(double s, double lambda_lo, double lambda_hi);

/// sqrt(lambda^2 + eps^2) - lambda; in (0, eps] for lambda >= 0.
double psi_epsilon(double lambda, double epsilon);

struct SolveOptions {
    /// Extra times at which to retain slices (t = 0 and t = 1 always kept).
    std::vector<double> store_times;
    bool store_all = false;
    ExecMode exec = ExecMode::parallel;
    /// Derive the time step as if the upper multiplier were this value (used
    /// to run two bands on one time grid); ignored when below the problem's.
    double cfl_lambda_hi = 0.0;
};

/// Grid values of the solved field with interpolating accessors. Slice
/// selection in time is nearest-stored-slice-at-or-after t; interpolation in
/// x is linear. Immutable after construction.
class PdeSolution {
public:
    PdeSolution(GheatProblem problem, PdeGrid grid, double epsilon,
                std::vector<double> times, std::vector<std::vector<double>> slices,
                PdeGrid::TimeStepping stepping);

    double value(double t, double x) const;
    double value_at_origin() const;
    /// Central second difference of the stored slice, linearly interpolated
    /// in x; 0 at the boundary columns. Sets *left_grid on queries outside
    /// the grid (which evaluate to 0).
    double second_difference(double t, double x, bool* left_grid = nullptr) const;

    const PdeGrid& grid() const { return grid_; }
    const GheatProblem& problem() const { return problem_; }
    double epsilon() const { return epsilon_; }
    const std::vector<double>& stored_times() const { return times_; }
    std::span<const double> slice_at_or_after(double t) const;
    PdeGrid::TimeStepping stepping() const { return stepping_; }

    /// CSV dump, columns t,x,v: the t = 0 slice, or every stored slice.
    void dump_csv(std::ostream& os, bool full_field) const;

private:
    int slice_index(double t) const;

    GheatProblem problem_;
    PdeGrid grid_;
    double epsilon_;
    std::vector<double> times_;                 // ascending
    std::vector<std::vector<double>> slices_;   // aligned with times_
    PdeGrid::TimeStepping stepping_;
};

/// One explicit backward step: out = in + dt G(D2 in). OpenMP kernel and the
/// serial reference; both produce bit-identical slices.
void gheat_step(std::span<const double> in, std::span<double> out, double dt,
                double inv_dx2, double lambda_lo, double lambda_hi, BoundaryMode boundary);
void gheat_step_serial(std::span<const double> in, std::span<double> out, double dt,
                       double inv_dx2, double lambda_lo, double lambda_hi,
                       BoundaryMode boundary);

/// Monotone explicit solve, backward from t = 1 to t = 0.
PdeSolution solve_gheat(const GheatProblem& problem, const PdeGrid& grid,
                        const SolveOptions& options = {});

/// Regularized solve: multipliers mapped through lambda -> sqrt(lambda^2 +
/// eps^2), so the band becomes [sqrt(lo^2+eps^2), sqrt(hi^2+eps^2)] and the
/// time step is re-derived for the enlarged upper bound. eps = 0 delegates
/// unchanged.
PdeSolution vanishing_viscosity_solve(const GheatProblem& problem, double epsilon,
                                      const PdeGrid& grid, const SolveOptions& options = {});

/// E f(sqrt(variance) Z), Z standard normal, by fixed Gauss-Hermite
/// quadrature. Deterministic for a given node count.
double gaussian_expectation(const TerminalFunction& f, double variance,
                            int node_count = 64);

}  // namespace uvclt
