#pragma once

#include <span>

#include "uvclt/errors.hpp"

namespace uvclt {

enum class BoundaryMode { dirichlet_terminal, linear_extrapolation };

/// Runtime switch between the OpenMP kernels and their serial reference
/// implementations. Both must produce bit-identical results.
enum class ExecMode { serial, parallel };

/// Uniform spatial grid on [-X, X], symmetric about 0 and containing 0
/// exactly. Also derives the explicit time step from the CFL fraction.
class PdeGrid {
public:
    PdeGrid(double half_width, double dx, double theta = 0.5,
            BoundaryMode boundary = BoundaryMode::dirichlet_terminal);

    int half_nodes() const { return half_nodes_; }
    int node_count() const { return 2 * half_nodes_ + 1; }
    int origin_index() const { return half_nodes_; }
    double node(int i) const { return (i - half_nodes_) * dx_; }
    double dx() const { return dx_; }
    double theta() const { return theta_; }
    double half_width() const { return half_nodes_ * dx_; }
    BoundaryMode boundary() const { return boundary_; }

    struct TimeStepping {
        double dt = 1.0;
        int steps = 1;
    };
    /// dt = theta dx^2 / lambda_hi^2, shrunk so steps * dt == 1 with integer
    /// steps. Monotonicity requires dt lambda_hi^2 / dx^2 <= 1.
    TimeStepping time_stepping(double lambda_hi) const;

private:
    int half_nodes_;
    double dx_;
    double theta_;
    BoundaryMode boundary_;
};

/// Linear interpolation of a grid slice at x, with linear extrapolation from
/// the outermost node pair when x leaves the grid. Sets *left_grid when a
/// query extrapolates; never throws.
double interp_linear(const PdeGrid& grid, std::span<const double> values, double x,
                     bool* left_grid);

}  // namespace uvclt
