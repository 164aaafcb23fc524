#include "uvclt/grid.hpp"

#include <cmath>

namespace uvclt {

PdeGrid::PdeGrid(double half_width, double dx, double theta, BoundaryMode boundary)
    : dx_(dx), theta_(theta), boundary_(boundary) {
    if (!(half_width > 0.0)) throw ConfigError("grid: half_width must be positive");
    if (!(dx > 0.0)) throw ConfigError("grid: dx must be positive");
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw ConfigError("grid: CFL fraction theta must lie in (0, 1]");
    }
    half_nodes_ = static_cast<int>(std::ceil(half_width / dx - 1e-9));
    if (half_nodes_ < 1) half_nodes_ = 1;
}

PdeGrid::TimeStepping PdeGrid::time_stepping(double lambda_hi) const {
    TimeStepping ts;
    if (lambda_hi <= 0.0) {
        ts.dt = 1.0;
        ts.steps = 1;
        return ts;
    }
    const double dt_raw = theta_ * dx_ * dx_ / (lambda_hi * lambda_hi);
    ts.steps = dt_raw >= 1.0 ? 1 : static_cast<int>(std::ceil(1.0 / dt_raw - 1e-9));
    ts.dt = 1.0 / ts.steps;
    if (ts.dt * lambda_hi * lambda_hi / (dx_ * dx_) > 1.0 + 1e-12) {
        throw ConfigError("grid: CFL condition dt lambda^2 / dx^2 <= 1 violated");
    }
    return ts;
}

double interp_linear(const PdeGrid& grid, std::span<const double> values, double x,
                     bool* left_grid) {
    const int last = grid.node_count() - 1;
    const double u = x / grid.dx() + grid.half_nodes();
    // Queries within rounding distance of a node return the node value, so
    // exact node hits stay exact.
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-9 && nearest >= 0.0 && nearest <= last) {
        return values[static_cast<int>(nearest)];
    }
    if (u <= 0.0) {
        if (left_grid != nullptr) *left_grid = true;
        return values[0] + u * (values[1] - values[0]);
    }
    if (u >= static_cast<double>(last)) {
        if (left_grid != nullptr) *left_grid = true;
        return values[last] + (u - last) * (values[last] - values[last - 1]);
    }
    const int i = static_cast<int>(u);
    const double w = u - i;
    return values[i] + w * (values[i + 1] - values[i]);
}

}  // namespace uvclt
