#include "uvclt/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "uvclt/report.hpp"

namespace uvclt {

// ============================================================================
// Problem setup
// ============================================================================

void DpProblem::validate() const {
    spec.validate();
    if (rule == CandidateRule::lambda_grid && candidate_count < 2) {
        throw std::invalid_argument("dp: lambda_grid needs at least 2 candidates");
    }
}

std::vector<double> DpProblem::candidates(int j) const {
    const double lo = spec.band.lower(j);
    const double hi = spec.band.upper(j);
    if (lo == hi) return {hi};
    if (rule == CandidateRule::endpoints_only) return {lo, hi};
    std::vector<double> cands(candidate_count);
    for (int i = 0; i < candidate_count; ++i) {
        // Endpoints exact; interior points by linear blend.
        if (i == 0) {
            cands[i] = lo;
        } else if (i == candidate_count - 1) {
            cands[i] = hi;
        } else {
            cands[i] = lo + (hi - lo) * (static_cast<double>(i) / (candidate_count - 1));
        }
    }
    return cands;
}

std::vector<double> time_grid(const ModelSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("time_grid: n must be >= 1");
    if (n > spec.variances.max_horizon()) {
        throw std::invalid_argument("time_grid: n beyond available horizon");
    }
    const double s2 = spec.variances.cumulative_s2(n);
    std::vector<double> t(n + 1);
    t[0] = 0.0;  // sigma_0 = 0
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double sj = spec.variances.sigma(j);
        acc += sj * sj;
        t[j] = acc / s2;
    }
    t[n] = 1.0;  // absorb rounding
    return t;
}

// ============================================================================
// Backward step kernels
// ============================================================================

namespace {

// Worst-case one-step value at a single node; candidates ascending, ties in
// the max break toward the larger multiplier via >=.
inline void dp_node(std::span<const double> next_values, const PdeGrid& grid, double x,
                    std::span<const double> candidates, double step_scale,
                    std::span<const NoiseAtom> atoms, bool* left_grid, double& out_value,
                    double& out_lambda) {
    double best = -std::numeric_limits<double>::infinity();
    double best_lambda = candidates[0];
    for (double lambda : candidates) {
        double acc = 0.0;
        for (const auto& atom : atoms) {
            acc += atom.probability *
                   interp_linear(grid, next_values, x + lambda * step_scale * atom.value, left_grid);
        }
        if (acc >= best) {
            best = acc;
            best_lambda = lambda;
        }
    }
    out_value = best;
    out_lambda = best_lambda;
}

}  // namespace

void dp_backward_step(std::span<const double> next_values, std::span<double> out_values,
                      std::span<double> out_argmax, const PdeGrid& grid,
                      std::span<const double> candidates, double step_scale,
                      std::span<const NoiseAtom> atoms, bool* left_grid) {
    const int count = grid.node_count();
    int any_left = 0;
#pragma omp parallel for schedule(static) reduction(| : any_left)
    for (int i = 0; i < count; ++i) {
        bool left = false;
        dp_node(next_values, grid, grid.node(i), candidates, step_scale, atoms, &left,
                out_values[i], out_argmax[i]);
        any_left |= left ? 1 : 0;
    }
    if (any_left != 0) *left_grid = true;
}

void dp_backward_step_serial(std::span<const double> next_values, std::span<double> out_values,
                             std::span<double> out_argmax, const PdeGrid& grid,
                             std::span<const double> candidates, double step_scale,
                             std::span<const NoiseAtom> atoms, bool* left_grid) {
    const int count = grid.node_count();
    for (int i = 0; i < count; ++i) {
        dp_node(next_values, grid, grid.node(i), candidates, step_scale, atoms, left_grid,
                out_values[i], out_argmax[i]);
    }
}

// ============================================================================
// Grid dynamic program
// ============================================================================

DpResult dp_value(const DpProblem& problem) {
    problem.validate();
    const int n = problem.spec.horizon;
    const PdeGrid& grid = problem.grid;
    const int count = grid.node_count();
    const double s_n = std::sqrt(problem.spec.variances.cumulative_s2(n));
    const auto atoms = problem.spec.noise.atoms();

    // Farthest state reachable from the origin; when its dependency cone
    // (one interpolation cell wider) leaves the grid, the reported value
    // rests on extrapolated queries.
    double reach = 0.0;
    for (int j = 0; j < n; ++j) {
        reach += problem.spec.band.upper(j) * problem.spec.variances.sigma(j + 1) *
                 problem.spec.noise.max_abs_atom() / s_n;
    }
    const bool reach_left_grid = reach + grid.dx() > grid.half_width();
    if (reach_left_grid && !problem.allow_edge_extrapolation) {
        throw ConfigError("dp: reachable states leave the grid and extrapolation is disabled");
    }

    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> argmax;
    if (problem.keep_slices) {
        values.assign(n + 1, {});
        argmax.assign(n, {});
    }

    std::vector<double> current(count), next_slice(count), lambda_row(count);
    for (int i = 0; i < count; ++i) current[i] = problem.terminal(grid.node(i));
    if (problem.keep_slices) values[n] = current;

    bool kernel_left_grid = false;  // boundary nodes always peek outside
    for (int j = n - 1; j >= 0; --j) {
        const auto cands = problem.candidates(j);
        if (cands.empty()) throw std::invalid_argument("dp: empty candidate set");
        const double step_scale = problem.spec.variances.sigma(j + 1) / s_n;
        if (problem.exec == ExecMode::parallel) {
            dp_backward_step(current, next_slice, lambda_row, grid, cands, step_scale, atoms,
                             &kernel_left_grid);
        } else {
            dp_backward_step_serial(current, next_slice, lambda_row, grid, cands, step_scale,
                                    atoms, &kernel_left_grid);
        }
        std::swap(current, next_slice);
        if (problem.keep_slices) {
            values[j] = current;
            argmax[j] = lambda_row;
        }
    }

    DpResult result;
    result.value_at_origin = current[grid.origin_index()];
    result.edge_extrapolated = reach_left_grid;
    if (problem.keep_slices) {
        result.slices = std::make_shared<ValueSlices>(grid, time_grid(problem.spec, n),
                                                      std::move(values), std::move(argmax),
                                                      reach_left_grid);
    }
    return result;
}

// ============================================================================
// Exact oracles
// ============================================================================

namespace {

double powi_checked(std::uint64_t base, int exp, std::uint64_t limit) {
    double acc = 1.0;
    for (int i = 0; i < exp; ++i) {
        acc *= static_cast<double>(base);
        if (acc > static_cast<double>(limit)) return acc;
    }
    return acc;
}

double tree_node_value(const DpProblem& problem, int j, double x, double s_n) {
    if (j == problem.spec.horizon) return problem.terminal(x);
    const double step_scale = problem.spec.variances.sigma(j + 1) / s_n;
    double best = -std::numeric_limits<double>::infinity();
    for (double lambda : problem.candidates(j)) {
        double acc = 0.0;
        for (const auto& atom : problem.spec.noise.atoms()) {
            acc += atom.probability *
                   tree_node_value(problem, j + 1, x + lambda * step_scale * atom.value, s_n);
        }
        best = std::max(best, acc);
    }
    return best;
}

}  // namespace

double tree_dp_value(const DpProblem& problem, std::uint64_t state_budget) {
    problem.validate();
    const int n = problem.spec.horizon;
    const std::uint64_t m = problem.spec.noise.atom_count();
    if (powi_checked(m, n, state_budget) > static_cast<double>(state_budget)) {
        throw ResourceLimitError("tree_dp: reachable-state count exceeds budget");
    }
    const double s_n = std::sqrt(problem.spec.variances.cumulative_s2(n));
    return tree_node_value(problem, 0, 0.0, s_n);
}

namespace {

// History nodes are outcome prefixes, laid out breadth-first: depth j holds
// m^j nodes starting at offset (m^j - 1) / (m - 1).
struct HistoryTree {
    int horizon = 0;
    std::uint64_t atom_count = 0;
    std::vector<std::uint64_t> depth_offset;
    std::uint64_t total_nodes = 0;
};

HistoryTree build_history_tree(int n, std::uint64_t m) {
    HistoryTree tree;
    tree.horizon = n;
    tree.atom_count = m;
    tree.depth_offset.resize(n);
    std::uint64_t offset = 0, width = 1;
    for (int j = 0; j < n; ++j) {
        tree.depth_offset[j] = offset;
        offset += width;
        width *= m;
    }
    tree.total_nodes = offset;
    return tree;
}

double policy_expectation(const DpProblem& problem, const HistoryTree& tree,
                          const std::vector<std::vector<double>>& candidate_table,
                          const std::vector<std::uint8_t>& assignment, int j,
                          std::uint64_t node, double x, double s_n) {
    if (j == tree.horizon) return problem.terminal(x);
    const double lambda =
        candidate_table[j][assignment[tree.depth_offset[j] + node]];
    const double step_scale = problem.spec.variances.sigma(j + 1) / s_n;
    const auto atoms = problem.spec.noise.atoms();
    double acc = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        acc += atoms[k].probability *
               policy_expectation(problem, tree, candidate_table, assignment, j + 1,
                                  node * tree.atom_count + k,
                                  x + lambda * step_scale * atoms[k].value, s_n);
    }
    return acc;
}

}  // namespace

double enumerate_policies_value(const DpProblem& problem, std::uint64_t policy_budget) {
    problem.validate();
    const int n = problem.spec.horizon;
    const std::uint64_t m = problem.spec.noise.atom_count();
    const HistoryTree tree = build_history_tree(n, m);

    std::vector<std::vector<double>> candidate_table(n);
    for (int j = 0; j < n; ++j) {
        candidate_table[j] = problem.candidates(j);
        if (candidate_table[j].size() > 255) {
            throw ResourceLimitError("enumerate_policies: too many candidates per step");
        }
    }

    // Policy count = prod over nodes of the candidate count at that depth.
    double policy_count = 1.0;
    std::uint64_t width = 1;
    for (int j = 0; j < n; ++j) {
        for (std::uint64_t q = 0; q < width; ++q) {
            policy_count *= static_cast<double>(candidate_table[j].size());
            if (policy_count > static_cast<double>(policy_budget)) {
                throw ResourceLimitError("enumerate_policies: policy count exceeds budget");
            }
        }
        width *= m;
    }

    const double s_n = std::sqrt(problem.spec.variances.cumulative_s2(n));
    std::vector<std::uint8_t> assignment(tree.total_nodes, 0);
    const auto node_depth = [&](std::uint64_t node) {
        int j = 0;
        while (j + 1 < n && node >= tree.depth_offset[j + 1]) ++j;
        return j;
    };

    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        best = std::max(best, policy_expectation(problem, tree, candidate_table, assignment, 0,
                                                 0, 0.0, s_n));
        // Odometer over the assignment vector.
        std::uint64_t pos = 0;
        while (pos < tree.total_nodes) {
            const std::size_t limit = candidate_table[node_depth(pos)].size();
            if (assignment[pos] + 1u < limit) {
                ++assignment[pos];
                break;
            }
            assignment[pos] = 0;
            ++pos;
        }
        if (pos == tree.total_nodes) break;
    }
    return best;
}

// ============================================================================
// ValueSlices
// ============================================================================

ValueSlices::ValueSlices(PdeGrid grid, std::vector<double> times,
                         std::vector<std::vector<double>> values,
                         std::vector<std::vector<double>> argmax, bool edge_extrapolated)
    : grid_(grid),
      times_(std::move(times)),
      values_(std::move(values)),
      argmax_(std::move(argmax)),
      edge_extrapolated_(edge_extrapolated) {}

double ValueSlices::value_at(int j, double x) const {
    return interp_linear(grid_, values_[j], x, nullptr);
}

double ValueSlices::argmax_lambda(int j, double x) const {
    const auto& row = argmax_[j];
    const double u = x / grid_.dx() + grid_.half_nodes();
    const int i = std::clamp(static_cast<int>(std::lround(u)), 0, grid_.node_count() - 1);
    return row[i];
}

void ValueSlices::dump_csv(std::ostream& os) const {
    os << "j,t,x,value,lambda_star\n";
    for (std::size_t j = 0; j < values_.size(); ++j) {
        for (int i = 0; i < grid_.node_count(); ++i) {
            os << j << ',' << format_double(times_[j]) << ',' << format_double(grid_.node(i))
               << ',' << format_double(values_[j][i]) << ',';
            if (j < argmax_.size()) os << format_double(argmax_[j][i]);
            os << '\n';
        }
    }
}

// ============================================================================
// Policies
// ============================================================================

AdaptedPolicy::AdaptedPolicy(std::string label, UncertaintyBand band)
    : label_(std::move(label)), band_(std::move(band)) {}

AdaptedPolicy::AdaptedPolicy(const AdaptedPolicy& other)
    : label_(other.label_),
      band_(other.band_),
      constant_lambda_(other.constant_lambda_),
      slices_(other.slices_),
      pde_(other.pde_),
      kind_(other.kind_) {
    clipped_.store(other.clipped_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    extrapolated_.store(other.extrapolated_.load(std::memory_order_relaxed),
                        std::memory_order_relaxed);
}

AdaptedPolicy::AdaptedPolicy(AdaptedPolicy&& other) noexcept
    : label_(std::move(other.label_)),
      band_(std::move(other.band_)),
      constant_lambda_(other.constant_lambda_),
      slices_(std::move(other.slices_)),
      pde_(std::move(other.pde_)),
      kind_(other.kind_) {
    clipped_.store(other.clipped_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    extrapolated_.store(other.extrapolated_.load(std::memory_order_relaxed),
                        std::memory_order_relaxed);
}

AdaptedPolicy AdaptedPolicy::constant(double lambda, UncertaintyBand band) {
    char label[40];
    std::snprintf(label, sizeof(label), "constant(%g)", lambda);
    AdaptedPolicy p(label, std::move(band));
    p.kind_ = Kind::kConstant;
    p.constant_lambda_ = lambda;
    return p;
}

AdaptedPolicy AdaptedPolicy::dp_argmax(std::shared_ptr<const ValueSlices> slices,
                                       UncertaintyBand band) {
    if (!slices) throw std::invalid_argument("policy: dp_argmax needs value slices");
    AdaptedPolicy p("dp_argmax", std::move(band));
    p.kind_ = Kind::kDpArgmax;
    p.slices_ = std::move(slices);
    return p;
}

AdaptedPolicy AdaptedPolicy::bang_bang(std::shared_ptr<const PdeSolution> pde,
                                       UncertaintyBand band) {
    if (!pde) throw std::invalid_argument("policy: bang_bang needs a solved field");
    AdaptedPolicy p("bang_bang", std::move(band));
    p.kind_ = Kind::kBangBang;
    p.pde_ = std::move(pde);
    return p;
}

double AdaptedPolicy::operator()(int j, double x, double t) const {
    const double lo = band_.lower(j);
    const double hi = band_.upper(j);
    double lambda = lo;
    switch (kind_) {
        case Kind::kConstant:
            lambda = constant_lambda_;
            break;
        case Kind::kDpArgmax: {
            const int jj = std::clamp(j, 0, slices_->horizon() - 1);
            lambda = slices_->argmax_lambda(jj, x);
            break;
        }
        case Kind::kBangBang: {
            bool outside = false;
            const double curvature = pde_->second_difference(t, x, &outside);
            if (outside) extrapolated_.store(true, std::memory_order_relaxed);
            lambda = curvature > 0.0 ? hi : lo;
            break;
        }
    }
    if (lambda < lo || lambda > hi) {
        clipped_.store(true, std::memory_order_relaxed);
        lambda = std::clamp(lambda, lo, hi);
    }
    return lambda;
}

}  // namespace uvclt
