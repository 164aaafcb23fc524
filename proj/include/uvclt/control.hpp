#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uvclt/gheat.hpp"
#include "uvclt/grid.hpp"
#include "uvclt/model.hpp"

namespace uvclt {

enum class CandidateRule { endpoints_only, lambda_grid };

/// Finite-horizon worst-case control problem: state recursion
/// X_{j+1} = X_j + (lambda_j / s_n) xi_{j+1}, payoff f(X_n), multiplier
/// chosen per step from a finite candidate set inside [lower_j, upper_j].
struct DpProblem {
    ModelSpec spec;
    TerminalFunction terminal = TerminalFunction::cosine();
    CandidateRule rule = CandidateRule::lambda_grid;
    int candidate_count = 21;  // lambda_grid size, endpoints always included
    PdeGrid grid{10.0, 0.01};
    bool allow_edge_extrapolation = true;
    bool keep_slices = true;
    ExecMode exec = ExecMode::parallel;

    void validate() const;
    /// Candidate multipliers for step j, ascending, endpoints exact.
    std::vector<double> candidates(int j) const;
};

/// t_j = sum_{k<=j} sigma_k^2 / s_n^2 with sigma_0 = 0, so t_0 = 0; the last
/// entry is forced to 1 exactly.
std::vector<double> time_grid(const ModelSpec& spec, int n);

/// Backward-induction value functions V_j on the spatial grid plus the
/// argmax multiplier table. Immutable after construction.
class ValueSlices {
public:
    ValueSlices(PdeGrid grid, std::vector<double> times,
                std::vector<std::vector<double>> values,
                std::vector<std::vector<double>> argmax, bool edge_extrapolated);

    int horizon() const { return static_cast<int>(times_.size()) - 1; }
    std::span<const double> values(int j) const { return values_[j]; }
    double value_at(int j, double x) const;       // linear interpolation
    double argmax_lambda(int j, double x) const;  // nearest node
    const std::vector<double>& times() const { return times_; }
    const PdeGrid& grid() const { return grid_; }
    bool edge_extrapolated() const { return edge_extrapolated_; }

    /// CSV export, columns j,t,x,value,lambda_star.
    void dump_csv(std::ostream& os) const;

private:
    PdeGrid grid_;
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<double>> argmax_;
    bool edge_extrapolated_;
};

struct DpResult {
    double value_at_origin = 0.0;
    /// The dependency cone of the origin reached beyond the grid, so the
    /// value rests partly on linearly extrapolated queries.
    bool edge_extrapolated = false;
    std::shared_ptr<const ValueSlices> slices;  // null when keep_slices is off
};

/// One backward DP step over the spatial grid; OpenMP kernel plus serial
/// reference, bit-identical outputs.
void dp_backward_step(std::span<const double> next_values, std::span<double> out_values,
                      std::span<double> out_argmax, const PdeGrid& grid,
                      std::span<const double> candidates, double step_scale,
                      std::span<const NoiseAtom> atoms, bool* left_grid);
void dp_backward_step_serial(std::span<const double> next_values, std::span<double> out_values,
                             std::span<double> out_argmax, const PdeGrid& grid,
                             std::span<const double> candidates, double step_scale,
                             std::span<const NoiseAtom> atoms, bool* left_grid);

/// Grid dynamic program for the worst-case value; ties in the per-step max
/// break toward the larger multiplier.
DpResult dp_value(const DpProblem& problem);

/// Exact recursion on the reachable-state tree (no spatial grid, no
/// interpolation). Requires atom_count^horizon <= state_budget.
double tree_dp_value(const DpProblem& problem, std::uint64_t state_budget = 100000);

/// Brute force over every history-dependent assignment of candidates to
/// outcome-prefix nodes; strictly richer than Markov feedback. Requires the
/// total policy count <= policy_budget.
double enumerate_policies_value(const DpProblem& problem,
                                std::uint64_t policy_budget = 1000000);

/// Adapted multiplier policy: evaluator (step j, state x, time t) -> lambda,
/// clipped into [lower_j, upper_j] with a sticky flag when clipping fires.
/// Pure evaluator, safe for concurrent use.
class AdaptedPolicy {
public:
    static AdaptedPolicy constant(double lambda, UncertaintyBand band);
    static AdaptedPolicy dp_argmax(std::shared_ptr<const ValueSlices> slices,
                                   UncertaintyBand band);
    /// upper_j where the solved field has positive curvature at (t, x),
    /// lower_j otherwise.
    static AdaptedPolicy bang_bang(std::shared_ptr<const PdeSolution> pde,
                                   UncertaintyBand band);

    double operator()(int j, double x, double t) const;
    const std::string& label() const { return label_; }
    const UncertaintyBand& band() const { return band_; }
    bool clipped() const { return clipped_.load(std::memory_order_relaxed); }
    /// A query fell outside the backing PDE grid.
    bool extrapolated() const { return extrapolated_.load(std::memory_order_relaxed); }

    AdaptedPolicy(const AdaptedPolicy&);
    AdaptedPolicy& operator=(const AdaptedPolicy&) = delete;
    AdaptedPolicy(AdaptedPolicy&&) noexcept;

private:
    AdaptedPolicy(std::string label, UncertaintyBand band);

    std::string label_;
    UncertaintyBand band_;
    double constant_lambda_ = 0.0;
    std::shared_ptr<const ValueSlices> slices_;
    std::shared_ptr<const PdeSolution> pde_;
    enum class Kind { kConstant, kDpArgmax, kBangBang } kind_ = Kind::kConstant;
    mutable std::atomic<bool> clipped_{false};
    mutable std::atomic<bool> extrapolated_{false};
};

}  // namespace uvclt
