#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uvclt {

// ============================================================================
// Noise
// ============================================================================

struct NoiseAtom {
    double value = 0.0;
    double probability = 0.0;
};

/// Finite-atom law of the standardized innovation (zero mean, unit variance),
/// so every expectation over it is an exact finite sum. Atoms are stored in
/// canonical ascending order; that order also defines the sampling CDF
/// partition, making all outputs independent of the order atoms were given in.
class NoiseDistribution {
public:
    static NoiseDistribution rademacher();
    static NoiseDistribution three_point();
    static NoiseDistribution skewed_two_point();
    /// Moment-matched discretization of the standard normal via Gauss-Hermite
    /// nodes: matches moments up to order 2m-1.
    static NoiseDistribution discretized_gaussian(int m);
    static NoiseDistribution custom(std::vector<NoiseAtom> atoms);
    /// Point mass at zero. Violates the unit-variance requirement on purpose;
    /// usable for sampler plumbing, not as a ModelSpec ingredient.
    static NoiseDistribution degenerate();

    std::span<const NoiseAtom> atoms() const { return atoms_; }
    const std::string& name() const { return name_; }
    double max_abs_atom() const;
    std::size_t atom_count() const { return atoms_.size(); }

    /// Exact expectation E F(xi) over the atoms.
    template <class F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (const auto& a : atoms_) acc += a.probability * f(a.value);
        return acc;
    }

    /// E |xi|^order, exact over atoms.
    double absolute_moment(double order) const;

private:
    NoiseDistribution(std::string name, std::vector<NoiseAtom> atoms, bool require_unit_variance);

    std::string name_;
    std::vector<NoiseAtom> atoms_;
};

// ============================================================================
// Variances and uncertainty bands
// ============================================================================

/// Per-step standard deviations sigma_j, indexed from j = 1.
class VarianceSequence {
public:
    static VarianceSequence constant(double sigma);
    static VarianceSequence explicit_values(std::vector<double> sigmas);
    /// sigma_j = j^exponent.
    static VarianceSequence power(double exponent);

    double sigma(int j) const;            // j >= 1
    double cumulative_s2(int n) const;    // sum_{j<=n} sigma_j^2
    int max_horizon() const;
    const std::string& rule_name() const { return rule_name_; }

private:
    enum class Rule { kConstant, kExplicit, kPower };
    Rule rule_ = Rule::kConstant;
    std::string rule_name_;
    double constant_sigma_ = 1.0;
    double exponent_ = 0.0;
    std::vector<double> values_;
};

/// Closed interval; used for the squared-multiplier bands.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-step multiplier intervals [lower_j, upper_j], indexed from j = 0, with
/// declared limits (lower, upper) and a uniform bound on upper_j.
class UncertaintyBand {
public:
    static UncertaintyBand constant(double lo, double hi);
    static UncertaintyBand explicit_values(std::vector<std::pair<double, double>> bands,
                                           double limit_lo, double limit_hi);
    /// upper_j = limit_hi + c_hi/(j+1); lower_j = max(0, limit_lo + c_lo/(j+1)).
    static UncertaintyBand limit_plus_decay(double limit_lo, double limit_hi,
                                            double c_hi, double c_lo);

    double lower(int j) const;  // j >= 0
    double upper(int j) const;
    double limit_lower() const { return limit_lo_; }
    double limit_upper() const { return limit_hi_; }
    /// Uniform bound on upper_j over all j.
    double uniform_bound() const { return uniform_bound_; }

    Interval squared_interval(int j) const;
    Interval limit_squared_interval() const;
    const std::string& rule_name() const { return rule_name_; }

private:
    enum class Rule { kConstant, kExplicit, kLimitPlusDecay };
    Rule rule_ = Rule::kConstant;
    std::string rule_name_;
    double limit_lo_ = 0.0, limit_hi_ = 0.0;
    double c_hi_ = 0.0, c_lo_ = 0.0;
    double uniform_bound_ = 0.0;
    std::vector<std::pair<double, double>> values_;
};

/// Full stochastic model: standardized noise, per-step scales, multiplier
/// bands, and the working horizon.
struct ModelSpec {
    NoiseDistribution noise = NoiseDistribution::rademacher();
    VarianceSequence variances = VarianceSequence::constant(1.0);
    UncertaintyBand band = UncertaintyBand::constant(1.0, 1.0);
    int horizon = 1;

    void validate() const;  // throws std::invalid_argument
};

// ============================================================================
// Terminal functions
// ============================================================================

class TerminalFunction {
public:
    static TerminalFunction cosine();
    static TerminalFunction gaussian_bump();   // exp(-x^2)
    static TerminalFunction clipped_ramp();    // clamp(x, -1, 1)
    static TerminalFunction constant(double c);
    static TerminalFunction square();          // x^2; flagged unbounded
    static TerminalFunction custom(std::string name, std::function<double(double)> fn,
                                   double sup_norm, std::optional<double> lipschitz,
                                   bool bounded = true);

    double operator()(double x) const { return fn_(x); }
    const std::string& name() const { return name_; }
    bool bounded() const { return bounded_; }
    /// Declared sup norm; meaningful only when bounded().
    double sup_norm() const { return sup_norm_; }
    std::optional<double> lipschitz() const { return lipschitz_; }

private:
    TerminalFunction(std::string name, std::function<double(double)> fn,
                     double sup_norm, std::optional<double> lipschitz, bool bounded);

    std::string name_;
    std::function<double(double)> fn_;
    double sup_norm_ = 0.0;
    std::optional<double> lipschitz_;
    bool bounded_ = true;
};

// ============================================================================
// Hypothesis checkers
// ============================================================================

/// (1/s_n^2) sum_{j<=n} E(xi_j^2 1{|xi_j| > eps s_n}), exact over atoms.
double lindeberg_functional(const ModelSpec& spec, int n, double epsilon);

/// max_{1<=j<=n} sigma_j / s_n.
double feller_ratio(const ModelSpec& spec, int n);

/// Hausdorff distance between intervals of squared multipliers.
double hausdorff_band_distance(const Interval& band_j, const Interval& band_limit);

struct StabilizationResult {
    double m_n = 0.0;            // variance-weighted endpoint-deviation sum
    double hausdorff_form = 0.0; // same weights against the Hausdorff distance
};
StabilizationResult stabilization_deficiency(const ModelSpec& spec, int n);

double riesz_mean(std::span<const double> values, std::span<const double> weights);

struct MomentConditions {
    double sup_moment = 0.0;  // max_{i<=n} upper_{i-1}^{2+delta} E|xi_i/sigma_i|^{2+delta}
    double tail_sum = 0.0;    // sum_{j<=n} (sigma_j/s_n)^{2+delta}
};
MomentConditions moment_conditions(const ModelSpec& spec, int n, double delta);

/// All checker outputs for one n, flattened for reporting.
struct ConditionReport {
    int n = 0;
    std::vector<std::pair<double, double>> lindeberg;  // (epsilon, L_n(epsilon))
    double feller = 0.0;
    double stabilization_m = 0.0;
    double hausdorff_form = 0.0;
    double moment_delta = 0.0;
    double moment_sup = 0.0;
    double moment_tail = 0.0;

    std::vector<std::pair<std::string, double>> flatten() const;
};

ConditionReport condition_report(const ModelSpec& spec, int n,
                                 std::span<const double> lindeberg_epsilons,
                                 double moment_delta);

/// Default Lindeberg thresholds used by reports when none are configured.
std::span<const double> default_lindeberg_epsilons();

}  // namespace uvclt
