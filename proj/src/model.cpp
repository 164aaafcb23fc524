#include "uvclt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "uvclt/quadrature.hpp"

namespace uvclt {

namespace {

constexpr double kMomentTol = 1e-12;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

// ============================================================================
// NoiseDistribution
// ============================================================================

NoiseDistribution::NoiseDistribution(std::string name, std::vector<NoiseAtom> atoms,
                                     bool require_unit_variance)
    : name_(std::move(name)), atoms_(std::move(atoms)) {
    require(!atoms_.empty(), "noise: needs at least one atom");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const NoiseAtom& a, const NoiseAtom& b) { return a.value < b.value; });
    double mass = 0.0, mean = 0.0, second = 0.0;
    for (const auto& a : atoms_) {
        require(a.probability > 0.0, "noise: probabilities must be positive");
        mass += a.probability;
        mean += a.probability * a.value;
        second += a.probability * a.value * a.value;
    }
    require(std::abs(mass - 1.0) <= kMomentTol, "noise: probabilities must sum to 1");
    require(std::abs(mean) <= kMomentTol, "noise: atoms must have zero mean");
    if (require_unit_variance) {
        require(std::abs(second - 1.0) <= kMomentTol, "noise: atoms must have unit variance");
    }
}

NoiseDistribution NoiseDistribution::rademacher() {
    return NoiseDistribution("rademacher", {{-1.0, 0.5}, {1.0, 0.5}}, true);
}

NoiseDistribution NoiseDistribution::three_point() {
    const double a = std::sqrt(2.0);
    return NoiseDistribution("three_point", {{-a, 0.25}, {0.0, 0.5}, {a, 0.25}}, true);
}

NoiseDistribution NoiseDistribution::skewed_two_point() {
    return NoiseDistribution("skewed_two_point", {{-0.5, 0.8}, {2.0, 0.2}}, true);
}

NoiseDistribution NoiseDistribution::discretized_gaussian(int m) {
    require(m >= 2, "discretized_gaussian: needs at least two atoms");
    const QuadratureRule rule = gauss_hermite(m);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    std::vector<NoiseAtom> atoms(m);
    const double scale = std::sqrt(2.0);
    for (int i = 0; i < m; ++i) {
        atoms[i] = {scale * rule.nodes[i], rule.weights[i] / mass};
    }
    char name[48];
    std::snprintf(name, sizeof(name), "discretized_gaussian(%d)", m);
    return NoiseDistribution(name, std::move(atoms), true);
}

NoiseDistribution NoiseDistribution::custom(std::vector<NoiseAtom> atoms) {
    return NoiseDistribution("custom", std::move(atoms), true);
}

NoiseDistribution NoiseDistribution::degenerate() {
    return NoiseDistribution("degenerate", {{0.0, 1.0}}, false);
}

double NoiseDistribution::max_abs_atom() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, std::abs(a.value));
    return m;
}

double NoiseDistribution::absolute_moment(double order) const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.probability * std::pow(std::abs(a.value), order);
    return acc;
}

// ============================================================================
// VarianceSequence
// ============================================================================

VarianceSequence VarianceSequence::constant(double sigma) {
    require(sigma > 0.0, "variances: sigma must be positive");
    VarianceSequence v;
    v.rule_ = Rule::kConstant;
    v.rule_name_ = "constant";
    v.constant_sigma_ = sigma;
    return v;
}

VarianceSequence VarianceSequence::explicit_values(std::vector<double> sigmas) {
    require(!sigmas.empty(), "variances: explicit list must be non-empty");
    for (double s : sigmas) require(s > 0.0, "variances: all sigma_j must be positive");
    VarianceSequence v;
    v.rule_ = Rule::kExplicit;
    v.rule_name_ = "explicit";
    v.values_ = std::move(sigmas);
    return v;
}

VarianceSequence VarianceSequence::power(double exponent) {
    VarianceSequence v;
    v.rule_ = Rule::kPower;
    v.rule_name_ = "power";
    v.exponent_ = exponent;
    return v;
}

double VarianceSequence::sigma(int j) const {
    require(j >= 1, "variances: index starts at 1");
    switch (rule_) {
        case Rule::kConstant: return constant_sigma_;
        case Rule::kExplicit:
            require(j <= static_cast<int>(values_.size()), "variances: index beyond explicit list");
            return values_[j - 1];
        case Rule::kPower: return std::pow(static_cast<double>(j), exponent_);
    }
    return 0.0;
}

double VarianceSequence::cumulative_s2(int n) const {
    require(n >= 1, "variances: horizon must be >= 1");
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double s = sigma(j);
        acc += s * s;
    }
    return acc;
}

int VarianceSequence::max_horizon() const {
    return rule_ == Rule::kExplicit ? static_cast<int>(values_.size())
                                    : std::numeric_limits<int>::max();
}

// ============================================================================
// UncertaintyBand
// ============================================================================

UncertaintyBand UncertaintyBand::constant(double lo, double hi) {
    require(lo >= 0.0 && hi >= lo, "band: needs 0 <= lower <= upper");
    UncertaintyBand b;
    b.rule_ = Rule::kConstant;
    b.rule_name_ = "constant";
    b.limit_lo_ = lo;
    b.limit_hi_ = hi;
    b.uniform_bound_ = hi;
    return b;
}

UncertaintyBand UncertaintyBand::explicit_values(std::vector<std::pair<double, double>> bands,
                                                 double limit_lo, double limit_hi) {
    require(limit_lo >= 0.0 && limit_hi >= limit_lo, "band: needs 0 <= limit_lo <= limit_hi");
    UncertaintyBand b;
    b.rule_ = Rule::kExplicit;
    b.rule_name_ = "explicit";
    b.limit_lo_ = limit_lo;
    b.limit_hi_ = limit_hi;
    b.uniform_bound_ = limit_hi;
    for (const auto& [lo, hi] : bands) {
        require(lo >= 0.0 && hi >= lo, "band: every entry needs 0 <= lower <= upper");
        b.uniform_bound_ = std::max(b.uniform_bound_, hi);
    }
    b.values_ = std::move(bands);
    return b;
}

UncertaintyBand UncertaintyBand::limit_plus_decay(double limit_lo, double limit_hi,
                                                  double c_hi, double c_lo) {
    require(limit_lo >= 0.0 && limit_hi >= limit_lo, "band: needs 0 <= limit_lo <= limit_hi");
    require(limit_hi + c_hi >= 0.0, "band: upper_0 must be nonnegative");
    // Both sequences are monotone in j, so j = 0 and the limit are the only
    // candidates for ordering violations.
    const double lower0 = std::max(0.0, limit_lo + c_lo);
    require(limit_hi + c_hi >= lower0, "band: upper_0 must dominate lower_0");
    UncertaintyBand b;
    b.rule_ = Rule::kLimitPlusDecay;
    b.rule_name_ = "limit_plus_decay";
    b.limit_lo_ = limit_lo;
    b.limit_hi_ = limit_hi;
    b.c_hi_ = c_hi;
    b.c_lo_ = c_lo;
    b.uniform_bound_ = std::max(limit_hi, limit_hi + c_hi);
    return b;
}

double UncertaintyBand::lower(int j) const {
    require(j >= 0, "band: index starts at 0");
    switch (rule_) {
        case Rule::kConstant: return limit_lo_;
        case Rule::kExplicit:
            return j < static_cast<int>(values_.size()) ? values_[j].first : limit_lo_;
        case Rule::kLimitPlusDecay: return std::max(0.0, limit_lo_ + c_lo_ / (j + 1));
    }
    return 0.0;
}

double UncertaintyBand::upper(int j) const {
    require(j >= 0, "band: index starts at 0");
    switch (rule_) {
        case Rule::kConstant: return limit_hi_;
        case Rule::kExplicit:
            return j < static_cast<int>(values_.size()) ? values_[j].second : limit_hi_;
        case Rule::kLimitPlusDecay: return limit_hi_ + c_hi_ / (j + 1);
    }
    return 0.0;
}

Interval UncertaintyBand::squared_interval(int j) const {
    const double lo = lower(j), hi = upper(j);
    return {lo * lo, hi * hi};
}

Interval UncertaintyBand::limit_squared_interval() const {
    return {limit_lo_ * limit_lo_, limit_hi_ * limit_hi_};
}

// ============================================================================
// ModelSpec / TerminalFunction
// ============================================================================

void ModelSpec::validate() const {
    require(horizon >= 1, "model: horizon must be >= 1");
    require(horizon <= variances.max_horizon(), "model: horizon exceeds explicit variance list");
}

TerminalFunction::TerminalFunction(std::string name, std::function<double(double)> fn,
                                   double sup_norm, std::optional<double> lipschitz, bool bounded)
    : name_(std::move(name)),
      fn_(std::move(fn)),
      sup_norm_(sup_norm),
      lipschitz_(lipschitz),
      bounded_(bounded) {}

TerminalFunction TerminalFunction::cosine() {
    return TerminalFunction("cos", [](double x) { return std::cos(x); }, 1.0, 1.0, true);
}

TerminalFunction TerminalFunction::gaussian_bump() {
    return TerminalFunction("gaussian_bump", [](double x) { return std::exp(-x * x); }, 1.0,
                            std::sqrt(2.0) * std::exp(-0.5), true);
}

TerminalFunction TerminalFunction::clipped_ramp() {
    return TerminalFunction("clipped_ramp",
                            [](double x) { return std::clamp(x, -1.0, 1.0); }, 1.0, 1.0, true);
}

TerminalFunction TerminalFunction::constant(double c) {
    char name[40];
    std::snprintf(name, sizeof(name), "constant(%g)", c);
    return TerminalFunction(name, [c](double) { return c; }, std::abs(c), 0.0, true);
}

TerminalFunction TerminalFunction::square() {
    return TerminalFunction("square", [](double x) { return x * x; },
                            std::numeric_limits<double>::infinity(), std::nullopt, false);
}

TerminalFunction TerminalFunction::custom(std::string name, std::function<double(double)> fn,
                                          double sup_norm, std::optional<double> lipschitz,
                                          bool bounded) {
    require(static_cast<bool>(fn), "terminal: evaluator must be callable");
    return TerminalFunction(std::move(name), std::move(fn), sup_norm, lipschitz, bounded);
}

// ============================================================================
// Checkers
// ============================================================================

double lindeberg_functional(const ModelSpec& spec, int n, double epsilon) {
    require(n >= 1, "lindeberg: n must be >= 1");
    require(epsilon > 0.0, "lindeberg: epsilon must be positive");
    require(n <= spec.variances.max_horizon(), "lindeberg: n beyond available horizon");
    const double s2 = spec.variances.cumulative_s2(n);
    const double threshold = epsilon * std::sqrt(s2);
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double sj = spec.variances.sigma(j);
        acc += sj * sj * spec.noise.expect([&](double a) {
            const double xi = sj * a;
            return std::abs(xi) > threshold ? a * a : 0.0;
        });
    }
    // Mathematically <= 1; rounding in the unit-variance sums can overshoot
    // by an ulp.
    return std::min(1.0, acc / s2);
}

double feller_ratio(const ModelSpec& spec, int n) {
    require(n >= 1, "feller: n must be >= 1");
    require(n <= spec.variances.max_horizon(), "feller: n beyond available horizon");
    const double s_n = std::sqrt(spec.variances.cumulative_s2(n));
    double max_sigma = 0.0;
    for (int j = 1; j <= n; ++j) max_sigma = std::max(max_sigma, spec.variances.sigma(j));
    return max_sigma / s_n;
}

double hausdorff_band_distance(const Interval& band_j, const Interval& band_limit) {
    require(band_j.lo <= band_j.hi && band_limit.lo <= band_limit.hi,
            "hausdorff: intervals need lo <= hi");
    return std::max(std::abs(band_j.hi - band_limit.hi), std::abs(band_j.lo - band_limit.lo));
}

StabilizationResult stabilization_deficiency(const ModelSpec& spec, int n) {
    require(n >= 1, "stabilization: n must be >= 1");
    require(n <= spec.variances.max_horizon(), "stabilization: n beyond available horizon");
    const double s2 = spec.variances.cumulative_s2(n);
    const Interval limit = spec.band.limit_squared_interval();
    StabilizationResult r;
    for (int j = 0; j < n; ++j) {
        const double sj1 = spec.variances.sigma(j + 1);
        const double w = sj1 * sj1 / s2;
        const Interval bj = spec.band.squared_interval(j);
        const double dev_hi = std::abs(bj.hi - limit.hi);
        const double dev_lo = std::abs(bj.lo - limit.lo);
        r.m_n += w * (dev_hi + dev_lo);
        r.hausdorff_form += w * std::max(dev_hi, dev_lo);
    }
    return r;
}

double riesz_mean(std::span<const double> values, std::span<const double> weights) {
    require(!values.empty(), "riesz_mean: empty input");
    require(values.size() == weights.size(), "riesz_mean: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(weights[i] > 0.0, "riesz_mean: weights must be positive");
        num += weights[i] * values[i];
        den += weights[i];
    }
    return num / den;
}

MomentConditions moment_conditions(const ModelSpec& spec, int n, double delta) {
    require(n >= 1, "moment_conditions: n must be >= 1");
    require(delta > 0.0, "moment_conditions: delta must be positive");
    require(n <= spec.variances.max_horizon(), "moment_conditions: n beyond available horizon");
    const double order = 2.0 + delta;
    const double abs_moment = spec.noise.absolute_moment(order);
    const double s_n = std::sqrt(spec.variances.cumulative_s2(n));
    MomentConditions mc;
    for (int i = 1; i <= n; ++i) {
        mc.sup_moment = std::max(mc.sup_moment, std::pow(spec.band.upper(i - 1), order) * abs_moment);
        mc.tail_sum += std::pow(spec.variances.sigma(i) / s_n, order);
    }
    return mc;
}

namespace {
const double kDefaultLindebergEps[] = {0.5, 0.1, 0.02};
}

std::span<const double> default_lindeberg_epsilons() { return kDefaultLindebergEps; }

ConditionReport condition_report(const ModelSpec& spec, int n,
                                 std::span<const double> lindeberg_epsilons,
                                 double moment_delta) {
    ConditionReport r;
    r.n = n;
    if (lindeberg_epsilons.empty()) lindeberg_epsilons = default_lindeberg_epsilons();
    for (double eps : lindeberg_epsilons) {
        r.lindeberg.emplace_back(eps, lindeberg_functional(spec, n, eps));
    }
    r.feller = feller_ratio(spec, n);
    const auto stab = stabilization_deficiency(spec, n);
    r.stabilization_m = stab.m_n;
    r.hausdorff_form = stab.hausdorff_form;
    r.moment_delta = moment_delta;
    const auto mc = moment_conditions(spec, n, moment_delta);
    r.moment_sup = mc.sup_moment;
    r.moment_tail = mc.tail_sum;
    return r;
}

std::vector<std::pair<std::string, double>> ConditionReport::flatten() const {
    std::vector<std::pair<std::string, double>> kv;
    kv.emplace_back("n", static_cast<double>(n));
    for (const auto& [eps, value] : lindeberg) {
        char key[48];
        std::snprintf(key, sizeof(key), "lindeberg_eps_%g", eps);
        kv.emplace_back(key, value);
    }
    kv.emplace_back("feller", feller);
    kv.emplace_back("stabilization_m", stabilization_m);
    kv.emplace_back("hausdorff_form", hausdorff_form);
    kv.emplace_back("moment_sup", moment_sup);
    kv.emplace_back("moment_tail", moment_tail);
    return kv;
}

}  // namespace uvclt
