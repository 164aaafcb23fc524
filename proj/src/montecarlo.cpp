#include "uvclt/montecarlo.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "uvclt/quadrature.hpp"
#include "uvclt/report.hpp"

namespace uvclt {

void SimulationConfig::validate() const {
    if (paths < 1) throw std::invalid_argument("mc: paths must be >= 1");
    if (epsilon < 0.0) throw std::invalid_argument("mc: epsilon must be >= 0");
}

double sample_noise(const NoiseDistribution& dist, RandomStream& stream) {
    const double u = stream.next_uniform();
    double cdf = 0.0;
    const auto atoms = dist.atoms();
    for (const auto& atom : atoms) {
        cdf += atom.probability;
        if (u < cdf) return atom.value;
    }
    return atoms.back().value;
}

namespace {

struct PathContext {
    const ModelSpec* spec;
    const AdaptedPolicy* policy;
    const TerminalFunction* terminal;
    const SimulationConfig* config;
    const std::vector<double>* times;
    double s_n;
    const double* sigma_steps;  // sigma_{j+1} for j = 0..n-1
};

// One path; antithetic pairs share a substream, the odd leg flips uniforms.
// Returns f(X_n); reports band violations through `violation` instead of
// throwing (runs inside a parallel region).
inline double run_path(const PathContext& ctx, std::int64_t path, int* violation) {
    const bool antithetic = ctx.config->antithetic;
    const std::uint64_t stream_index =
        antithetic ? static_cast<std::uint64_t>(path) / 2 : static_cast<std::uint64_t>(path);
    const bool flip = antithetic && (path % 2 == 1);
    RandomStream stream(substream_key(ctx.config->seed, stream_index));

    const int n = ctx.spec->horizon;
    const double epsilon = ctx.config->epsilon;
    double x = 0.0;
    for (int j = 0; j < n; ++j) {
        double lambda = (*ctx.policy)(j, x, (*ctx.times)[j]);
        if (lambda < ctx.spec->band.lower(j) - 1e-12 ||
            lambda > ctx.spec->band.upper(j) + 1e-12) {
            *violation = 1;
            return 0.0;
        }
        if (epsilon > 0.0) lambda = std::sqrt(lambda * lambda + epsilon * epsilon);
        double u = stream.next_uniform();
        if (flip) u = 1.0 - u;
        double cdf = 0.0, atom_value = 0.0;
        for (const auto& atom : ctx.spec->noise.atoms()) {
            cdf += atom.probability;
            atom_value = atom.value;
            if (u < cdf) break;
        }
        x += lambda * ctx.sigma_steps[j] * atom_value / ctx.s_n;
    }
    return (*ctx.terminal)(x);
}

}  // namespace

EstimateReport simulate_value(const ModelSpec& spec, const AdaptedPolicy& policy,
                              const TerminalFunction& f, const SimulationConfig& config) {
    spec.validate();
    config.validate();

    const int n = spec.horizon;
    const std::vector<double> times = time_grid(spec, n);
    std::vector<double> sigma_steps(n);
    for (int j = 0; j < n; ++j) sigma_steps[j] = spec.variances.sigma(j + 1);

    PathContext ctx;
    ctx.spec = &spec;
    ctx.policy = &policy;
    ctx.terminal = &f;
    ctx.config = &config;
    ctx.times = &times;
    ctx.s_n = std::sqrt(spec.variances.cumulative_s2(n));
    ctx.sigma_steps = sigma_steps.data();

    const std::int64_t paths = config.paths;
    std::vector<double> values(static_cast<std::size_t>(paths));
    int violation = 0;
    if (config.exec == ExecMode::parallel) {
#pragma omp parallel for schedule(static) reduction(| : violation)
        for (std::int64_t p = 0; p < paths; ++p) {
            values[static_cast<std::size_t>(p)] = run_path(ctx, p, &violation);
        }
    } else {
        for (std::int64_t p = 0; p < paths; ++p) {
            values[static_cast<std::size_t>(p)] = run_path(ctx, p, &violation);
        }
    }
    if (violation != 0) {
        throw std::logic_error("mc: policy returned a multiplier outside the band");
    }

    // Deterministic aggregation: pairwise sums in path order.
    const double mean = pairwise_sum(values) / static_cast<double>(paths);
    double std_dev = 0.0;
    if (paths > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - mean;
            sq[i] = d * d;
        }
        std_dev = std::sqrt(pairwise_sum(sq) / static_cast<double>(paths - 1));
    }

    EstimateReport report;
    report.mean = mean;
    report.std_dev = std_dev;
    report.standard_error = std_dev / std::sqrt(static_cast<double>(paths));
    report.ci99_halfwidth = 2.576 * report.standard_error;
    report.paths = paths;
    report.seed = config.seed;
    report.policy_label = policy.label();
    report.epsilon = config.epsilon;
    report.horizon = n;
    return report;
}

const char* EstimateReport::csv_header() { return "policy,n,paths,seed,epsilon,mean,se,ci99"; }

void EstimateReport::write_csv_row(std::ostream& os) const {
    os << policy_label << ',' << horizon << ',' << paths << ',' << seed << ','
       << format_double(epsilon) << ',' << format_double(mean) << ','
       << format_double(standard_error) << ',' << format_double(ci99_halfwidth) << '\n';
}

}  // namespace uvclt
