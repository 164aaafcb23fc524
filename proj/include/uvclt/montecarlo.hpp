#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "uvclt/control.hpp"
#include "uvclt/model.hpp"
#include "uvclt/rng.hpp"

namespace uvclt {

struct SimulationConfig {
    std::int64_t paths = 10000;
    std::uint64_t seed = 0;
    bool antithetic = false;
    /// Optional perturbation: every queried lambda is mapped to
    /// sqrt(lambda^2 + epsilon^2) before use.
    double epsilon = 0.0;
    ExecMode exec = ExecMode::parallel;

    void validate() const;
};

struct EstimateReport {
    double mean = 0.0;
    double std_dev = 0.0;
    double standard_error = 0.0;   // std_dev / sqrt(paths)
    double ci99_halfwidth = 0.0;   // 2.576 * standard_error
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    std::string policy_label;
    double epsilon = 0.0;
    int horizon = 0;

    /// One CSV row: policy,n,paths,seed,epsilon,mean,se,ci99.
    void write_csv_row(std::ostream& os) const;
    static const char* csv_header();
};

/// Inverse-CDF draw; the stored atom order defines the CDF partition.
double sample_noise(const NoiseDistribution& dist, RandomStream& stream);

/// Simulates X_{j+1} = X_j + (lambda_j / s_n) xi_{j+1} from X_0 = 0 under the
/// policy and returns sample statistics of f(X_n). Fixed seed gives
/// bit-identical reports regardless of worker count: paths use counter-based
/// substreams and aggregation is a pairwise sum in path order.
EstimateReport simulate_value(const ModelSpec& spec, const AdaptedPolicy& policy,
                              const TerminalFunction& f, const SimulationConfig& config);

}  // namespace uvclt
