#pragma once

#include "uvclt/model.hpp"

namespace uvclt {

struct MollifierConfig {
    double epsilon = 0.1;
    /// Evaluation window [-A, A]; 0 means auto: 2/sqrt(epsilon) + 1.
    double window_half_width = 0.0;
    double window_step = 0.01;
    int quadrature_nodes = 64;
    double bandwidth_min = 1e-4;
    double bandwidth_max = 4.0;

    void validate() const;
    double effective_window() const;
};

struct SmoothApproxResult {
    TerminalFunction fn;
    double bandwidth = 0.0;
    /// Certified sup-norm deviation over the window: the sampled maximum
    /// plus a Lipschitz margin for the gaps between samples.
    double achieved_deviation = 0.0;
};

/// Smooth approximation by Gaussian-kernel convolution, bandwidth chosen by
/// bisection so the max deviation from f over the window grid is <= epsilon.
/// Throws ApproximationError (carrying the best deviation) when even the
/// smallest bandwidth misses the target.
SmoothApproxResult smooth_approx(const TerminalFunction& f, const MollifierConfig& config);

/// Smooth cutoff: exactly 1 on |x| <= 1, exactly 0 on |x| >= 2, strictly
/// monotone in between; built from the exp(-1/t) bump partition.
double cutoff_chi(double x);

/// g(x) = chi(sqrt(epsilon) x) f_eps(x): unchanged on |x| <= 1/sqrt(epsilon),
/// zero for |x| >= 2/sqrt(epsilon).
TerminalFunction truncate_terminal(const TerminalFunction& f_eps, double epsilon);

/// Certified bound on |E f(X_n) - E g_eps(X_n)| under any admissible policy:
/// epsilon + 2 ||f||inf epsilon Lambda^2, with Lambda = max_{j<n} upper_j.
double truncation_error_bound(const ModelSpec& spec, const TerminalFunction& f,
                              double epsilon, int n);

}  // namespace uvclt
