#include "uvclt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace uvclt {

namespace {

// Orthonormal Hermite recurrence for the weight exp(-x^2):
//   p_{j+1}(x) = x sqrt(2/(j+1)) p_j(x) - sqrt(j/(j+1)) p_{j-1}(x),
// with p_0 = pi^{-1/4} and derivative p_n'(x) = sqrt(2n) p_{n-1}(x).
struct HermiteEval {
    double p_n;
    double p_nm1;
};

HermiteEval evaluate(int n, double x) {
    double p_prev = 0.0;
    double p = 0.7511255444649425;  // pi^{-1/4}
    for (int j = 0; j < n; ++j) {
        const double p_next =
            x * std::sqrt(2.0 / (j + 1)) * p - std::sqrt(static_cast<double>(j) / (j + 1)) * p_prev;
        p_prev = p;
        p = p_next;
    }
    return {p, p_prev};
}

}  // namespace

QuadratureRule gauss_hermite(int node_count) {
    if (node_count < 1) throw std::invalid_argument("gauss_hermite: node_count must be >= 1");
    const int n = node_count;
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const int half = (n + 1) / 2;
    double z = 0.0, z_prev = 0.0, z_prev2 = 0.0;
    for (int i = 0; i < half; ++i) {
        // Classical initial guesses, roots found largest-first.
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * z_prev2;
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * z_prev2;
        } else {
            z = 2.0 * z - z_prev2;
        }

        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            const auto e = evaluate(n, z);
            pp = std::sqrt(2.0 * n) * e.p_nm1;
            const double dz = e.p_n / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
        }
        const auto e = evaluate(n, z);
        pp = std::sqrt(2.0 * n) * e.p_nm1;

        z_prev2 = z_prev;
        z_prev = z;

        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        const double w = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // symmetry; kill the -0.0
    return rule;
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t mid = n / 2;
    return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

}  // namespace uvclt
