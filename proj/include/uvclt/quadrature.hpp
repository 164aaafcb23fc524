#pragma once

#include <span>
#include <vector>

namespace uvclt {

/// Gauss-Hermite rule for the weight exp(-x^2): integral f(x) exp(-x^2) dx
/// ~ sum w_i f(x_i). Nodes ascending; weights sum to sqrt(pi).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_hermite(int node_count);

/// Deterministic pairwise summation in index order; used wherever a result
/// must not depend on worker count.
double pairwise_sum(std::span<const double> values);

}  // namespace uvclt
