#include "uvclt/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "uvclt/errors.hpp"
#include "uvclt/quadrature.hpp"

namespace uvclt {

void MollifierConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("mollify: epsilon must be positive");
    if (window_half_width > 0.0 && window_half_width < 2.0 / std::sqrt(epsilon)) {
        throw std::invalid_argument("mollify: window must cover the cutoff support edge");
    }
    if (!(window_step > 0.0)) throw std::invalid_argument("mollify: window_step must be positive");
    if (quadrature_nodes < 4) throw std::invalid_argument("mollify: too few quadrature nodes");
    if (!(bandwidth_min > 0.0 && bandwidth_max > bandwidth_min)) {
        throw std::invalid_argument("mollify: bad bandwidth range");
    }
}

double MollifierConfig::effective_window() const {
    return window_half_width > 0.0 ? window_half_width : 2.0 / std::sqrt(epsilon) + 1.0;
}

namespace {

// Normalized kernel weights for E f(x + h Z); shared by the returned evaluator.
struct ConvolutionKernel {
    std::vector<double> offsets;  // h * sqrt(2) * node
    std::vector<double> weights;  // normalized to sum 1
};

ConvolutionKernel make_kernel(const QuadratureRule& rule, double bandwidth) {
    ConvolutionKernel k;
    const int n = static_cast<int>(rule.nodes.size());
    k.offsets.resize(n);
    k.weights.resize(n);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    const double scale = bandwidth * std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        k.offsets[i] = scale * rule.nodes[i];
        k.weights[i] = rule.weights[i] / mass;
    }
    return k;
}

double convolve(const TerminalFunction& f, const ConvolutionKernel& k, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k.offsets.size(); ++i) {
        acc += k.weights[i] * f(x + k.offsets[i]);
    }
    return acc;
}

double max_deviation(const TerminalFunction& f, const ConvolutionKernel& k, double window,
                     double step) {
    double dev = 0.0;
    const int count = static_cast<int>(std::floor(2.0 * window / step)) + 1;
    for (int i = 0; i < count; ++i) {
        const double x = -window + i * step;
        dev = std::max(dev, std::abs(f(x) - convolve(f, k, x)));
    }
    dev = std::max(dev, std::abs(f(window) - convolve(f, k, window)));
    return dev;
}

}  // namespace

SmoothApproxResult smooth_approx(const TerminalFunction& f, const MollifierConfig& config) {
    config.validate();
    if (!f.bounded()) throw std::invalid_argument("mollify: needs a bounded terminal function");

    const QuadratureRule rule = gauss_hermite(config.quadrature_nodes);
    const double window = config.effective_window();
    // The deviation is sampled on the window grid; a Lipschitz margin turns
    // the sampled max into a bound over the whole window.
    const double margin =
        f.lipschitz() ? *f.lipschitz() * config.window_step : 0.0;
    const auto deviation = [&](double h) {
        return max_deviation(f, make_kernel(rule, h), window, config.window_step) + margin;
    };

    // Largest bandwidth whose deviation stays under epsilon; deviation grows
    // with h, so bisect on feasibility.
    double chosen;
    if (deviation(config.bandwidth_max) <= config.epsilon) {
        chosen = config.bandwidth_max;
    } else {
        double lo = config.bandwidth_min;
        const double dev_lo = deviation(lo);
        if (dev_lo > config.epsilon) {
            char msg[128];
            std::snprintf(msg, sizeof(msg),
                          "mollify: bandwidth search failed, best deviation %.6g > %.6g", dev_lo,
                          config.epsilon);
            throw ApproximationError(msg, dev_lo);
        }
        double hi = config.bandwidth_max;
        for (int iter = 0; iter < 48; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (deviation(mid) <= config.epsilon) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        chosen = lo;
    }

    const double achieved = deviation(chosen);
    auto kernel = std::make_shared<ConvolutionKernel>(make_kernel(rule, chosen));
    auto base = std::make_shared<TerminalFunction>(f);
    char name[96];
    std::snprintf(name, sizeof(name), "mollified(%s,h=%.6g)", f.name().c_str(), chosen);
    TerminalFunction smooth = TerminalFunction::custom(
        name, [kernel, base](double x) { return convolve(*base, *kernel, x); }, f.sup_norm(),
        f.lipschitz(), true);
    return {std::move(smooth), chosen, achieved};
}

double cutoff_chi(double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const auto bump = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double up = bump(2.0 - a);
    return up / (up + bump(a - 1.0));
}

TerminalFunction truncate_terminal(const TerminalFunction& f_eps, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("mollify: epsilon must be >= 0");
    const double root = std::sqrt(epsilon);
    auto base = std::make_shared<TerminalFunction>(f_eps);
    char name[96];
    std::snprintf(name, sizeof(name), "truncated(%s,eps=%.6g)", f_eps.name().c_str(), epsilon);
    return TerminalFunction::custom(
        name,
        [base, root](double x) {
            const double chi = cutoff_chi(root * x);
            return chi == 0.0 ? 0.0 : chi * (*base)(x);
        },
        f_eps.sup_norm(), std::nullopt, true);
}

double truncation_error_bound(const ModelSpec& spec, const TerminalFunction& f, double epsilon,
                              int n) {
    if (epsilon < 0.0) throw std::invalid_argument("mollify: epsilon must be >= 0");
    if (n < 1) throw std::invalid_argument("mollify: n must be >= 1");
    if (!f.bounded() || !std::isfinite(f.sup_norm())) {
        throw std::invalid_argument("mollify: bound needs a declared finite sup norm");
    }
    if (epsilon == 0.0) return 0.0;
    double lambda_max = 0.0;
    for (int j = 0; j < n; ++j) lambda_max = std::max(lambda_max, spec.band.upper(j));
    return epsilon + 2.0 * f.sup_norm() * epsilon * lambda_max * lambda_max;
}

}  // namespace uvclt
