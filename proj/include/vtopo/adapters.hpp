#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vtopo/errors.hpp"

namespace vtopo {

// Exact Gaussian-error-linear unit: x * Phi(x) with the true normal CDF
// (no tanh approximation).
inline double gelu(double x) {
    return x * 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// d/dx gelu(x) = Phi(x) + x * phi(x).
inline double gelu_grad(double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(8.0 * std::atan(1.0)); // sqrt(2*pi)
    return 0.5 * std::erfc(-x / std::sqrt(2.0)) + x * phi;
}

// Bottleneck adapter weights: w1 maps dim -> dim/4, w2 maps dim/4 -> dim.
// Both are row-major (w1[i*hidden+j] multiplies input i into hidden j).
struct AdapterWeights {
    int dim = 0;
    std::vector<double> w1; // dim x (dim/4)
    std::vector<double> w2; // (dim/4) x dim

    AdapterWeights() = default;
    explicit AdapterWeights(int d) : dim(d) {
        if (d <= 0 || d % 4 != 0)
            throw DomainError("AdapterWeights: dim must be a positive multiple of 4, got " +
                              std::to_string(d));
        w1.assign(static_cast<std::size_t>(d) * (d / 4), 0.0);
        w2.assign(static_cast<std::size_t>(d / 4) * d, 0.0);
    }

    int hidden_dim() const { return dim / 4; }

    double& w1_at(int i, int j) { return w1[static_cast<std::size_t>(i) * hidden_dim() + j]; }
    double w1_at(int i, int j) const { return w1[static_cast<std::size_t>(i) * hidden_dim() + j]; }
    double& w2_at(int j, int k) { return w2[static_cast<std::size_t>(j) * dim + k]; }
    double w2_at(int j, int k) const { return w2[static_cast<std::size_t>(j) * dim + k]; }
};

namespace detail {

inline void check_adapter_shapes(std::span<const double> x, const AdapterWeights& w,
                                 const char* op) {
    const std::size_t d = static_cast<std::size_t>(w.dim);
    const std::size_t hidden = d / 4;
    if (w.dim <= 0 || w.dim % 4 != 0)
        throw DomainError(std::string(op) + ": dim must be a positive multiple of 4");
    if (x.size() != d)
        throw ShapeError(std::string(op) + ": input has " + std::to_string(x.size()) +
                         " elements, weights expect " + std::to_string(d));
    if (w.w1.size() != d * hidden || w.w2.size() != hidden * d)
        throw ShapeError(std::string(op) + ": weight matrices do not match dim");
}

inline std::vector<double> adapter_hidden(std::span<const double> x, const AdapterWeights& w) {
    const int hidden = w.hidden_dim();
    std::vector<double> h(static_cast<std::size_t>(hidden), 0.0);
    for (int i = 0; i < w.dim; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (xi == 0.0) continue;
        for (int j = 0; j < hidden; ++j) h[j] += xi * w.w1_at(i, j);
    }
    return h;
}

} // namespace detail

// Bottleneck transform w2 * gelu(w1 * x), without the residual.
inline std::vector<double> feature_adapter(std::span<const double> x, const AdapterWeights& w) {
    detail::check_adapter_shapes(x, w, "feature_adapter");
    const int hidden = w.hidden_dim();
    std::vector<double> h = detail::adapter_hidden(x, w);
    std::vector<double> out(static_cast<std::size_t>(w.dim), 0.0);
    for (int j = 0; j < hidden; ++j) {
        const double g = gelu(h[j]);
        if (g == 0.0) continue;
        for (int k = 0; k < w.dim; ++k) out[k] += g * w.w2_at(j, k);
    }
    return out;
}

// Residual bottleneck transform x + w2 * gelu(w1 * x). All-zero weights
// make this the identity exactly.
inline std::vector<double> spatial_adapter(std::span<const double> x, const AdapterWeights& w) {
    detail::check_adapter_shapes(x, w, "spatial_adapter");
    std::vector<double> out = feature_adapter(x, w);
    for (int k = 0; k < w.dim; ++k) out[k] += x[static_cast<std::size_t>(k)];
    return out;
}

// Analytic-vs-numeric gradient agreement for the residual adapter, probed
// through the scalar L = sum_k spatial_adapter(x)[k]. Central differences
// with the given step; returns the worst relative error over every
// component of dL/dx, dL/dw1 and dL/dw2, where the relative error of
// analytic a vs numeric n is |a - n| / max(1, |a|, |n|).
inline double adapter_grad_check(const AdapterWeights& w, std::span<const double> x,
                                 double step = 1e-5) {
    detail::check_adapter_shapes(x, w, "adapter_grad_check");
    if (!(step > 0.0))
        throw DomainError("adapter_grad_check: step must be positive");

    const int d = w.dim;
    const int hidden = w.hidden_dim();

    auto probe = [&](std::span<const double> xv, const AdapterWeights& wv) {
        const std::vector<double> out = spatial_adapter(xv, wv);
        double s = 0.0;
        for (double v : out) s += v;
        return s;
    };

    // Analytic gradients. With s_j = sum_k w2[j][k] and h = w1^T x:
    //   dL/dx_i    = 1 + sum_j w1[i][j] * gelu'(h_j) * s_j
    //   dL/dw1[i][j] = x_i * gelu'(h_j) * s_j
    //   dL/dw2[j][k] = gelu(h_j)
    const std::vector<double> h = detail::adapter_hidden(x, w);
    std::vector<double> s(static_cast<std::size_t>(hidden), 0.0);
    for (int j = 0; j < hidden; ++j)
        for (int k = 0; k < d; ++k) s[static_cast<std::size_t>(j)] += w.w2_at(j, k);

    double worst = 0.0;
    auto compare = [&](double analytic, double numeric) {
        const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
        const double err = std::abs(analytic - numeric) / denom;
        if (err > worst) worst = err;
    };

    std::vector<double> xv(x.begin(), x.end());
    for (int i = 0; i < d; ++i) {
        double analytic = 1.0;
        for (int j = 0; j < hidden; ++j)
            analytic += w.w1_at(i, j) * gelu_grad(h[static_cast<std::size_t>(j)]) *
                        s[static_cast<std::size_t>(j)];
        const double keep = xv[static_cast<std::size_t>(i)];
        xv[static_cast<std::size_t>(i)] = keep + step;
        const double up = probe(xv, w);
        xv[static_cast<std::size_t>(i)] = keep - step;
        const double down = probe(xv, w);
        xv[static_cast<std::size_t>(i)] = keep;
        compare(analytic, (up - down) / (2.0 * step));
    }

    AdapterWeights wv = w;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < hidden; ++j) {
            const double analytic = x[static_cast<std::size_t>(i)] *
                                    gelu_grad(h[static_cast<std::size_t>(j)]) *
                                    s[static_cast<std::size_t>(j)];
            const double keep = wv.w1_at(i, j);
            wv.w1_at(i, j) = keep + step;
            const double up = probe(x, wv);
            wv.w1_at(i, j) = keep - step;
            const double down = probe(x, wv);
            wv.w1_at(i, j) = keep;
            compare(analytic, (up - down) / (2.0 * step));
        }
    }
    for (int j = 0; j < hidden; ++j) {
        const double analytic = gelu(h[static_cast<std::size_t>(j)]);
        for (int k = 0; k < d; ++k) {
            const double keep = wv.w2_at(j, k);
            wv.w2_at(j, k) = keep + step;
            const double up = probe(x, wv);
            wv.w2_at(j, k) = keep - step;
            const double down = probe(x, wv);
            wv.w2_at(j, k) = keep;
            compare(analytic, (up - down) / (2.0 * step));
        }
    }
    return worst;
}

} // namespace vtopo
