#pragma once

#include <cmath>

#include "adast/nn/parameter.hpp"

namespace adast::nn {

struct RunningStats {
    Tensor mean;
    Tensor var;
    double momentum = 0.1;
    double eps = 1e-5;

    RunningStats() = default;
    explicit RunningStats(std::size_t channels) : mean({channels}, 0.0), var({channels}, 1.0) {}
};

/// Intermediate values kept for the backward pass.
struct BatchNormCache {
    Tensor xhat;
    Tensor inv_std;  // [C]
    Mode mode = Mode::train;
};

/// Per-channel normalization over the B and T axes of x[B, C, T].
/// Train mode uses batch statistics and updates `stats`; eval mode reads them.
inline Tensor batchnorm1d_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta, RunningStats& stats,
                                  Mode mode, BatchNormCache* cache = nullptr) {
    x.require_rank(3, "batchnorm1d input");
    const std::size_t batch = x.dim(0), chans = x.dim(1), len = x.dim(2);
    if (gamma.shape() != Shape{chans} || beta.shape() != Shape{chans} || stats.mean.shape() != Shape{chans} ||
        stats.var.shape() != Shape{chans})
        throw DimensionError("batchnorm1d: parameter length does not match " + std::to_string(chans) + " channels");
    const std::size_t n = batch * len;
    if (mode == Mode::train && n < 2)
        throw DegenerateBatchError("batchnorm1d: need at least 2 values per channel in train mode, got " +
                                   std::to_string(n));

    Tensor y(x.shape());
    Tensor xhat(x.shape());
    Tensor inv_std({chans});
    for (std::size_t c = 0; c < chans; ++c) {
        double mean, var;
        if (mode == Mode::train) {
            double s = 0.0;
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t t = 0; t < len; ++t) s += x.at(b, c, t);
            mean = s / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t t = 0; t < len; ++t) {
                    const double d = x.at(b, c, t) - mean;
                    ss += d * d;
                }
            var = ss / static_cast<double>(n);
            const double unbiased = ss / static_cast<double>(n - 1);
            stats.mean[c] = (1.0 - stats.momentum) * stats.mean[c] + stats.momentum * mean;
            stats.var[c] = (1.0 - stats.momentum) * stats.var[c] + stats.momentum * unbiased;
        } else {
            mean = stats.mean[c];
            var = stats.var[c];
        }
        const double is = 1.0 / std::sqrt(var + stats.eps);
        inv_std[c] = is;
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t t = 0; t < len; ++t) {
                const double h = (x.at(b, c, t) - mean) * is;
                xhat.at(b, c, t) = h;
                y.at(b, c, t) = gamma[c] * h + beta[c];
            }
    }
    if (cache) *cache = BatchNormCache{std::move(xhat), std::move(inv_std), mode};
    return y;
}

struct BatchNormGrads {
    Tensor dx;
    Tensor dgamma;
    Tensor dbeta;
};

inline BatchNormGrads batchnorm1d_backward(const BatchNormCache& cache, const Tensor& gamma, const Tensor& dy) {
    Tensor::require_same_shape(cache.xhat, dy, "batchnorm1d backward");
    const std::size_t batch = dy.dim(0), chans = dy.dim(1), len = dy.dim(2);
    const double n = static_cast<double>(batch * len);
    BatchNormGrads g{Tensor(dy.shape()), Tensor({chans}), Tensor({chans})};
    for (std::size_t c = 0; c < chans; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t t = 0; t < len; ++t) {
                sum_dy += dy.at(b, c, t);
                sum_dy_xhat += dy.at(b, c, t) * cache.xhat.at(b, c, t);
            }
        g.dbeta[c] = sum_dy;
        g.dgamma[c] = sum_dy_xhat;
        const double scale = gamma[c] * cache.inv_std[c];
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t t = 0; t < len; ++t) {
                if (cache.mode == Mode::train)
                    g.dx.at(b, c, t) =
                        scale * (dy.at(b, c, t) - sum_dy / n - cache.xhat.at(b, c, t) * sum_dy_xhat / n);
                else
                    g.dx.at(b, c, t) = scale * dy.at(b, c, t);
            }
    }
    return g;
}

class BatchNorm1d {
public:
    BatchNorm1d() = default;
    explicit BatchNorm1d(std::size_t channels)
        : gamma_("gamma", Tensor({channels}, 1.0)), beta_("beta", Tensor({channels})), stats_(channels) {}

    Tensor forward(const Tensor& x, Mode mode) {
        return batchnorm1d_forward(x, gamma_.value, beta_.value, stats_, mode, &cache_);
    }

    Tensor backward(const Tensor& dy) {
        BatchNormGrads g = batchnorm1d_backward(cache_, gamma_.value, dy);
        gamma_.grad += g.dgamma;
        beta_.grad += g.dbeta;
        return std::move(g.dx);
    }

    void collect(ParameterRefs& out) {
        out.push_back(&gamma_);
        out.push_back(&beta_);
    }

    RunningStats& stats() { return stats_; }
    const RunningStats& stats() const { return stats_; }

private:
    Parameter gamma_;
    Parameter beta_;
    RunningStats stats_;
    BatchNormCache cache_;
};

}  // namespace adast::nn
