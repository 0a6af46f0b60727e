#pragma once

#include "adast/nn/parameter.hpp"

namespace adast::nn {

inline Tensor relu(const Tensor& x) {
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    return y;
}

/// Gradient flows only where x > 0; the subgradient at 0 is 0.
inline Tensor relu_backward(const Tensor& x, const Tensor& dy) {
    Tensor::require_same_shape(x, dy, "relu backward");
    Tensor dx(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
    return dx;
}

inline void check_dropout_rate(double p) {
    if (!(p >= 0.0 && p < 1.0)) throw ParameterError("dropout rate must lie in [0, 1), got " + std::to_string(p));
}

/// Inverted dropout: survivors are scaled by 1/(1-p), so eval mode is the identity.
/// When `mask` is given it receives the per-element multiplier for the backward pass.
inline Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng, Tensor* mask = nullptr) {
    check_dropout_rate(p);
    if (mode == Mode::eval || p == 0.0) {
        if (mask) *mask = Tensor(x.shape(), 1.0);
        return x;
    }
    const double keep_scale = 1.0 / (1.0 - p);
    Tensor m(x.shape());
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = rng.uniform() < p ? 0.0 : keep_scale;
        y[i] = x[i] * m[i];
    }
    if (mask) *mask = std::move(m);
    return y;
}

class Dropout {
public:
    Dropout() = default;
    explicit Dropout(double p) : p_(p) { check_dropout_rate(p); }

    Tensor forward(const Tensor& x, Mode mode, Rng& rng) { return dropout(x, p_, mode, rng, &mask_); }

    Tensor backward(const Tensor& dy) const {
        Tensor dx(dy.shape());
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask_[i];
        return dx;
    }

    double rate() const { return p_; }

private:
    double p_ = 0.0;
    Tensor mask_;
};

}  // namespace adast::nn
