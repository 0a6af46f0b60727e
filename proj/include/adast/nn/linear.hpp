#pragma once

#include <cmath>

#include "adast/nn/parameter.hpp"

namespace adast::nn {

/// x[B, D] * W[D, O] + b[O]
inline Tensor linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    x.require_rank(2, "linear input");
    weight.require_rank(2, "linear weight");
    if (x.dim(1) != weight.dim(0))
        throw DimensionError("linear: input width " + std::to_string(x.dim(1)) + " does not match weight rows " +
                             std::to_string(weight.dim(0)));
    if (bias.shape() != Shape{weight.dim(1)}) throw DimensionError("linear: bias length does not match outputs");
    const std::size_t batch = x.dim(0), in = x.dim(1), out = weight.dim(1);
    Tensor y({batch, out});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < out; ++o) y.at(b, o) = bias[o];
    gemm_acc(batch, in, out, x.ptr(), weight.ptr(), y.ptr());
    return y;
}

struct LinearGrads {
    Tensor dx;
    Tensor dweight;
    Tensor dbias;
};

inline LinearGrads linear_backward(const Tensor& x, const Tensor& weight, const Tensor& dy) {
    const std::size_t batch = x.dim(0), in = x.dim(1), out = weight.dim(1);
    if (dy.shape() != Shape{batch, out}) throw DimensionError("linear backward: gradient shape mismatch");
    LinearGrads g{Tensor(x.shape()), Tensor(weight.shape()), Tensor({out})};
    gemm_a_bt_acc(batch, out, in, dy.ptr(), weight.ptr(), g.dx.ptr());
    gemm_at_b_acc(batch, in, out, x.ptr(), dy.ptr(), g.dweight.ptr());
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < out; ++o) g.dbias[o] += dy.at(b, o);
    return g;
}

class Linear {
public:
    Linear() = default;
    Linear(std::size_t in, std::size_t out, Rng& rng)
        : weight_("weight", Tensor({in, out})), bias_("bias", Tensor({out})) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        init_uniform(weight_.value, bound, rng);
        init_uniform(bias_.value, bound, rng);
    }

    Tensor forward(const Tensor& x) {
        input_ = x;
        return linear_forward(x, weight_.value, bias_.value);
    }

    Tensor backward(const Tensor& dy) {
        LinearGrads g = linear_backward(input_, weight_.value, dy);
        weight_.grad += g.dweight;
        bias_.grad += g.dbias;
        return std::move(g.dx);
    }

    void collect(ParameterRefs& out) {
        out.push_back(&weight_);
        out.push_back(&bias_);
    }

    std::size_t in_features() const { return weight_.value.dim(0); }
    std::size_t out_features() const { return weight_.value.dim(1); }
    Parameter& weight() { return weight_; }
    Parameter& bias() { return bias_; }

private:
    Parameter weight_;
    Parameter bias_;
    Tensor input_;
};

}  // namespace adast::nn
