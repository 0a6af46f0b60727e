#pragma once

#include <cmath>

#include "adast/nn/parameter.hpp"

namespace adast::nn {

inline constexpr std::size_t kConvKernel = 3;

struct Conv1dGrads {
    Tensor dx;
    Tensor dweight;
    Tensor dbias;
};

namespace detail {
inline void check_conv_shapes(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    x.require_rank(3, "conv1d input");
    weight.require_rank(3, "conv1d weight");
    bias.require_rank(1, "conv1d bias");
    if (weight.dim(2) != kConvKernel)
        throw DimensionError("conv1d kernel width must be 3, got " + std::to_string(weight.dim(2)));
    if (weight.dim(1) != x.dim(1))
        throw DimensionError("conv1d: input has " + std::to_string(x.dim(1)) + " channels, weight expects " +
                             std::to_string(weight.dim(1)));
    if (bias.dim(0) != weight.dim(0)) throw DimensionError("conv1d: bias length does not match output channels");
}
}  // namespace detail

/// Kernel 3, stride 1, zero padding 1: [B, C_in, T] -> [B, C_out, T].
inline Tensor conv1d_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    detail::check_conv_shapes(x, weight, bias);
    const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2), cout = weight.dim(0);
    Tensor y({batch, cout, len});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < cout; ++o) {
            double* yrow = &y.at(b, o, 0);
            for (std::size_t t = 0; t < len; ++t) yrow[t] = bias[o];
            for (std::size_t c = 0; c < cin; ++c) {
                const double* xrow = x.ptr() + (b * cin + c) * len;
                const double w0 = weight.at(o, c, 0), w1 = weight.at(o, c, 1), w2 = weight.at(o, c, 2);
                for (std::size_t t = 0; t < len; ++t) {
                    double s = w1 * xrow[t];
                    if (t > 0) s += w0 * xrow[t - 1];
                    if (t + 1 < len) s += w2 * xrow[t + 1];
                    yrow[t] += s;
                }
            }
        }
    return y;
}

inline Conv1dGrads conv1d_backward(const Tensor& x, const Tensor& weight, const Tensor& dy) {
    const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2), cout = weight.dim(0);
    if (dy.shape() != Shape{batch, cout, len}) throw DimensionError("conv1d backward: gradient shape mismatch");
    Conv1dGrads g{Tensor::zeros_like(x), Tensor::zeros_like(weight), Tensor({cout})};
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < cout; ++o) {
            const double* grow = dy.ptr() + (b * cout + o) * len;
            for (std::size_t t = 0; t < len; ++t) g.dbias[o] += grow[t];
            for (std::size_t c = 0; c < cin; ++c) {
                const double* xrow = x.ptr() + (b * cin + c) * len;
                double* dxrow = &g.dx.at(b, c, 0);
                const double w0 = weight.at(o, c, 0), w1 = weight.at(o, c, 1), w2 = weight.at(o, c, 2);
                double s0 = 0.0, s1 = 0.0, s2 = 0.0;
                for (std::size_t t = 0; t < len; ++t) {
                    const double gv = grow[t];
                    s1 += gv * xrow[t];
                    dxrow[t] += w1 * gv;
                    if (t > 0) {
                        s0 += gv * xrow[t - 1];
                        dxrow[t - 1] += w0 * gv;
                    }
                    if (t + 1 < len) {
                        s2 += gv * xrow[t + 1];
                        dxrow[t + 1] += w2 * gv;
                    }
                }
                g.dweight.at(o, c, 0) += s0;
                g.dweight.at(o, c, 1) += s1;
                g.dweight.at(o, c, 2) += s2;
            }
        }
    return g;
}

class Conv1d {
public:
    Conv1d() = default;
    Conv1d(std::size_t in_channels, std::size_t out_channels, Rng& rng)
        : weight_("weight", Tensor({out_channels, in_channels, kConvKernel})), bias_("bias", Tensor({out_channels})) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kConvKernel));
        init_uniform(weight_.value, bound, rng);
        init_uniform(bias_.value, bound, rng);
    }

    Tensor forward(const Tensor& x) {
        input_ = x;
        return conv1d_forward(x, weight_.value, bias_.value);
    }

    Tensor backward(const Tensor& dy) {
        Conv1dGrads g = conv1d_backward(input_, weight_.value, dy);
        weight_.grad += g.dweight;
        bias_.grad += g.dbias;
        return std::move(g.dx);
    }

    void collect(ParameterRefs& out) {
        out.push_back(&weight_);
        out.push_back(&bias_);
    }

    std::size_t in_channels() const { return weight_.value.dim(1); }
    std::size_t out_channels() const { return weight_.value.dim(0); }
    Parameter& weight() { return weight_; }
    Parameter& bias() { return bias_; }

private:
    Parameter weight_;
    Parameter bias_;
    Tensor input_;
};

}  // namespace adast::nn
