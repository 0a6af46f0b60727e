#pragma once

#include <cmath>
#include <vector>

#include "adast/nn/activation.hpp"
#include "adast/nn/parameter.hpp"

namespace adast::nn {

namespace detail {
inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Contiguous row of x[B, T, D] at (b, t).
inline const double* step_row(const Tensor& x, std::size_t b, std::size_t t) {
    return x.ptr() + (b * x.dim(1) + t) * x.dim(2);
}
inline double* step_row(Tensor& x, std::size_t b, std::size_t t) { return x.ptr() + (b * x.dim(1) + t) * x.dim(2); }
}  // namespace detail

/// x[B, T, D] with the time axis reversed.
inline Tensor reverse_time(const Tensor& x) {
    x.require_rank(3, "reverse_time");
    Tensor out(x.shape());
    const std::size_t batch = x.dim(0), len = x.dim(1), width = x.dim(2);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t t = 0; t < len; ++t) {
            const double* src = detail::step_row(x, b, t);
            std::copy(src, src + width, detail::step_row(out, b, len - 1 - t));
        }
    return out;
}

/// h_all[:, T-1, :] as a [B, H] tensor.
inline Tensor last_step(const Tensor& h_all) {
    h_all.require_rank(3, "last_step");
    const std::size_t batch = h_all.dim(0), len = h_all.dim(1), width = h_all.dim(2);
    Tensor out({batch, width});
    for (std::size_t b = 0; b < batch; ++b) {
        const double* src = detail::step_row(h_all, b, len - 1);
        std::copy(src, src + width, out.ptr() + b * width);
    }
    return out;
}

/// Scatters a [B, H] gradient into position T-1 of a zero [B, T, H] tensor.
inline Tensor last_step_grad(const Tensor& d_last, std::size_t len) {
    const std::size_t batch = d_last.dim(0), width = d_last.dim(1);
    Tensor out({batch, len, width});
    for (std::size_t b = 0; b < batch; ++b)
        std::copy(d_last.ptr() + b * width, d_last.ptr() + (b + 1) * width, detail::step_row(out, b, len - 1));
    return out;
}

/// One unidirectional LSTM layer. Gate blocks are ordered input, forget, cell, output.
class LstmLayer {
public:
    LstmLayer() = default;
    LstmLayer(std::size_t input_size, std::size_t hidden, Rng& rng)
        : hidden_(hidden),
          w_input_("w_input", Tensor({input_size, 4 * hidden})),
          w_hidden_("w_hidden", Tensor({hidden, 4 * hidden})),
          bias_("bias", Tensor({4 * hidden})) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
        init_uniform(w_input_.value, bound, rng);
        init_uniform(w_hidden_.value, bound, rng);
        init_uniform(bias_.value, bound, rng);
        for (std::size_t j = hidden; j < 2 * hidden; ++j) bias_.value[j] = 1.0;
    }

    std::size_t input_size() const { return w_input_.value.dim(0); }
    std::size_t hidden_size() const { return hidden_; }

    /// x[B, T, D] -> h_all[B, T, H], zero initial state.
    Tensor forward(const Tensor& x) {
        x.require_rank(3, "lstm input");
        if (x.dim(2) != input_size())
            throw DimensionError("lstm: input width " + std::to_string(x.dim(2)) + " does not match layer input " +
                                 std::to_string(input_size()));
        const std::size_t batch = x.dim(0), len = x.dim(1), in = x.dim(2), hs = hidden_, gw = 4 * hidden_;
        input_ = x;
        gates_.assign(len * batch * gw, 0.0);
        cells_.assign((len + 1) * batch * hs, 0.0);
        hiddens_.assign((len + 1) * batch * hs, 0.0);
        tanh_c_.assign(len * batch * hs, 0.0);
        Tensor h_all({batch, len, hs});
        const double* wx = w_input_.value.ptr();
        const double* wh = w_hidden_.value.ptr();
        for (std::size_t t = 0; t < len; ++t) {
            double* g = gates_.data() + t * batch * gw;
            const double* h_prev = hiddens_.data() + t * batch * hs;
            const double* c_prev = cells_.data() + t * batch * hs;
            double* h_cur = hiddens_.data() + (t + 1) * batch * hs;
            double* c_cur = cells_.data() + (t + 1) * batch * hs;
            double* tc = tanh_c_.data() + t * batch * hs;
            for (std::size_t b = 0; b < batch; ++b) {
                double* gb = g + b * gw;
                std::copy(bias_.value.ptr(), bias_.value.ptr() + gw, gb);
                gemm_acc(1, in, gw, detail::step_row(x, b, t), wx, gb);
                gemm_acc(1, hs, gw, h_prev + b * hs, wh, gb);
                for (std::size_t k = 0; k < hs; ++k) {
                    const double ig = detail::sigmoid(gb[k]);
                    const double fg = detail::sigmoid(gb[hs + k]);
                    const double cg = std::tanh(gb[2 * hs + k]);
                    const double og = detail::sigmoid(gb[3 * hs + k]);
                    gb[k] = ig;
                    gb[hs + k] = fg;
                    gb[2 * hs + k] = cg;
                    gb[3 * hs + k] = og;
                    const double c = fg * c_prev[b * hs + k] + ig * cg;
                    c_cur[b * hs + k] = c;
                    tc[b * hs + k] = std::tanh(c);
                    h_cur[b * hs + k] = og * tc[b * hs + k];
                }
                std::copy(h_cur + b * hs, h_cur + (b + 1) * hs, detail::step_row(h_all, b, t));
            }
        }
        return h_all;
    }

    /// Backpropagation through time; dh_all is the gradient w.r.t. every output step.
    Tensor backward(const Tensor& dh_all) {
        const std::size_t batch = input_.dim(0), len = input_.dim(1), in = input_.dim(2), hs = hidden_,
                          gw = 4 * hidden_;
        if (dh_all.shape() != Shape{batch, len, hs}) throw DimensionError("lstm backward: gradient shape mismatch");
        Tensor dx(input_.shape());
        std::vector<double> dh_next(batch * hs, 0.0), dc_next(batch * hs, 0.0), dpre(gw);
        std::vector<double> dh_prev(batch * hs);
        double* dwx = w_input_.grad.ptr();
        double* dwh = w_hidden_.grad.ptr();
        double* db = bias_.grad.ptr();
        const double* wx = w_input_.value.ptr();
        const double* wh = w_hidden_.value.ptr();
        for (std::size_t t = len; t-- > 0;) {
            const double* g = gates_.data() + t * batch * gw;
            const double* c_prev = cells_.data() + t * batch * hs;
            const double* h_prev = hiddens_.data() + t * batch * hs;
            const double* tc = tanh_c_.data() + t * batch * hs;
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            for (std::size_t b = 0; b < batch; ++b) {
                const double* gb = g + b * gw;
                const double* dho = detail::step_row(dh_all, b, t);
                for (std::size_t k = 0; k < hs; ++k) {
                    const std::size_t bk = b * hs + k;
                    const double ig = gb[k], fg = gb[hs + k], cg = gb[2 * hs + k], og = gb[3 * hs + k];
                    const double dh = dho[k] + dh_next[bk];
                    const double dc = dc_next[bk] + dh * og * (1.0 - tc[bk] * tc[bk]);
                    dpre[k] = dc * cg * ig * (1.0 - ig);
                    dpre[hs + k] = dc * c_prev[bk] * fg * (1.0 - fg);
                    dpre[2 * hs + k] = dc * ig * (1.0 - cg * cg);
                    dpre[3 * hs + k] = dh * tc[bk] * og * (1.0 - og);
                    dc_next[bk] = dc * fg;
                }
                gemm_at_b_acc(1, in, gw, detail::step_row(input_, b, t), dpre.data(), dwx);
                gemm_at_b_acc(1, hs, gw, h_prev + b * hs, dpre.data(), dwh);
                for (std::size_t j = 0; j < gw; ++j) db[j] += dpre[j];
                gemm_a_bt_acc(1, gw, in, dpre.data(), wx, detail::step_row(dx, b, t));
                gemm_a_bt_acc(1, gw, hs, dpre.data(), wh, dh_prev.data() + b * hs);
            }
            dh_next.swap(dh_prev);
        }
        return dx;
    }

    void collect(ParameterRefs& out) {
        out.push_back(&w_input_);
        out.push_back(&w_hidden_);
        out.push_back(&bias_);
    }

private:
    std::size_t hidden_ = 0;
    Parameter w_input_;
    Parameter w_hidden_;
    Parameter bias_;
    Tensor input_;
    std::vector<double> gates_, cells_, hiddens_, tanh_c_;
};

/// One unidirectional GRU layer. Gate blocks are ordered reset, update, candidate;
/// the candidate's hidden bias sits inside the reset product.
class GruLayer {
public:
    GruLayer() = default;
    GruLayer(std::size_t input_size, std::size_t hidden, Rng& rng)
        : hidden_(hidden),
          w_input_("w_input", Tensor({input_size, 3 * hidden})),
          w_hidden_("w_hidden", Tensor({hidden, 3 * hidden})),
          bias_input_("bias_input", Tensor({3 * hidden})),
          bias_candidate_("bias_candidate", Tensor({hidden})) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
        init_uniform(w_input_.value, bound, rng);
        init_uniform(w_hidden_.value, bound, rng);
        init_uniform(bias_input_.value, bound, rng);
        init_uniform(bias_candidate_.value, bound, rng);
    }

    std::size_t input_size() const { return w_input_.value.dim(0); }
    std::size_t hidden_size() const { return hidden_; }

    Tensor forward(const Tensor& x) {
        x.require_rank(3, "gru input");
        if (x.dim(2) != input_size())
            throw DimensionError("gru: input width " + std::to_string(x.dim(2)) + " does not match layer input " +
                                 std::to_string(input_size()));
        const std::size_t batch = x.dim(0), len = x.dim(1), in = x.dim(2), hs = hidden_, gw = 3 * hidden_;
        input_ = x;
        gates_.assign(len * batch * gw, 0.0);       // r, z, n after activation
        hidden_cand_.assign(len * batch * hs, 0.0);  // W_hn h + b_hn
        hiddens_.assign((len + 1) * batch * hs, 0.0);
        Tensor h_all({batch, len, hs});
        std::vector<double> ah(gw);
        for (std::size_t t = 0; t < len; ++t) {
            double* g = gates_.data() + t * batch * gw;
            double* hc = hidden_cand_.data() + t * batch * hs;
            const double* h_prev = hiddens_.data() + t * batch * hs;
            double* h_cur = hiddens_.data() + (t + 1) * batch * hs;
            for (std::size_t b = 0; b < batch; ++b) {
                double* gb = g + b * gw;
                std::copy(bias_input_.value.ptr(), bias_input_.value.ptr() + gw, gb);
                gemm_acc(1, in, gw, detail::step_row(x, b, t), w_input_.value.ptr(), gb);
                std::fill(ah.begin(), ah.end(), 0.0);
                gemm_acc(1, hs, gw, h_prev + b * hs, w_hidden_.value.ptr(), ah.data());
                for (std::size_t k = 0; k < hs; ++k) {
                    const double r = detail::sigmoid(gb[k] + ah[k]);
                    const double z = detail::sigmoid(gb[hs + k] + ah[hs + k]);
                    const double hn = ah[2 * hs + k] + bias_candidate_.value[k];
                    const double n = std::tanh(gb[2 * hs + k] + r * hn);
                    gb[k] = r;
                    gb[hs + k] = z;
                    gb[2 * hs + k] = n;
                    hc[b * hs + k] = hn;
                    h_cur[b * hs + k] = (1.0 - z) * n + z * h_prev[b * hs + k];
                }
                std::copy(h_cur + b * hs, h_cur + (b + 1) * hs, detail::step_row(h_all, b, t));
            }
        }
        return h_all;
    }

    Tensor backward(const Tensor& dh_all) {
        const std::size_t batch = input_.dim(0), len = input_.dim(1), in = input_.dim(2), hs = hidden_,
                          gw = 3 * hidden_;
        if (dh_all.shape() != Shape{batch, len, hs}) throw DimensionError("gru backward: gradient shape mismatch");
        Tensor dx(input_.shape());
        std::vector<double> dh_next(batch * hs, 0.0), dh_prev(batch * hs), dax(gw), dah(gw);
        for (std::size_t t = len; t-- > 0;) {
            const double* g = gates_.data() + t * batch * gw;
            const double* hc = hidden_cand_.data() + t * batch * hs;
            const double* h_prev = hiddens_.data() + t * batch * hs;
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            for (std::size_t b = 0; b < batch; ++b) {
                const double* gb = g + b * gw;
                const double* dho = detail::step_row(dh_all, b, t);
                for (std::size_t k = 0; k < hs; ++k) {
                    const std::size_t bk = b * hs + k;
                    const double r = gb[k], z = gb[hs + k], n = gb[2 * hs + k];
                    const double dh = dho[k] + dh_next[bk];
                    const double dn_pre = dh * (1.0 - z) * (1.0 - n * n);
                    const double dz_pre = dh * (h_prev[bk] - n) * z * (1.0 - z);
                    const double dr_pre = dn_pre * hc[bk] * r * (1.0 - r);
                    dax[k] = dr_pre;
                    dax[hs + k] = dz_pre;
                    dax[2 * hs + k] = dn_pre;
                    dah[k] = dr_pre;
                    dah[hs + k] = dz_pre;
                    dah[2 * hs + k] = dn_pre * r;
                    bias_candidate_.grad[k] += dn_pre * r;
                    dh_prev[bk] += dh * z;
                }
                gemm_at_b_acc(1, in, gw, detail::step_row(input_, b, t), dax.data(), w_input_.grad.ptr());
                gemm_at_b_acc(1, hs, gw, h_prev + b * hs, dah.data(), w_hidden_.grad.ptr());
                for (std::size_t j = 0; j < gw; ++j) bias_input_.grad[j] += dax[j];
                gemm_a_bt_acc(1, gw, in, dax.data(), w_input_.value.ptr(), detail::step_row(dx, b, t));
                gemm_a_bt_acc(1, gw, hs, dah.data(), w_hidden_.value.ptr(), dh_prev.data() + b * hs);
            }
            dh_next.swap(dh_prev);
        }
        return dx;
    }

    void collect(ParameterRefs& out) {
        out.push_back(&w_input_);
        out.push_back(&w_hidden_);
        out.push_back(&bias_input_);
        out.push_back(&bias_candidate_);
    }

private:
    std::size_t hidden_ = 0;
    Parameter w_input_;
    Parameter w_hidden_;
    Parameter bias_input_;
    Parameter bias_candidate_;
    Tensor input_;
    std::vector<double> gates_, hidden_cand_, hiddens_;
};

struct RecurrentOutput {
    Tensor h_all;   // [B, T, H]
    Tensor h_last;  // [B, H], equal to h_all[:, T-1, :]
};

/// Stacked recurrent layers with dropout between consecutive layers (train mode only).
template <typename Layer>
class RecurrentStack {
public:
    RecurrentStack() = default;
    RecurrentStack(std::size_t input_size, std::size_t hidden, std::size_t num_layers, double dropout_rate, Rng& rng)
        : dropout_rate_(dropout_rate) {
        if (num_layers == 0) throw ParameterError("recurrent stack needs at least one layer");
        check_dropout_rate(dropout_rate);
        for (std::size_t l = 0; l < num_layers; ++l) {
            layers_.emplace_back(l == 0 ? input_size : hidden, hidden, rng);
            if (l + 1 < num_layers) dropouts_.emplace_back(dropout_rate);
        }
    }

    RecurrentOutput forward(const Tensor& x, Mode mode, Rng& rng) {
        x.require_rank(3, "recurrent stack input");
        if (x.dim(2) != input_size())
            throw DimensionError("recurrent stack: input width " + std::to_string(x.dim(2)) +
                                 " does not match first-layer input " + std::to_string(input_size()));
        Tensor h = x;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            h = layers_[l].forward(h);
            if (l < dropouts_.size()) h = dropouts_[l].forward(h, mode, rng);
        }
        Tensor last = last_step(h);
        return {std::move(h), std::move(last)};
    }

    Tensor backward(const Tensor& dh_all) {
        Tensor g = dh_all;
        for (std::size_t l = layers_.size(); l-- > 0;) {
            if (l < dropouts_.size()) g = dropouts_[l].backward(g);
            g = layers_[l].backward(g);
        }
        return g;
    }

    void collect(ParameterRefs& out) {
        for (auto& layer : layers_) layer.collect(out);
    }

    std::size_t input_size() const { return layers_.front().input_size(); }
    std::size_t hidden_size() const { return layers_.front().hidden_size(); }
    std::size_t num_layers() const { return layers_.size(); }
    double dropout_rate() const { return dropout_rate_; }

private:
    double dropout_rate_ = 0.0;
    std::vector<Layer> layers_;
    std::vector<Dropout> dropouts_;
};

using Lstm = RecurrentStack<LstmLayer>;
using Gru = RecurrentStack<GruLayer>;

/// Stacked bidirectional LSTM. Each layer concatenates forward and backward
/// hidden states per step; `h_last` joins the forward state at T-1 with the
/// backward state at step 0 (each direction's final state).
class BiLstm {
public:
    BiLstm() = default;
    BiLstm(std::size_t input_size, std::size_t hidden, std::size_t num_layers, double dropout_rate, Rng& rng) {
        if (num_layers == 0) throw ParameterError("bilstm needs at least one layer");
        check_dropout_rate(dropout_rate);
        for (std::size_t l = 0; l < num_layers; ++l) {
            const std::size_t in = l == 0 ? input_size : 2 * hidden;
            forward_.emplace_back(in, hidden, rng);
            backward_.emplace_back(in, hidden, rng);
            if (l + 1 < num_layers) dropouts_.emplace_back(dropout_rate);
        }
    }

    RecurrentOutput forward(const Tensor& x, Mode mode, Rng& rng) {
        x.require_rank(3, "bilstm input");
        if (x.dim(2) != forward_.front().input_size())
            throw DimensionError("bilstm: input width does not match first-layer input");
        Tensor h = x;
        for (std::size_t l = 0; l < forward_.size(); ++l) {
            Tensor fwd = forward_[l].forward(h);
            Tensor bwd = reverse_time(backward_[l].forward(reverse_time(h)));
            h = concat(fwd, bwd);
            if (l < dropouts_.size()) h = dropouts_[l].forward(h, mode, rng);
        }
        const std::size_t batch = h.dim(0), len = h.dim(1), hs = hidden_size();
        Tensor last({batch, 2 * hs});
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t k = 0; k < hs; ++k) {
                last.at(b, k) = h.at(b, len - 1, k);
                last.at(b, hs + k) = h.at(b, 0, hs + k);
            }
        return {std::move(h), std::move(last)};
    }

    /// Gradient w.r.t. the [B, 2H] final-state vector only.
    Tensor backward_last(const Tensor& d_last, std::size_t len) {
        const std::size_t batch = d_last.dim(0), hs = hidden_size();
        Tensor g({batch, len, 2 * hs});
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t k = 0; k < hs; ++k) {
                g.at(b, len - 1, k) = d_last.at(b, k);
                g.at(b, 0, hs + k) = d_last.at(b, hs + k);
            }
        return backward(g);
    }

    Tensor backward(const Tensor& dh_all) {
        Tensor g = dh_all;
        const std::size_t hs = hidden_size();
        for (std::size_t l = forward_.size(); l-- > 0;) {
            if (l < dropouts_.size()) g = dropouts_[l].backward(g);
            const std::size_t batch = g.dim(0), len = g.dim(1);
            Tensor gf({batch, len, hs}), gb({batch, len, hs});
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t t = 0; t < len; ++t)
                    for (std::size_t k = 0; k < hs; ++k) {
                        gf.at(b, t, k) = g.at(b, t, k);
                        gb.at(b, t, k) = g.at(b, t, hs + k);
                    }
            Tensor dx = forward_[l].backward(gf);
            dx += reverse_time(backward_[l].backward(reverse_time(gb)));
            g = std::move(dx);
        }
        return g;
    }

    void collect(ParameterRefs& out) {
        for (std::size_t l = 0; l < forward_.size(); ++l) {
            forward_[l].collect(out);
            backward_[l].collect(out);
        }
    }

    std::size_t hidden_size() const { return forward_.front().hidden_size(); }
    std::size_t output_size() const { return 2 * hidden_size(); }

private:
    static Tensor concat(const Tensor& a, const Tensor& b) {
        const std::size_t batch = a.dim(0), len = a.dim(1), wa = a.dim(2), wb = b.dim(2);
        Tensor out({batch, len, wa + wb});
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t t = 0; t < len; ++t) {
                for (std::size_t k = 0; k < wa; ++k) out.at(i, t, k) = a.at(i, t, k);
                for (std::size_t k = 0; k < wb; ++k) out.at(i, t, wa + k) = b.at(i, t, k);
            }
        return out;
    }

    std::vector<LstmLayer> forward_;
    std::vector<LstmLayer> backward_;
    std::vector<Dropout> dropouts_;
};

}  // namespace adast::nn
