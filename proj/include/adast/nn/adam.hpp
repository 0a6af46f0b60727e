#pragma once

#include <cmath>
#include <cstdint>

#include "adast/nn/parameter.hpp"

namespace adast::nn {

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-5;  // coupled L2: added to the gradient before the moment updates
};

struct AdamState {
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step = 0;
};

inline AdamState make_adam_state(const ParameterRefs& params) {
    AdamState state;
    for (const Parameter* p : params) {
        state.first_moment.push_back(Tensor::zeros_like(p->value));
        state.second_moment.push_back(Tensor::zeros_like(p->value));
    }
    return state;
}

/// One bias-corrected Adam update over every trainable parameter.
inline void adam_step(const ParameterRefs& params, AdamState& state, const AdamOptions& opt = {}) {
    if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
        throw StateError("adam state holds " + std::to_string(state.first_moment.size()) + " moments for " +
                         std::to_string(params.size()) + " parameters (uninitialized state?)");
    for (std::size_t i = 0; i < params.size(); ++i)
        if (state.first_moment[i].shape() != params[i]->value.shape() ||
            state.second_moment[i].shape() != params[i]->value.shape())
            throw StateError("adam state shape mismatch for parameter '" + params[i]->name + "'");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double corr1 = 1.0 - std::pow(opt.beta1, t);
    const double corr2 = 1.0 - std::pow(opt.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter& p = *params[i];
        if (!p.trainable) continue;
        Tensor& m = state.first_moment[i];
        Tensor& v = state.second_moment[i];
        for (std::size_t k = 0; k < p.value.size(); ++k) {
            const double g = p.grad[k] + opt.weight_decay * p.value[k];
            m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * g;
            v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * g * g;
            const double m_hat = m[k] / corr1;
            const double v_hat = v[k] / corr2;
            p.value[k] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
        }
    }
}

/// Owns its state; binds to a fixed parameter list.
class Adam {
public:
    Adam(ParameterRefs params, AdamOptions options = {})
        : params_(std::move(params)), options_(options), state_(make_adam_state(params_)) {}

    void zero_grad() { zero_grads(params_); }
    void step() { adam_step(params_, state_, options_); }

    const AdamState& state() const { return state_; }
    const AdamOptions& options() const { return options_; }

private:
    ParameterRefs params_;
    AdamOptions options_;
    AdamState state_;
};

}  // namespace adast::nn
