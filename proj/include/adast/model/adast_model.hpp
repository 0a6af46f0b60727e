#pragma once

#include "adast/model/model.hpp"

namespace adast::model {

/// Conv stack over the feature axis, stacked LSTM over time, and two heads
/// reading the final-step hidden state: a regression head (H outputs) and a
/// domain classifier (K logits).
class AdaSTModel final : public Model {
public:
    AdaSTModel(const HyperParams& hp, const ModelDims& dims, Rng& rng, ModelOptions options = {})
        : Model(ModelKind::adast, (validate(hp, options.enforce_grid), hp), dims, options, rng.next_u64()) {
        if (dims.domains < 2) throw ParameterError("AdaST needs at least 2 domains, got " + std::to_string(dims.domains));
        if (dims.features < 1 || dims.window < 1 || dims.horizon < 1)
            throw ParameterError("model dimensions must be positive");
        conv_ = ConvStack(dims.features, hp, rng);
        lstm_ = nn::Lstm(conv_.final_channels(), static_cast<std::size_t>(hp.lstm_hidden_size),
                         static_cast<std::size_t>(hp.num_lstm_layers), hp.dropout_lstm, rng);
        head_ = nn::Linear(static_cast<std::size_t>(hp.lstm_hidden_size), dims.horizon, rng);
        domain_head_ = nn::Linear(static_cast<std::size_t>(hp.lstm_hidden_size), dims.domains, rng);
    }

    bool has_domain_head() const override { return true; }
    std::size_t final_channels() const { return conv_.final_channels(); }

    ForwardResult forward(const Tensor& x, bool return_domain) override {
        check_input(x);
        Tensor features = conv_.forward(swap_last_axes(x), mode(), dropout_rng());
        nn::RecurrentOutput rec = lstm_.forward(swap_last_axes(features), mode(), dropout_rng());
        ForwardResult out{head_.forward(rec.h_last), std::nullopt};
        if (return_domain) out.domain_logits = domain_head_.forward(rec.h_last);
        return out;
    }

    Tensor backward(const Tensor& dy, const Tensor* d_domain) override {
        Tensor dh = head_.backward(dy);
        if (d_domain) {
            Tensor dd = domain_head_.backward(*d_domain);
            if (options().gradient_reversal) dd *= -1.0;
            dh += dd;
        }
        Tensor d_seq = lstm_.backward(nn::last_step_grad(dh, dims().window));
        return swap_last_axes(conv_.backward(swap_last_axes(d_seq)));
    }

    nn::ParameterRefs parameters() override {
        nn::ParameterRefs out;
        conv_.collect(out);
        lstm_.collect(out);
        head_.collect(out);
        domain_head_.collect(out);
        return out;
    }

    nn::ParameterRefs domain_head_parameters() {
        nn::ParameterRefs out;
        domain_head_.collect(out);
        return out;
    }

    std::vector<nn::RunningStats*> buffers() override {
        std::vector<nn::RunningStats*> out;
        conv_.collect_buffers(out);
        return out;
    }

private:
    ConvStack conv_;
    nn::Lstm lstm_;
    nn::Linear head_;
    nn::Linear domain_head_;
};

inline std::unique_ptr<AdaSTModel> build_adast(const HyperParams& hp, const ModelDims& dims, Rng& rng,
                                               ModelOptions options = {}) {
    return std::make_unique<AdaSTModel>(hp, dims, rng, options);
}

}  // namespace adast::model
