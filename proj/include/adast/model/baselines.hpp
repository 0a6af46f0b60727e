#pragma once

#include "adast/model/adast_model.hpp"

namespace adast::model {

/// flatten(W*F) -> ReLU(lstm_hidden) -> ReLU(lstm_hidden) -> H
class MlpModel final : public Model {
public:
    MlpModel(const HyperParams& hp, const ModelDims& dims, Rng& rng, ModelOptions options)
        : Model(ModelKind::mlp, hp, dims, options, rng.next_u64()) {
        const auto width = static_cast<std::size_t>(hp.lstm_hidden_size);
        fc1_ = nn::Linear(dims.window * dims.features, width, rng);
        fc2_ = nn::Linear(width, width, rng);
        out_ = nn::Linear(width, dims.horizon, rng);
    }

    std::size_t input_size() const { return fc1_.in_features(); }

    ForwardResult forward(const Tensor& x, bool) override {
        check_input(x);
        h1_ = fc1_.forward(x.reshaped({x.dim(0), dims().window * dims().features}));
        h2_ = fc2_.forward(nn::relu(h1_));
        return {out_.forward(nn::relu(h2_)), std::nullopt};
    }

    Tensor backward(const Tensor& dy, const Tensor*) override {
        Tensor g = nn::relu_backward(h2_, out_.backward(dy));
        g = nn::relu_backward(h1_, fc2_.backward(g));
        g = fc1_.backward(g);
        return g.reshaped({g.dim(0), dims().window, dims().features});
    }

    nn::ParameterRefs parameters() override {
        nn::ParameterRefs out;
        fc1_.collect(out);
        fc2_.collect(out);
        out_.collect(out);
        return out;
    }

private:
    nn::Linear fc1_, fc2_, out_;
    Tensor h1_, h2_;
};

/// Conv stack, mean over time, linear head.
class CnnModel final : public Model {
public:
    CnnModel(const HyperParams& hp, const ModelDims& dims, Rng& rng, ModelOptions options)
        : Model(ModelKind::cnn, hp, dims, options, rng.next_u64()) {
        conv_ = ConvStack(dims.features, hp, rng);
        head_ = nn::Linear(conv_.final_channels(), dims.horizon, rng);
    }

    ForwardResult forward(const Tensor& x, bool) override {
        check_input(x);
        Tensor h = conv_.forward(swap_last_axes(x), mode(), dropout_rng());
        const std::size_t batch = h.dim(0), chans = h.dim(1), len = h.dim(2);
        Tensor pooled({batch, chans});
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t c = 0; c < chans; ++c) {
                double s = 0.0;
                for (std::size_t t = 0; t < len; ++t) s += h.at(b, c, t);
                pooled.at(b, c) = s / static_cast<double>(len);
            }
        return {head_.forward(pooled), std::nullopt};
    }

    Tensor backward(const Tensor& dy, const Tensor*) override {
        Tensor dp = head_.backward(dy);
        const std::size_t batch = dp.dim(0), chans = dp.dim(1), len = dims().window;
        Tensor dh({batch, chans, len});
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t c = 0; c < chans; ++c)
                for (std::size_t t = 0; t < len; ++t) dh.at(b, c, t) = dp.at(b, c) / static_cast<double>(len);
        return swap_last_axes(conv_.backward(dh));
    }

    nn::ParameterRefs parameters() override {
        nn::ParameterRefs out;
        conv_.collect(out);
        head_.collect(out);
        return out;
    }

    std::vector<nn::RunningStats*> buffers() override {
        std::vector<nn::RunningStats*> out;
        conv_.collect_buffers(out);
        return out;
    }

private:
    ConvStack conv_;
    nn::Linear head_;
};

/// Bidirectional LSTM on raw features; both directions' final states feed the head.
class BiLstmModel final : public Model {
public:
    BiLstmModel(const HyperParams& hp, const ModelDims& dims, Rng& rng, ModelOptions options)
        : Model(ModelKind::bilstm, hp, dims, options, rng.next_u64()) {
        rnn_ = nn::BiLstm(dims.features, static_cast<std::size_t>(hp.lstm_hidden_size),
                          static_cast<std::size_t>(hp.num_lstm_layers), hp.dropout_lstm, rng);
        head_ = nn::Linear(rnn_.output_size(), dims.horizon, rng);
    }

    std::size_t head_input_size() const { return head_.in_features(); }

    ForwardResult forward(const Tensor& x, bool) override {
        check_input(x);
        nn::RecurrentOutput rec = rnn_.forward(x, mode(), dropout_rng());
        return {head_.forward(rec.h_last), std::nullopt};
    }

    Tensor backward(const Tensor& dy, const Tensor*) override {
        return rnn_.backward_last(head_.backward(dy), dims().window);
    }

    nn::ParameterRefs parameters() override {
        nn::ParameterRefs out;
        rnn_.collect(out);
        head_.collect(out);
        return out;
    }

private:
    nn::BiLstm rnn_;
    nn::Linear head_;
};

class GruModel final : public Model {
public:
    GruModel(const HyperParams& hp, const ModelDims& dims, Rng& rng, ModelOptions options)
        : Model(ModelKind::gru, hp, dims, options, rng.next_u64()) {
        rnn_ = nn::Gru(dims.features, static_cast<std::size_t>(hp.lstm_hidden_size),
                       static_cast<std::size_t>(hp.num_lstm_layers), hp.dropout_lstm, rng);
        head_ = nn::Linear(static_cast<std::size_t>(hp.lstm_hidden_size), dims.horizon, rng);
    }

    ForwardResult forward(const Tensor& x, bool) override {
        check_input(x);
        nn::RecurrentOutput rec = rnn_.forward(x, mode(), dropout_rng());
        return {head_.forward(rec.h_last), std::nullopt};
    }

    Tensor backward(const Tensor& dy, const Tensor*) override {
        return rnn_.backward(nn::last_step_grad(head_.backward(dy), dims().window));
    }

    nn::ParameterRefs parameters() override {
        nn::ParameterRefs out;
        rnn_.collect(out);
        head_.collect(out);
        return out;
    }

private:
    nn::Gru rnn_;
    nn::Linear head_;
};

inline std::unique_ptr<Model> build_baseline(ModelKind kind, const HyperParams& hp, const ModelDims& dims, Rng& rng,
                                             ModelOptions options = {}) {
    validate(hp, options.enforce_grid);
    if (dims.features < 1 || dims.window < 1 || dims.horizon < 1)
        throw ParameterError("model dimensions must be positive");
    switch (kind) {
        case ModelKind::mlp: return std::make_unique<MlpModel>(hp, dims, rng, options);
        case ModelKind::cnn: return std::make_unique<CnnModel>(hp, dims, rng, options);
        case ModelKind::bilstm: return std::make_unique<BiLstmModel>(hp, dims, rng, options);
        case ModelKind::gru: return std::make_unique<GruModel>(hp, dims, rng, options);
        case ModelKind::adast: break;
    }
    throw ParameterError("build_baseline: '" + to_string(kind) + "' is not a baseline kind");
}

inline std::unique_ptr<Model> build_model(ModelKind kind, const HyperParams& hp, const ModelDims& dims, Rng& rng,
                                          ModelOptions options = {}) {
    if (kind == ModelKind::adast) return build_adast(hp, dims, rng, options);
    return build_baseline(kind, hp, dims, rng, options);
}

}  // namespace adast::model
