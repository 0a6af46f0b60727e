#pragma once

#include <memory>
#include <optional>
#include <string>

#include "adast/model/hyperparams.hpp"
#include "adast/nn/activation.hpp"
#include "adast/nn/batchnorm.hpp"
#include "adast/nn/conv1d.hpp"
#include "adast/nn/linear.hpp"
#include "adast/nn/recurrent.hpp"

namespace adast::model {

enum class ModelKind { adast, mlp, cnn, bilstm, gru };

inline std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::adast: return "adast";
        case ModelKind::mlp: return "mlp";
        case ModelKind::cnn: return "cnn";
        case ModelKind::bilstm: return "bilstm";
        case ModelKind::gru: return "gru";
    }
    return "unknown";
}

inline ModelKind parse_model_kind(const std::string& name) {
    for (ModelKind k : {ModelKind::adast, ModelKind::mlp, ModelKind::cnn, ModelKind::bilstm, ModelKind::gru})
        if (to_string(k) == name) return k;
    throw ParameterError("unknown model kind '" + name + "' (expected adast, mlp, cnn, bilstm or gru)");
}

/// Shapes fixed at construction: X is [B, window, features], y is [B, horizon].
struct ModelDims {
    std::size_t features = 0;
    std::size_t window = 0;
    std::size_t horizon = 0;
    std::size_t domains = 0;  // K, only used by models with a domain head
};

struct ModelOptions {
    bool enforce_grid = true;
    /// Extension: negate the domain-loss gradient entering the shared features.
    bool gradient_reversal = false;
};

struct ForwardResult {
    Tensor y;                             // [B, horizon]
    std::optional<Tensor> domain_logits;  // [B, K] when requested
};

/// Common surface of the forecaster and the baselines. Single-owner; forward
/// caches what backward needs, so calls must alternate per batch.
class Model {
public:
    Model(ModelKind kind, HyperParams hp, ModelDims dims, ModelOptions options, std::uint64_t dropout_seed)
        : kind_(kind), hp_(hp), dims_(dims), options_(options), dropout_rng_(dropout_seed) {}
    virtual ~Model() = default;
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    ModelKind kind() const { return kind_; }
    const HyperParams& hyperparams() const { return hp_; }
    const ModelDims& dims() const { return dims_; }
    const ModelOptions& options() const { return options_; }

    void set_mode(nn::Mode mode) { mode_ = mode; }
    nn::Mode mode() const { return mode_; }

    virtual bool has_domain_head() const { return false; }

    virtual ForwardResult forward(const Tensor& x, bool return_domain) = 0;

    /// Accumulates parameter gradients; `d_domain` may be null. Returns dL/dX.
    virtual Tensor backward(const Tensor& dy, const Tensor* d_domain) = 0;

    virtual nn::ParameterRefs parameters() = 0;

    /// Non-trainable state that a checkpoint must carry (batch-norm running stats).
    virtual std::vector<nn::RunningStats*> buffers() { return {}; }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (const nn::Parameter* p : parameters()) n += p->value.size();
        return n;
    }

    void zero_grad() { nn::zero_grads(parameters()); }

protected:
    void check_input(const Tensor& x) const {
        x.require_rank(3, "model input");
        if (x.dim(1) != dims_.window || x.dim(2) != dims_.features)
            throw DimensionError("model expects input [B," + std::to_string(dims_.window) + "," +
                                 std::to_string(dims_.features) + "], got " + shape_string(x.shape()));
    }

    Rng& dropout_rng() { return dropout_rng_; }

private:
    ModelKind kind_;
    HyperParams hp_;
    ModelDims dims_;
    ModelOptions options_;
    Rng dropout_rng_;
    nn::Mode mode_ = nn::Mode::train;
};

/// conv1 (+bn, ReLU, dropout) and, for two layers, conv2 to twice the width.
/// Maps [B, F, T] to [B, final_channels, T].
class ConvStack {
public:
    ConvStack() = default;
    ConvStack(std::size_t in_channels, const HyperParams& hp, Rng& rng) {
        std::size_t in = in_channels;
        for (int l = 0; l < hp.num_conv_layers; ++l) {
            const std::size_t out = static_cast<std::size_t>(hp.cnn_hidden_size) * (l == 0 ? 1 : 2);
            Block b;
            b.conv = nn::Conv1d(in, out, rng);
            if (hp.use_batchnorm) b.norm = nn::BatchNorm1d(out);
            b.dropout = nn::Dropout(hp.dropout_cnn);
            blocks_.push_back(std::move(b));
            in = out;
        }
    }

    std::size_t final_channels() const { return blocks_.back().conv.out_channels(); }

    Tensor forward(const Tensor& x, nn::Mode mode, Rng& rng) {
        Tensor h = x;
        for (auto& b : blocks_) {
            h = b.conv.forward(h);
            if (b.norm) h = b.norm->forward(h, mode);
            b.pre_activation = h;
            h = b.dropout.forward(nn::relu(h), mode, rng);
        }
        return h;
    }

    Tensor backward(const Tensor& dy) {
        Tensor g = dy;
        for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
            g = nn::relu_backward(it->pre_activation, it->dropout.backward(g));
            if (it->norm) g = it->norm->backward(g);
            g = it->conv.backward(g);
        }
        return g;
    }

    void collect(nn::ParameterRefs& out) {
        for (auto& b : blocks_) {
            b.conv.collect(out);
            if (b.norm) b.norm->collect(out);
        }
    }

    void collect_buffers(std::vector<nn::RunningStats*>& out) {
        for (auto& b : blocks_)
            if (b.norm) out.push_back(&b.norm->stats());
    }

private:
    struct Block {
        nn::Conv1d conv;
        std::optional<nn::BatchNorm1d> norm;
        nn::Dropout dropout;
        Tensor pre_activation;
    };
    std::vector<Block> blocks_;
};

}  // namespace adast::model
