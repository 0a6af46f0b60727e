#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "adast/tensor.hpp"

namespace adast::nn {

/// Scalar loss value plus its gradient w.r.t. the prediction/logit tensor.
struct LossResult {
    double value = 0.0;
    Tensor grad;
};

/// Added under the square root so the gradient stays bounded at zero error.
inline constexpr double kRmseSqrtEps = 1e-12;

inline LossResult rmse_loss(const Tensor& pred, const Tensor& target) {
    Tensor::require_same_shape(pred, target, "rmse_loss");
    const double n = static_cast<double>(pred.size());
    double sse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        sse += d * d;
    }
    const double value = std::sqrt(sse / n + kRmseSqrtEps);
    Tensor grad(pred.shape());
    for (std::size_t i = 0; i < pred.size(); ++i) grad[i] = (pred[i] - target[i]) / (n * value);
    return {value, std::move(grad)};
}

/// Mean over the batch of -log softmax(logits)[label]; logits are [B, K].
inline LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
    logits.require_rank(2, "softmax_cross_entropy logits");
    const std::size_t batch = logits.dim(0), classes = logits.dim(1);
    if (labels.size() != batch)
        throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for batch of " +
                             std::to_string(batch));
    Tensor grad(logits.shape());
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const int label = labels[b];
        if (label < 0 || static_cast<std::size_t>(label) >= classes)
            throw LabelError("label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
        const double* row = logits.ptr() + b * classes;
        const double mx = *std::max_element(row, row + classes);
        double z = 0.0;
        for (std::size_t k = 0; k < classes; ++k) z += std::exp(row[k] - mx);
        const double log_z = std::log(z) + mx;
        total += log_z - row[label];
        for (std::size_t k = 0; k < classes; ++k) {
            const double p = std::exp(row[k] - log_z);
            grad.at(b, k) = (p - (static_cast<std::size_t>(label) == k ? 1.0 : 0.0)) / static_cast<double>(batch);
        }
    }
    return {total / static_cast<double>(batch), std::move(grad)};
}

}  // namespace adast::nn
