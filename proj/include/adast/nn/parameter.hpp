#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adast/rng.hpp"
#include "adast/tensor.hpp"

namespace adast::nn {

enum class Mode { train, eval };

/// A trainable tensor and its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    bool trainable = true;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros_like(value)) {}

    void zero_grad() { grad.fill(0.0); }
};

using ParameterRefs = std::vector<Parameter*>;

inline void init_uniform(Tensor& t, double bound, Rng& rng) {
    for (double& v : t.data()) v = rng.uniform(-bound, bound);
}

inline void zero_grads(const ParameterRefs& params) {
    for (Parameter* p : params) p->zero_grad();
}

}  // namespace adast::nn
