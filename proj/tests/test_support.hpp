#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "adast/nn/grad_check.hpp"
#include "adast/nn/parameter.hpp"
#include "adast/rng.hpp"
#include "adast/tensor.hpp"

namespace adast::test {

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

// Scalar probe loss sum(r * y) with fixed random r; its gradient w.r.t. y is r.
struct Probe {
    Tensor r;
    double operator()(const Tensor& y) const {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
        return s;
    }
};

inline Probe make_probe(const Shape& shape, Rng& rng) { return Probe{random_tensor(shape, rng)}; }

// Runs grad_check over `x` (when given) and every parameter. `forward` must
// recompute the scalar loss from current values; `analytic_dx` is dL/dx.
inline double check_params(const std::function<double()>& forward, nn::ParameterRefs params, Tensor* x = nullptr,
                           const Tensor* analytic_dx = nullptr) {
    std::vector<Tensor*> inputs;
    std::vector<const Tensor*> grads;
    if (x) {
        inputs.push_back(x);
        grads.push_back(analytic_dx);
    }
    for (nn::Parameter* p : params) {
        inputs.push_back(&p->value);
        grads.push_back(&p->grad);
    }
    return nn::grad_check(forward, inputs, grads).max_rel_error;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("adast_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace adast::test
