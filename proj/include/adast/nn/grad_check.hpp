#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "adast/tensor.hpp"

namespace adast::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_input = 0;       // index into the checked tensor list
    std::size_t worst_coordinate = 0;  // flat index inside that tensor
    std::size_t coordinates = 0;
};

/// Compares analytic gradients against central finite differences.
///
/// `loss` must evaluate the scalar objective from the current contents of the
/// tensors in `inputs`; each coordinate is perturbed in place by +/- fd_epsilon
/// and restored. `analytic[i]` holds d loss / d inputs[i]. The relative error per
/// coordinate is |a - n| / max(1e-8, |a| + |n|).
inline GradCheckResult grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& inputs,
                                  const std::vector<const Tensor*>& analytic, double fd_epsilon = 1e-5) {
    if (inputs.size() != analytic.size()) throw DimensionError("grad_check: inputs and gradients differ in count");
    GradCheckResult result;
    std::size_t global = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Tensor& x = *inputs[i];
        Tensor::require_same_shape(x, *analytic[i], "grad_check");
        for (std::size_t k = 0; k < x.size(); ++k, ++global) {
            const double saved = x[k];
            x[k] = saved + fd_epsilon;
            const double up = loss();
            x[k] = saved - fd_epsilon;
            const double down = loss();
            x[k] = saved;
            const double numeric = (up - down) / (2.0 * fd_epsilon);
            const double a = (*analytic[i])[k];
            if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(a))
                throw GradCheckError("grad_check: non-finite value", global);
            const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_input = i;
                result.worst_coordinate = k;
            }
            ++result.coordinates;
        }
    }
    return result;
}

}  // namespace adast::nn
