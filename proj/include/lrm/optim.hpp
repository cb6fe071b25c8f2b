#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lrm/param_store.hpp"

namespace lrm {

// Bias-corrected Adam over a ParamStore. Moment buffers share the parameter
// layout; the step counter starts at 0 and is incremented by each step.
struct AdamState {
    std::vector<double> m;  // first moments
    std::vector<double> v;  // second moments
    uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double lr = 1e-4;

    explicit AdamState(size_t n, double learning_rate = 1e-4)
        : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

// Applies one Adam update in place using the gradients in `params`.
// Throws on non-finite gradients, naming the offending slice.
void adam_step(ParamStore& params, AdamState& state);

// Plain gradient descent: x -= lr * g. Used by the inner loops.
void sgd_step(std::vector<double>& values, const std::vector<double>& grads, double lr);

}  // namespace lrm
