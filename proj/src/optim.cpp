#include "lrm/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace lrm {

void adam_step(ParamStore& params, AdamState& state) {
    auto& x = params.values();
    auto& g = params.grads();
    if (state.m.size() != x.size() || state.v.size() != x.size())
        throw std::invalid_argument("adam_step: state layout does not match parameters");

    for (size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i]))
            throw std::runtime_error("adam_step: non-finite gradient in slice '" + params.slice_of(i) + "'");
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < x.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        x[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

void sgd_step(std::vector<double>& values, const std::vector<double>& grads, double lr) {
    if (values.size() != grads.size()) throw std::invalid_argument("sgd_step: length mismatch");
    for (size_t i = 0; i < values.size(); ++i) values[i] -= lr * grads[i];
}

}  // namespace lrm
