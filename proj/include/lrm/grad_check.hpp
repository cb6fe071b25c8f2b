#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lrm {

// Central finite differences (f(x+h) - f(x-h)) / 2h per coordinate.
// The verification oracle for every analytic gradient in the repo.
inline std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be positive");
    std::vector<double> grad(params.size(), 0.0);
    for (size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double fp = f(params);
        params[i] = saved - h;
        const double fm = f(params);
        params[i] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("finite_diff_grad: non-finite function value at coordinate " +
                                     std::to_string(i));
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

// max_i |a_i - b_i| / max(1, ||a||_inf, ||b||_inf) -- the relative error used
// by the gradient-check tolerances.
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_relative_error: length mismatch");
    double scale = 1.0;
    for (size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(a[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst / scale;
}

}  // namespace lrm
