#include "lrm/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrm {

namespace {
void check_shapes(const VideoTensor& a, const VideoTensor& b) {
    if (a.frames != b.frames || a.height != b.height || a.width != b.width)
        throw std::invalid_argument("metric: shape mismatch");
}

// Inclusive 3D prefix sums with a zero border, so window sums are O(1).
struct PrefixVolume {
    size_t T, H, W;
    std::vector<double> s;

    PrefixVolume(const VideoTensor& v, const VideoTensor* other) : T(v.frames), H(v.height), W(v.width) {
        s.assign((T + 1) * (H + 1) * (W + 1), 0.0);
        for (size_t t = 0; t < T; ++t)
            for (size_t i = 0; i < H; ++i)
                for (size_t j = 0; j < W; ++j) {
                    const double val =
                        other == nullptr ? v.at(t, i, j) : v.at(t, i, j) * other->at(t, i, j);
                    at(t + 1, i + 1, j + 1) = val + at(t, i + 1, j + 1) + at(t + 1, i, j + 1) +
                                              at(t + 1, i + 1, j) - at(t, i, j + 1) - at(t, i + 1, j) -
                                              at(t + 1, i, j) + at(t, i, j);
                }
    }

    double& at(size_t t, size_t i, size_t j) { return s[(t * (H + 1) + i) * (W + 1) + j]; }
    double at(size_t t, size_t i, size_t j) const { return s[(t * (H + 1) + i) * (W + 1) + j]; }

    // Sum over the window starting at (t, i, j) with side w.
    double window(size_t t, size_t i, size_t j, size_t w) const {
        const size_t t1 = t + w, i1 = i + w, j1 = j + w;
        return at(t1, i1, j1) - at(t, i1, j1) - at(t1, i, j1) - at(t1, i1, j) + at(t, i, j1) +
               at(t, i1, j) + at(t1, i, j) - at(t, i, j);
    }
};
}  // namespace

double psnr(const VideoTensor& a, const VideoTensor& b) {
    check_shapes(a, b);
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim3d(const VideoTensor& a, const VideoTensor& b, size_t window) {
    check_shapes(a, b);
    if (window < 1) throw std::invalid_argument("ssim3d: window must be >= 1");
    if (a.frames < window || a.height < window || a.width < window)
        throw std::invalid_argument("ssim3d: dimension smaller than window " + std::to_string(window) +
                                    "; use a smaller window");

    constexpr double C1 = 0.01 * 0.01;
    constexpr double C2 = 0.03 * 0.03;
    const double n = static_cast<double>(window * window * window);

    const PrefixVolume sa(a, nullptr), sb(b, nullptr);
    const PrefixVolume saa(a, &a), sbb(b, &b), sab(a, &b);

    double total = 0.0;
    size_t count = 0;
    for (size_t t = 0; t + window <= a.frames; ++t)
        for (size_t i = 0; i + window <= a.height; ++i)
            for (size_t j = 0; j + window <= a.width; ++j) {
                const double mu_a = sa.window(t, i, j, window) / n;
                const double mu_b = sb.window(t, i, j, window) / n;
                const double var_a = saa.window(t, i, j, window) / n - mu_a * mu_a;
                const double var_b = sbb.window(t, i, j, window) / n - mu_b * mu_b;
                const double cov = sab.window(t, i, j, window) / n - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2);
                const double den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2);
                total += num / den;
                ++count;
            }
    return total / static_cast<double>(count);
}

}  // namespace lrm
