#include "lrm/pca.hpp"

#include <cmath>
#include <stdexcept>

namespace lrm {

void normalize_sign(std::vector<double>& v) {
    size_t imax = 0;
    for (size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
        for (double& x : v) x = -x;
}

std::vector<double> pca_first_component(const Matrix& rows) {
    const size_t n = rows.rows;
    const size_t d = rows.cols;
    if (n < 2) throw std::invalid_argument("pca_first_component: need at least 2 rows");

    std::vector<double> mean(d, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) mean[j] += rows.at(i, j);
    for (double& m : mean) m /= static_cast<double>(n);

    Matrix centered(n, d);
    double spread = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) {
            const double c = rows.at(i, j) - mean[j];
            centered.at(i, j) = c;
            spread += c * c;
        }
    if (spread == 0.0) throw std::runtime_error("pca_first_component: all rows identical (degenerate input)");

    // Covariance C = X^T X / (n - 1), d x d.
    Matrix cov(d, d);
    for (size_t i = 0; i < n; ++i)
        for (size_t a = 0; a < d; ++a) {
            const double xa = centered.at(i, a);
            for (size_t b = 0; b < d; ++b) cov.at(a, b) += xa * centered.at(i, b);
        }
    for (double& c : cov.data) c /= static_cast<double>(n - 1);

    // Power iteration. Deterministic start along the largest-variance axis.
    std::vector<double> v(d, 0.0);
    size_t start = 0;
    for (size_t a = 1; a < d; ++a)
        if (cov.at(a, a) > cov.at(start, start)) start = a;
    v[start] = 1.0;

    std::vector<double> next(d, 0.0);
    for (int iter = 0; iter < 10000; ++iter) {
        for (size_t a = 0; a < d; ++a) {
            double s = 0.0;
            for (size_t b = 0; b < d; ++b) s += cov.at(a, b) * v[b];
            next[a] = s;
        }
        const double nn = norm2(next);
        if (nn == 0.0) break;  // start vector orthogonal to the range; keep v
        for (double& x : next) x /= nn;
        // Sign-align with the previous iterate so the convergence test is
        // meaningful for eigenvalue flips.
        double align = 0.0;
        for (size_t a = 0; a < d; ++a) align += next[a] * v[a];
        if (align < 0.0)
            for (double& x : next) x = -x;
        double diff = 0.0;
        for (size_t a = 0; a < d; ++a) diff = std::max(diff, std::abs(next[a] - v[a]));
        v = next;
        if (diff < 1e-12) break;
    }

    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    normalize_sign(v);
    return v;
}

}  // namespace lrm
