#include "lrm/subspace.hpp"

#include <cmath>
#include <stdexcept>

namespace lrm {

SubspaceInit subspace_init_from_string(const std::string& s) {
    if (s == "basic") return SubspaceInit::basic;
    if (s == "ortho") return SubspaceInit::ortho;
    throw std::invalid_argument("unknown subspace init mode: " + s + " (expected basic|ortho)");
}

std::string to_string(SubspaceInit mode) {
    return mode == SubspaceInit::basic ? "basic" : "ortho";
}

Subspace init_subspace(size_t k, size_t q, SubspaceInit mode, uint64_t seed) {
    if (k < 1 || k > q)
        throw std::invalid_argument("init_subspace: need 1 <= k <= q, got k=" + std::to_string(k) +
                                    ", q=" + std::to_string(q));
    Rng rng(seed);
    Subspace sub;
    sub.init_mode = mode;
    sub.B = Matrix(k, q);
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    for (double& x : sub.B.data) x = rng.normal() * scale;

    if (mode == SubspaceInit::ortho) {
        // Gram-Schmidt on the Gaussian rows. A re-draw on (numerically)
        // dependent rows keeps the loop total; k <= q makes success certain
        // for continuous draws.
        for (size_t i = 0; i < k; ++i) {
            double* bi = sub.B.row(i);
            for (int attempt = 0;; ++attempt) {
                for (size_t j = 0; j < i; ++j) {
                    const double* bj = sub.B.row(j);
                    double proj = 0.0;
                    for (size_t c = 0; c < q; ++c) proj += bi[c] * bj[c];
                    for (size_t c = 0; c < q; ++c) bi[c] -= proj * bj[c];
                }
                double nn = 0.0;
                for (size_t c = 0; c < q; ++c) nn += bi[c] * bi[c];
                nn = std::sqrt(nn);
                if (nn > 1e-12) {
                    for (size_t c = 0; c < q; ++c) bi[c] /= nn;
                    break;
                }
                if (attempt > 64) throw std::runtime_error("init_subspace: Gram-Schmidt failed");
                for (size_t c = 0; c < q; ++c) bi[c] = rng.normal() * scale;
            }
        }
    }
    return sub;
}

std::vector<double> compose_modulation(const std::vector<double>& v, const Subspace& subspace,
                                       const std::vector<double>& phi_t) {
    const size_t k = subspace.rank();
    const size_t q = subspace.dim();
    if (v.size() != q) throw std::invalid_argument("compose_modulation: |v| != q");
    if (phi_t.size() != k) throw std::invalid_argument("compose_modulation: |phi_t| != k");
    std::vector<double> m(q);
    compose_modulation(v, subspace.B.data.data(), k, q, phi_t.data(), m.data());
    return m;
}

OrthoPenalty ortho_penalty(const Matrix& B) {
    const size_t k = B.rows;
    const size_t q = B.cols;
    // G = B B^T over rows; S = G - I_k; penalty = ||S||_F; grad = 2 S B / penalty.
    Matrix S(k, k);
    double frob2 = 0.0;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            double g = 0.0;
            const double* bi = B.row(i);
            const double* bj = B.row(j);
            for (size_t c = 0; c < q; ++c) g += bi[c] * bj[c];
            const double s = g - (i == j ? 1.0 : 0.0);
            S.at(i, j) = s;
            frob2 += s * s;
        }

    OrthoPenalty out;
    out.penalty = std::sqrt(frob2);
    out.grad = Matrix(k, q);
    if (out.penalty < 1e-12) return out;  // gradient pinned to 0 at the minimum
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            const double c = 2.0 * S.at(i, j) / out.penalty;
            const double* bj = B.row(j);
            double* gi = out.grad.row(i);
            for (size_t t = 0; t < q; ++t) gi[t] += c * bj[t];
        }
    return out;
}

}  // namespace lrm
