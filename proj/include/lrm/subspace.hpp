#pragma once

#include <string>
#include <vector>

#include "lrm/matrix.hpp"
#include "lrm/rng.hpp"

namespace lrm {

enum class SubspaceInit { basic, ortho };

SubspaceInit subspace_init_from_string(const std::string& s);
std::string to_string(SubspaceInit mode);

// Learnable rank-k subspace of R^q: k basis rows b_1..b_k, each in R^q.
struct Subspace {
    Matrix B;  // k x q
    SubspaceInit init_mode = SubspaceInit::basic;

    size_t rank() const { return B.rows; }
    size_t dim() const { return B.cols; }
};

// Per-video code v in R^q plus per-frame coefficients Phi (T x k).
struct LatentCodes {
    std::vector<double> v;  // length q
    Matrix phi;             // T x k, row t is phi_t
};

// basic: i.i.d. Gaussian entries scaled by 1/sqrt(q).
// ortho: Gram-Schmidt on Gaussian rows, so the Gram matrix is I_k.
Subspace init_subspace(size_t k, size_t q, SubspaceInit mode, uint64_t seed);

// m_t = v + B^T-composed update: m[j] = v[j] + sum_i phi_t[i] * B[i][j].
template <typename S, typename SB>
void compose_modulation(const std::vector<double>& v, const SB* B, size_t k, size_t q,
                        const S* phi_t, S* m) {
    for (size_t j = 0; j < q; ++j) m[j] = S(v[j]);
    for (size_t i = 0; i < k; ++i) {
        const S c = phi_t[i];
        const SB* brow = B + i * q;
        for (size_t j = 0; j < q; ++j) m[j] += c * S(brow[j]);
    }
}

std::vector<double> compose_modulation(const std::vector<double>& v, const Subspace& subspace,
                                       const std::vector<double>& phi_t);

// Orthogonality regularizer ||G - I_k||_F over the Gram matrix G[i][j] =
// <b_i, b_j> of the k basis rows (Frobenius norm, not squared). The gradient
// at the zero of the norm is defined as 0 (penalty < 1e-12) since the norm is
// not differentiable there.
struct OrthoPenalty {
    double penalty = 0.0;
    Matrix grad;  // k x q, d penalty / d B
};

OrthoPenalty ortho_penalty(const Matrix& B);

}  // namespace lrm
