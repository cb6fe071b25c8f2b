#pragma once

#include <vector>

#include "lrm/matrix.hpp"

namespace lrm {

// Unit-norm first principal component of the mean-centered rows.
// Power iteration on the covariance matrix; converged when successive
// iterates differ by < 1e-12 (or after 10,000 iterations).
// Sign convention: the largest-magnitude entry of the result is positive.
// Throws if all rows are identical (degenerate input) or rows < 2.
std::vector<double> pca_first_component(const Matrix& rows);

// Applies the sign convention in place: flips v if its largest-magnitude
// entry is negative (ties resolved by the first such entry).
void normalize_sign(std::vector<double>& v);

}  // namespace lrm
