#pragma once

#include "conc/core.hpp"

namespace conc::spectral {

/// Eigendecomposition of a sample covariance matrix: unit eigenvectors as
/// columns, ordered by eigenvalue descending, eigenvalues clamped to >= 0.
struct PrincipalComponents {
  Matrix vectors;      // column i = i-th component
  Vector eigenvalues;  // non-increasing

  Index dim() const noexcept { return vectors.rows(); }
  Vector component(Index i) const { return vectors.col(i); }
};

/// Q = (1/(m-1)) sum (x_i - mean)(x_i - mean)', exactly symmetric.
Matrix sample_covariance(const Dataset& data);

/// Symmetric eigendecomposition with a deterministic sign convention (first
/// nonzero coordinate of each eigenvector positive). Eigenvalues in
/// [-1e-9, 0) clamp to 0; anything more negative is an internal-consistency
/// failure of the (supposedly PSD) input.
PrincipalComponents eigendecompose(const Matrix& q);

/// Sign-preserving coordinatewise power with l2 renormalization:
/// sgn(v) .* |v|^s / ||v^s||_2. Interpolates a direction toward its dominant
/// axis as s grows.
Vector pow_transform(const Eigen::Ref<const Vector>& v, int s);

/// The s -> inf limit of pow_transform: the signed axis vector of the
/// largest-magnitude coordinate, ties broken by smallest index.
Vector axis_limit(const Eigen::Ref<const Vector>& v);

}  // namespace conc::spectral
