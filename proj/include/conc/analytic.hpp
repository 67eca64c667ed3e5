#pragma once

#include "conc/core.hpp"
#include "conc/spectral.hpp"

#include <variant>

namespace conc::analytic {

struct SphericalCovariance {
  double variance;  // sigma^2 > 0
};

struct DiagonalCovariance {
  Vector variances;  // all > 0
};

struct FullCovariance {
  Matrix sigma;                           // symmetric positive definite
  spectral::PrincipalComponents eigen;    // cached at validation
};

/// Mean theta and structured covariance of a Gaussian measure N(theta, Sigma).
class GaussianSpec {
 public:
  enum class Structure { Spherical, Diagonal, Full };

  static GaussianSpec spherical(Vector theta, double variance);
  static GaussianSpec diagonal(Vector theta, Vector variances);
  static GaussianSpec full(Vector theta, Matrix sigma);

  Index dim() const noexcept { return theta_.size(); }
  const Vector& mean() const noexcept { return theta_; }
  Structure structure() const noexcept;

  double spherical_variance() const;
  const Vector& diagonal_variances() const;
  const Matrix& full_sigma() const;
  const spectral::PrincipalComponents& full_components() const;

 private:
  GaussianSpec(Vector theta, std::variant<SphericalCovariance, DiagonalCovariance, FullCovariance> cov)
      : theta_(std::move(theta)), covariance_(std::move(cov)) {}

  Vector theta_;
  std::variant<SphericalCovariance, DiagonalCovariance, FullCovariance> covariance_;
};

/// Standard normal CDF, accurate to well below 1e-12 absolute error.
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on (0, 1); rational initial guess refined by
/// Newton steps against the CDF above.
double std_normal_quantile(double u);

/// Induced matrix p-norm of Sigma^{1/2}. Closed forms exist for spherical
/// and diagonal covariance (any p) and for full covariance with p = 2;
/// approximating the general matrix p-norm is NP-hard, so other full-matrix
/// combinations are rejected.
double sqrt_matrix_p_norm(const GaussianSpec& spec, const LpMetric& metric);

/// Phi(Phi^{-1}(measure_of_e) + epsilon / ||Sigma^{1/2}||_p), valid for
/// p >= 2: the exact lower bound on the measure of any epsilon-expansion.
double gii_lower_bound(const GaussianSpec& spec, double measure_of_e, double epsilon,
                       const LpMetric& metric);

/// A half space of measure alpha attaining the lower bound: axis-aligned for
/// spherical covariance (p >= 2), top-eigenvector-aligned for p = 2.
HalfSpace optimal_halfspace(const GaussianSpec& spec, double alpha, const LpMetric& metric);

}  // namespace conc::analytic
