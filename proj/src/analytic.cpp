#include "conc/analytic.hpp"

#include <cmath>
#include <numbers>

namespace conc::analytic {

namespace {

void check_mean(const Vector& theta) {
  if (theta.size() < 1) throw std::invalid_argument("GaussianSpec: empty mean");
  if (!theta.allFinite()) throw std::invalid_argument("GaussianSpec: mean must be finite");
}

}  // namespace

GaussianSpec GaussianSpec::spherical(Vector theta, double variance) {
  check_mean(theta);
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("GaussianSpec: spherical variance must be > 0");
  }
  return GaussianSpec(std::move(theta), SphericalCovariance{variance});
}

GaussianSpec GaussianSpec::diagonal(Vector theta, Vector variances) {
  check_mean(theta);
  if (variances.size() != theta.size()) {
    throw DimensionMismatch("GaussianSpec: diagonal variances dimension mismatch");
  }
  if (!variances.allFinite() || (variances.array() <= 0.0).any()) {
    throw std::invalid_argument("GaussianSpec: diagonal variances must all be > 0");
  }
  return GaussianSpec(std::move(theta), DiagonalCovariance{std::move(variances)});
}

GaussianSpec GaussianSpec::full(Vector theta, Matrix sigma) {
  check_mean(theta);
  if (sigma.rows() != theta.size() || sigma.cols() != theta.size()) {
    throw DimensionMismatch("GaussianSpec: covariance dimension mismatch");
  }
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("GaussianSpec: covariance must be symmetric");
  }
  spectral::PrincipalComponents eigen;
  try {
    eigen = spectral::eigendecompose(sigma);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("GaussianSpec: covariance must be positive definite");
  }
  if ((eigen.eigenvalues.array() <= 0.0).any()) {
    throw std::invalid_argument("GaussianSpec: covariance must be positive definite");
  }
  return GaussianSpec(std::move(theta), FullCovariance{std::move(sigma), std::move(eigen)});
}

GaussianSpec::Structure GaussianSpec::structure() const noexcept {
  if (std::holds_alternative<SphericalCovariance>(covariance_)) return Structure::Spherical;
  if (std::holds_alternative<DiagonalCovariance>(covariance_)) return Structure::Diagonal;
  return Structure::Full;
}

double GaussianSpec::spherical_variance() const {
  return std::get<SphericalCovariance>(covariance_).variance;
}

const Vector& GaussianSpec::diagonal_variances() const {
  return std::get<DiagonalCovariance>(covariance_).variances;
}

const Matrix& GaussianSpec::full_sigma() const {
  return std::get<FullCovariance>(covariance_).sigma;
}

const spectral::PrincipalComponents& GaussianSpec::full_components() const {
  return std::get<FullCovariance>(covariance_).eigen;
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: x must be finite");
  // erfc keeps full accuracy in the lower tail, where 1 - erf would cancel.
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

double std_normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Rational approximation for the lower region (u < 0.02425) and the central
// region of the inverse normal CDF.
double quantile_initial_guess(double u) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double u) {
  if (!(u > 0.0) || !(u < 1.0)) {
    throw std::domain_error("std_normal_quantile: u must be in (0, 1)");
  }
  if (u > 0.5) return -std_normal_quantile(1.0 - u);  // 1 - u is exact for u in [0.5, 1]
  double x = quantile_initial_guess(u);
  // Two Newton steps against the accurate CDF; skipped in the far tail where
  // 1/pdf would overflow (the rational guess is already ~1e-9 relative there).
  for (int i = 0; i < 2 && std::abs(x) < 37.0; ++i) {
    x -= (std_normal_cdf(x) - u) / std_normal_pdf(x);
  }
  return x;
}

double sqrt_matrix_p_norm(const GaussianSpec& spec, const LpMetric& metric) {
  switch (spec.structure()) {
    case GaussianSpec::Structure::Spherical:
      return std::sqrt(spec.spherical_variance());
    case GaussianSpec::Structure::Diagonal:
      // The induced p-norm of a nonnegative diagonal matrix is its largest
      // entry, for every p in [1, inf].
      return std::sqrt(spec.diagonal_variances().maxCoeff());
    case GaussianSpec::Structure::Full:
      if (metric.p() == Exponent::finite(2.0)) {
        return std::sqrt(spec.full_components().eigenvalues[0]);
      }
      throw UnsupportedStructure(
          "sqrt_matrix_p_norm: full covariance is supported only for p = 2 "
          "(approximating the general induced matrix p-norm is NP-hard)");
  }
  throw std::logic_error("unreachable");
}

namespace {

void check_p_at_least_two(const LpMetric& metric) {
  if (!metric.p().is_infinite() && metric.p().value() < 2.0) {
    throw std::domain_error("gii_lower_bound: requires p >= 2");
  }
}

}  // namespace

double gii_lower_bound(const GaussianSpec& spec, double measure_of_e, double epsilon,
                       const LpMetric& metric) {
  if (!(measure_of_e > 0.0) || !(measure_of_e < 1.0)) {
    throw std::domain_error("gii_lower_bound: measure_of_e must be in (0, 1)");
  }
  if (!(epsilon >= 0.0)) throw std::domain_error("gii_lower_bound: epsilon must be >= 0");
  check_p_at_least_two(metric);
  const double scale = sqrt_matrix_p_norm(spec, metric);
  return std_normal_cdf(std_normal_quantile(measure_of_e) + epsilon / scale);
}

HalfSpace optimal_halfspace(const GaussianSpec& spec, double alpha, const LpMetric& metric) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("optimal_halfspace: alpha must be in (0, 1)");
  }
  const Index n = spec.dim();
  if (spec.structure() == GaussianSpec::Structure::Spherical) {
    check_p_at_least_two(metric);
    // Any axis is optimal by symmetry; fix j = 0 for determinism.
    Vector w = Vector::Zero(n);
    w[0] = 1.0;
    const double sigma = std::sqrt(spec.spherical_variance());
    const double b = -spec.mean()[0] - sigma * std_normal_quantile(alpha);
    return HalfSpace(std::move(w), b);
  }
  if (metric.p() == Exponent::finite(2.0)) {
    Vector w;
    double std_along_w = 0.0;
    if (spec.structure() == GaussianSpec::Structure::Diagonal) {
      Index jmax = 0;
      spec.diagonal_variances().maxCoeff(&jmax);
      w = Vector::Zero(n);
      w[jmax] = 1.0;
      std_along_w = std::sqrt(spec.diagonal_variances()[jmax]);
    } else {
      w = spec.full_components().component(0);
      std_along_w = std::sqrt(spec.full_components().eigenvalues[0]);
    }
    const double b = -w.dot(spec.mean()) - std_along_w * std_normal_quantile(alpha);
    return HalfSpace(std::move(w), b);
  }
  throw UnsupportedStructure(
      "optimal_halfspace: supported only for spherical covariance with p >= 2 "
      "or any covariance with p = 2");
}

}  // namespace conc::analytic
