#include "doctest.h"

#include "conc/analytic.hpp"
#include "conc/data.hpp"
#include "conc/geometry.hpp"
#include "conc/rng.hpp"

#include <cmath>

using namespace conc;
using namespace conc::analytic;

namespace {

// Independent inversion oracle: bisection on the CDF.
double quantile_by_bisection(double u) {
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GaussianSpec unit_spherical(Index n = 1) {
  return GaussianSpec::spherical(Vector::Zero(n), 1.0);
}

}  // namespace

TEST_CASE("standard normal cdf against high-precision references") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  // reference values computed with 25-digit arithmetic
  CHECK(std_normal_cdf(0.5) == doctest::Approx(0.691462461274013104).epsilon(1e-14));
  CHECK(std_normal_cdf(1.0) == doctest::Approx(0.841344746068542949).epsilon(1e-14));
  CHECK(std_normal_cdf(2.0) == doctest::Approx(0.977249868051820793).epsilon(1e-14));
  CHECK(std_normal_cdf(-3.0) == doctest::Approx(0.00134989803163009453).epsilon(1e-13));
  CHECK(std_normal_cdf(4.2) == doctest::Approx(0.999986654250984094).epsilon(1e-14));
  CHECK(std_normal_cdf(-8.0) == doctest::Approx(6.22096057427178412e-16).epsilon(1e-12));
  CHECK(std_normal_cdf(-0.6449) == doctest::Approx(0.259495995867422904).epsilon(1e-13));
  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
}

TEST_CASE("standard normal cdf is strictly increasing below double saturation") {
  // above x ~ 8.2 the CDF rounds to exactly 1.0, so strictness is only
  // meaningful below that
  double prev = std_normal_cdf(-9.0);
  for (double x = -8.9; x <= 7.5; x += 0.1) {
    const double cur = std_normal_cdf(x);
    CHECK(cur > prev);
    prev = cur;
  }
  for (double x = 7.6; x <= 12.0; x += 0.1) {
    const double cur = std_normal_cdf(x);
    CHECK(cur >= prev);
    CHECK(cur <= 1.0);
    prev = cur;
  }
}

TEST_CASE("standard normal quantile examples and oracle agreement") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_quantile(0.841345) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std_normal_quantile(0.05) == doctest::Approx(-1.6449).epsilon(1e-4));
  for (double u : {0.001, 0.05, 0.3, 0.5, 0.7, 0.841345, 0.999}) {
    CHECK(std_normal_quantile(u) == doctest::Approx(quantile_by_bisection(u)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("quantile/cdf round trip within 1e-10 on a dense grid") {
  for (int i = 1; i < 2000; ++i) {
    const double u = i / 2000.0;
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(u)) - u) <= 1e-10);
  }
  for (double u : {1e-12, 1e-9, 1e-6, 1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12}) {
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(u)) - u) <= 1e-10);
  }
}

TEST_CASE("gaussian spec validation") {
  CHECK_THROWS_AS(GaussianSpec::spherical(Vector::Zero(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianSpec::spherical(Vector::Zero(2), -1.0), std::invalid_argument);

  Vector d(2);
  d << 1.0, 0.0;
  CHECK_THROWS_AS(GaussianSpec::diagonal(Vector::Zero(2), d), std::invalid_argument);
  CHECK_THROWS_AS(GaussianSpec::diagonal(Vector::Zero(3), Vector::Ones(2)), DimensionMismatch);

  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(GaussianSpec::full(Vector::Zero(2), asym), std::invalid_argument);
  Matrix semidefinite(2, 2);
  semidefinite << 1.0, 1.0, 1.0, 1.0;  // eigenvalues {2, 0}
  CHECK_THROWS_AS(GaussianSpec::full(Vector::Zero(2), semidefinite), std::invalid_argument);
}

TEST_CASE("induced p-norm of the covariance square root") {
  CHECK(sqrt_matrix_p_norm(unit_spherical(3), LpMetric::linf()) == 1.0);
  CHECK(sqrt_matrix_p_norm(GaussianSpec::spherical(Vector::Zero(3), 4.0), LpMetric::l2()) == 2.0);

  Vector d(3);
  d << 4.0, 1.0, 1.0;
  const auto diag = GaussianSpec::diagonal(Vector::Zero(3), d);
  CHECK(sqrt_matrix_p_norm(diag, LpMetric::linf()) == 2.0);
  CHECK(sqrt_matrix_p_norm(diag, LpMetric::l1()) == 2.0);
  CHECK(sqrt_matrix_p_norm(diag, LpMetric::l2()) == 2.0);

  // 2x2 SPD matrix with eigenvalues {9, 1}: rotate diag(9, 1).
  const double c = std::cos(0.5), s = std::sin(0.5);
  Matrix rot(2, 2), lam(2, 2);
  rot << c, -s, s, c;
  lam << 9.0, 0.0, 0.0, 1.0;
  Matrix sigma = rot * lam * rot.transpose();
  sigma = 0.5 * (sigma + Matrix(sigma.transpose()));
  // characteristic-polynomial oracle for the top eigenvalue
  const double tr = sigma(0, 0) + sigma(1, 1);
  const double det = sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(1, 0);
  const double top = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
  CHECK(top == doctest::Approx(9.0).epsilon(1e-12));

  const auto full = GaussianSpec::full(Vector::Zero(2), sigma);
  CHECK(sqrt_matrix_p_norm(full, LpMetric::l2()) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_THROWS_AS(sqrt_matrix_p_norm(full, LpMetric::linf()), UnsupportedStructure);
  CHECK_THROWS_AS(sqrt_matrix_p_norm(full, LpMetric::l1()), UnsupportedStructure);
}

TEST_CASE("gii lower bound reproduces the spherical reference values") {
  const auto spec = unit_spherical();
  CHECK(gii_lower_bound(spec, 0.5, 1.0, LpMetric::linf()) ==
        doctest::Approx(0.8413447460685429).epsilon(1e-9));
  CHECK(gii_lower_bound(spec, 0.05, 1.0, LpMetric::linf()) ==
        doctest::Approx(0.2595110228414441).epsilon(1e-9));
  for (double a : {0.05, 0.3, 0.8}) {
    CHECK(gii_lower_bound(spec, a, 0.0, LpMetric::linf()) == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("gii lower bound domain checks") {
  const auto spec = unit_spherical();
  CHECK_THROWS_AS(gii_lower_bound(spec, 0.0, 1.0, LpMetric::linf()), std::domain_error);
  CHECK_THROWS_AS(gii_lower_bound(spec, 1.0, 1.0, LpMetric::linf()), std::domain_error);
  CHECK_THROWS_AS(gii_lower_bound(spec, 0.5, -1.0, LpMetric::linf()), std::domain_error);
  CHECK_THROWS_AS(gii_lower_bound(spec, 0.5, 1.0, LpMetric::l1()), std::domain_error);
  CHECK_THROWS_AS(gii_lower_bound(spec, 0.5, 1.0, LpMetric::lp(1.5)), std::domain_error);
  CHECK_NOTHROW(gii_lower_bound(spec, 0.5, 1.0, LpMetric::l2()));
  CHECK_NOTHROW(gii_lower_bound(spec, 0.5, 1.0, LpMetric::lp(4.0)));
}

TEST_CASE("gii lower bound is monotone in epsilon and in the set measure") {
  const auto spec = GaussianSpec::spherical(Vector::Zero(2), 2.0);
  double prev = 0.0;
  for (double eps = 0.0; eps <= 3.0; eps += 0.1) {
    const double v = gii_lower_bound(spec, 0.3, eps, LpMetric::lp(4.0));
    CHECK(v >= prev);
    CHECK(v >= 0.3);
    prev = v;
  }
  prev = 0.0;
  for (double a = 0.05; a < 1.0; a += 0.05) {
    const double v = gii_lower_bound(spec, a, 0.7, LpMetric::linf());
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("optimal half space for the spherical case") {
  const auto spec = unit_spherical(3);
  const auto median = optimal_halfspace(spec, 0.5, LpMetric::linf());
  CHECK(median.weight()[0] == 1.0);
  CHECK(median.weight()[1] == 0.0);
  CHECK(std::abs(median.bias()) <= 1e-12);

  const auto tail = optimal_halfspace(spec, 0.05, LpMetric::linf());
  CHECK(tail.bias() == doctest::Approx(1.6449).epsilon(1e-4));
  CHECK(tail.bias() == doctest::Approx(-quantile_by_bisection(0.05)).epsilon(1e-9));

  // nonzero mean shifts the bias by -theta_0
  Vector theta(3);
  theta << 2.0, -1.0, 0.5;
  const auto shifted =
      optimal_halfspace(GaussianSpec::spherical(theta, 1.0), 0.5, LpMetric::linf());
  CHECK(shifted.bias() == doctest::Approx(-2.0).epsilon(1e-12));

  // the produced set has Gaussian measure alpha: P(w'x + b <= 0) = Phi(-b - theta_0)
  for (double a : {0.05, 0.25, 0.5, 0.9}) {
    const auto h = optimal_halfspace(spec, a, LpMetric::lp(3.0));
    CHECK(std_normal_cdf(-h.bias()) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("optimal half space for p = 2 aligns with the top eigenvector") {
  Matrix sigma(2, 2);
  sigma << 9.0, 0.0, 0.0, 1.0;
  const auto spec = GaussianSpec::full(Vector::Zero(2), sigma);
  const auto h = optimal_halfspace(spec, 0.5, LpMetric::l2());
  CHECK(h.weight()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(h.weight()[1]) <= 1e-12);
  CHECK(std::abs(h.bias()) <= 1e-12);

  // diagonal structure picks the max-variance axis; bias uses sqrt(d_max)
  Vector d(3);
  d << 1.0, 25.0, 4.0;
  const auto hd =
      optimal_halfspace(GaussianSpec::diagonal(Vector::Zero(3), d), 0.05, LpMetric::l2());
  CHECK(hd.weight()[1] == 1.0);
  CHECK(hd.bias() == doctest::Approx(5.0 * 1.6448536269514722).epsilon(1e-6));
}

TEST_CASE("optimal half space rejects unsupported combinations") {
  Vector d(2);
  d << 2.0, 1.0;
  const auto diag = GaussianSpec::diagonal(Vector::Zero(2), d);
  CHECK_THROWS_AS(optimal_halfspace(diag, 0.5, LpMetric::linf()), UnsupportedStructure);
  CHECK_THROWS_AS(optimal_halfspace(unit_spherical(2), 0.5, LpMetric::l1()), std::domain_error);
}

TEST_CASE("monte carlo: expansions of random half spaces respect the bound") {
  // Spherical Gaussian in small dimension; random half spaces with bias at a
  // quantile so the empirical measure stays in the interior of (0, 1).
  const Index n = 4;
  const Index m = 100000;
  const auto spec = unit_spherical(n);
  const Dataset sample = data::sample_gaussian(spec, m, 2024);

  CounterRng rng(99, 0);
  for (int rep = 0; rep < 5; ++rep) {
    Vector w(n);
    for (Index j = 0; j < n; ++j) w[j] = rng.next_normal();
    w /= w.norm();
    const double b = -0.3 * rep;  // measures from 0.5 down
    const HalfSpace h(w, b);
    for (double eps : {0.3, 1.0}) {
      for (const LpMetric& metric : {LpMetric::l2(), LpMetric::lp(4.0), LpMetric::linf()}) {
        const double alpha_hat = geometry::empirical_measure(sample, h);
        REQUIRE(alpha_hat > 0.0);
        REQUIRE(alpha_hat < 1.0);
        const double expanded =
            geometry::empirical_measure(sample, geometry::expand(h, eps, metric));
        const double bound = gii_lower_bound(spec, alpha_hat, eps, metric);
        const double noise = 3.0 * std::sqrt(alpha_hat * (1.0 - alpha_hat) / double(m));
        CHECK(expanded >= bound - noise);
      }
    }
  }
}

TEST_CASE("monte carlo: the axis-aligned half space attains the bound for p > 2") {
  const Index n = 4;
  const Index m = 100000;
  const auto spec = unit_spherical(n);
  const Dataset sample = data::sample_gaussian(spec, m, 555);
  const double alpha = 0.3;
  const double eps = 0.8;
  for (const LpMetric& metric : {LpMetric::lp(4.0), LpMetric::linf()}) {
    const auto h = optimal_halfspace(spec, alpha, metric);
    const double expanded = geometry::empirical_measure(sample, geometry::expand(h, eps, metric));
    const double bound = gii_lower_bound(spec, alpha, eps, metric);
    // the expansion of an axis-aligned half space equals its l2 expansion,
    // so the empirical measure matches the bound up to Monte-Carlo noise
    CHECK(std::abs(expanded - bound) <= 4.0 * std::sqrt(bound * (1.0 - bound) / double(m)));
  }
}
