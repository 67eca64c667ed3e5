#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conc {

// One sample per row; every hot loop scans samples, so storage is row-major.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Two objects disagree on the ambient dimension n.
class DimensionMismatch : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A (covariance structure, p) combination with no supported closed form.
class UnsupportedStructure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed, truncated or insufficient input data.
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Extended-real exponent in [1, inf]. Infinity is a tag; it never enters
/// floating-point arithmetic as a norm exponent.
class Exponent {
 public:
  static Exponent finite(double value) {
    if (!(value >= 1.0) || !std::isfinite(value)) {
      throw std::domain_error("Exponent: p must be a finite real >= 1");
    }
    return Exponent(value, false);
  }
  static Exponent infinity() { return Exponent(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }
  double value() const {
    if (infinite_) throw std::logic_error("Exponent: no finite value for p = inf");
    return value_;
  }

  friend bool operator==(const Exponent& a, const Exponent& b) noexcept {
    if (a.infinite_ != b.infinite_) return false;
    return a.infinite_ || a.value_ == b.value_;
  }
  friend bool operator!=(const Exponent& a, const Exponent& b) noexcept { return !(a == b); }

  std::string to_string() const;

 private:
  Exponent(double value, bool infinite) : value_(value), infinite_(infinite) {}
  double value_;
  bool infinite_;
};

/// Hoelder conjugate: 1/p + 1/q = 1, with conjugate(1) = inf and
/// conjugate(inf) = 1.
Exponent conjugate(const Exponent& p);

/// ||x||_p with explicit case analysis for p in {1, 2, inf}; the general
/// finite-p branch rescales by the max entry so large exponents cannot
/// underflow to zero.
double lp_norm(const Eigen::Ref<const Vector>& x, const Exponent& p);

/// Perturbation norm p together with its derived Hoelder conjugate q.
class LpMetric {
 public:
  explicit LpMetric(Exponent p) : p_(p), q_(conjugate(p)) {}

  static LpMetric l1() { return LpMetric(Exponent::finite(1.0)); }
  static LpMetric l2() { return LpMetric(Exponent::finite(2.0)); }
  static LpMetric linf() { return LpMetric(Exponent::infinity()); }
  static LpMetric lp(double p) { return LpMetric(Exponent::finite(p)); }

  const Exponent& p() const noexcept { return p_; }
  const Exponent& q() const noexcept { return q_; }

  double norm(const Eigen::Ref<const Vector>& x) const { return lp_norm(x, p_); }
  double dual_norm(const Eigen::Ref<const Vector>& x) const { return lp_norm(x, q_); }

  std::string to_string() const;

 private:
  Exponent p_;
  Exponent q_;
};

/// An m x n matrix of finite samples (one row per instance) with a
/// provenance tag.
class Dataset {
 public:
  Dataset(Matrix samples, std::string source);

  Index m() const noexcept { return samples_.rows(); }
  Index n() const noexcept { return samples_.cols(); }
  const Matrix& samples() const noexcept { return samples_; }
  const std::string& source() const noexcept { return source_; }

  /// New dataset holding the given rows, in the given order.
  Dataset take_rows(const std::vector<Index>& rows, const std::string& tag) const;

 private:
  Matrix samples_;
  std::string source_;
};

/// H = {x : w'x + b <= 0} with ||w||_2 = 1.
///
/// Construction keeps w bit-exact when its norm is already within 1e-9 of 1,
/// renormalizes (scaling b by the same factor, which preserves the set) when
/// within 1e-6, and rejects anything further off.
class HalfSpace {
 public:
  HalfSpace(Vector w, double b);

  const Vector& weight() const noexcept { return w_; }
  double bias() const noexcept { return b_; }
  Index dim() const noexcept { return w_.size(); }

  double margin(const Eigen::Ref<const Vector>& x) const;
  bool contains(const Eigen::Ref<const Vector>& x) const { return margin(x) <= 0.0; }

 private:
  Vector w_;
  double b_;
};

/// The problem statement (alpha, epsilon, p).
class ConcentrationProblem {
 public:
  ConcentrationProblem(double alpha, double epsilon, LpMetric metric);

  double alpha() const noexcept { return alpha_; }
  double epsilon() const noexcept { return epsilon_; }
  const LpMetric& metric() const noexcept { return metric_; }

 private:
  double alpha_;
  double epsilon_;
  LpMetric metric_;
};

/// Risk = empirical measure of the produced half space; adversarial risk =
/// empirical measure of its epsilon-expansion, on each split.
struct ConcentrationEstimate {
  HalfSpace half_space;
  double train_risk = 0.0;
  double train_adv_risk = 0.0;
  double test_risk = 0.0;
  double test_adv_risk = 0.0;
};

/// Per-trial estimates plus mean / population standard deviation of the test
/// fields.
struct TrialReport {
  std::vector<ConcentrationEstimate> estimates;
  double mean_test_risk = 0.0;
  double std_test_risk = 0.0;
  double mean_test_adv_risk = 0.0;
  double std_test_adv_risk = 0.0;

  static TrialReport from_estimates(std::vector<ConcentrationEstimate> estimates);
};

}  // namespace conc
