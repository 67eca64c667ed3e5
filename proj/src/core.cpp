#include "conc/core.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace conc {

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

std::string LpMetric::to_string() const { return "l" + p_.to_string(); }

Exponent conjugate(const Exponent& p) {
  if (p.is_infinite()) return Exponent::finite(1.0);
  const double v = p.value();
  if (v == 1.0) return Exponent::infinity();
  return Exponent::finite(v / (v - 1.0));
}

double lp_norm(const Eigen::Ref<const Vector>& x, const Exponent& p) {
  if (p.is_infinite()) return x.cwiseAbs().maxCoeff();
  const double v = p.value();
  if (v == 1.0) return x.cwiseAbs().sum();
  if (v == 2.0) return x.norm();
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    sum += std::pow(std::abs(x[j]) / scale, v);
  }
  return scale * std::pow(sum, 1.0 / v);
}

Dataset::Dataset(Matrix samples, std::string source)
    : samples_(std::move(samples)), source_(std::move(source)) {
  if (samples_.rows() < 1 || samples_.cols() < 1) {
    throw std::invalid_argument("Dataset: need m >= 1 and n >= 1");
  }
  if (!samples_.allFinite()) {
    throw std::invalid_argument("Dataset: samples must be finite (no NaN/Inf)");
  }
}

Dataset Dataset::take_rows(const std::vector<Index>& rows, const std::string& tag) const {
  Matrix out(static_cast<Index>(rows.size()), n());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= m()) throw std::out_of_range("Dataset::take_rows: row index out of range");
    out.row(static_cast<Index>(i)) = samples_.row(r);
  }
  return Dataset(std::move(out), source_ + tag);
}

HalfSpace::HalfSpace(Vector w, double b) : w_(std::move(w)), b_(b) {
  if (w_.size() < 1) throw std::invalid_argument("HalfSpace: empty weight vector");
  const double norm = w_.norm();
  if (!std::isfinite(norm) || !std::isfinite(b_) || std::abs(norm - 1.0) > 1e-6) {
    throw std::invalid_argument("HalfSpace: ||w||_2 must be within 1e-6 of 1");
  }
  if (std::abs(norm - 1.0) > 1e-9) {
    // Dividing the defining inequality by ||w|| preserves the set exactly.
    w_ /= norm;
    b_ /= norm;
  }
}

double HalfSpace::margin(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != w_.size()) {
    throw DimensionMismatch("HalfSpace::margin: point dimension mismatch");
  }
  return w_.dot(x) + b_;
}

ConcentrationProblem::ConcentrationProblem(double alpha, double epsilon, LpMetric metric)
    : alpha_(alpha), epsilon_(epsilon), metric_(std::move(metric)) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("ConcentrationProblem: alpha must be in (0, 1)");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("ConcentrationProblem: epsilon must be finite and >= 0");
  }
}

namespace {

std::pair<double, double> mean_and_population_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n;
  return {mean, std::sqrt(var)};
}

}  // namespace

TrialReport TrialReport::from_estimates(std::vector<ConcentrationEstimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("TrialReport: need at least one estimate");
  std::vector<double> risks, advs;
  risks.reserve(estimates.size());
  advs.reserve(estimates.size());
  for (const auto& e : estimates) {
    risks.push_back(e.test_risk);
    advs.push_back(e.test_adv_risk);
  }
  TrialReport report;
  report.estimates = std::move(estimates);
  std::tie(report.mean_test_risk, report.std_test_risk) = mean_and_population_std(risks);
  std::tie(report.mean_test_adv_risk, report.std_test_adv_risk) = mean_and_population_std(advs);
  return report;
}

}  // namespace conc
