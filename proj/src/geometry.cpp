#include "conc/geometry.hpp"

#include <cmath>

namespace conc::geometry {

Vector projections(const Dataset& data, const Vector& w) {
  if (w.size() != data.n()) {
    throw DimensionMismatch("projections: weight dimension does not match dataset");
  }
  return data.samples() * w;
}

double distance_to_halfspace(const Eigen::Ref<const Vector>& x, const HalfSpace& h,
                             const LpMetric& metric) {
  const double margin = h.margin(x);
  if (margin <= 0.0) return 0.0;
  return margin / metric.dual_norm(h.weight());
}

Vector nearest_point(const Eigen::Ref<const Vector>& x, const HalfSpace& h,
                     const LpMetric& metric) {
  const double margin = h.margin(x);
  if (margin <= 0.0) {
    throw std::invalid_argument("nearest_point: x is already inside the half space");
  }
  const Vector& w = h.weight();
  const Index n = w.size();
  const Exponent& q = metric.q();
  Vector z = x;

  if (q == Exponent::finite(1.0)) {
    // p = inf: move every coordinate by the same signed step.
    const double step = margin / w.cwiseAbs().sum();
    for (Index j = 0; j < n; ++j) {
      if (w[j] > 0.0) {
        z[j] -= step;
      } else if (w[j] < 0.0) {
        z[j] += step;
      }
    }
    return z;
  }
  if (q.is_infinite()) {
    // p = 1: move only the largest-|w| coordinate (smallest index on ties).
    Index jmax = 0;
    for (Index j = 1; j < n; ++j) {
      if (std::abs(w[j]) > std::abs(w[jmax])) jmax = j;
    }
    z[jmax] -= margin / w[jmax];
    return z;
  }

  // General finite p: the Hoelder-equality witness
  //   z_j = x_j - d * sgn(w_j) * (|w_j|^q / sum_k |w_k|^q)^{1/p},
  // computed with entries rescaled by max|w_j| so large q cannot underflow.
  const double qv = q.value();
  const double pv = metric.p().value();
  const double wmax = w.cwiseAbs().maxCoeff();
  double denom = 0.0;
  Vector powq(n);
  for (Index j = 0; j < n; ++j) {
    powq[j] = std::pow(std::abs(w[j]) / wmax, qv);
    denom += powq[j];
  }
  const double d = margin / metric.dual_norm(w);
  for (Index j = 0; j < n; ++j) {
    if (w[j] == 0.0) continue;
    const double frac = std::pow(powq[j] / denom, 1.0 / pv);
    z[j] -= d * (w[j] > 0.0 ? frac : -frac);
  }
  return z;
}

HalfSpace expand(const HalfSpace& h, double epsilon, const LpMetric& metric) {
  if (!(epsilon >= 0.0)) throw std::domain_error("expand: epsilon must be >= 0");
  return HalfSpace(h.weight(), h.bias() - epsilon * metric.dual_norm(h.weight()));
}

double empirical_measure(const Dataset& data, const HalfSpace& h) {
  const Vector t = projections(data, h.weight());
  const double b = h.bias();
  Index count = 0;
  for (Index i = 0; i < t.size(); ++i) {
    if (t[i] + b <= 0.0) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(data.m());
}

std::vector<Index> member_rows(const Dataset& data, const HalfSpace& h) {
  const Vector t = projections(data, h.weight());
  std::vector<Index> rows;
  for (Index i = 0; i < t.size(); ++i) {
    if (t[i] + h.bias() <= 0.0) rows.push_back(i);
  }
  return rows;
}

double brute_force_expansion_measure(const Dataset& data, const std::vector<Index>& member_set,
                                     double epsilon, const LpMetric& metric) {
  if (data.m() > 2000) {
    throw std::invalid_argument("brute_force_expansion_measure: test oracle capped at m <= 2000");
  }
  if (!(epsilon >= 0.0)) {
    throw std::domain_error("brute_force_expansion_measure: epsilon must be >= 0");
  }
  for (Index r : member_set) {
    if (r < 0 || r >= data.m()) {
      throw std::out_of_range("brute_force_expansion_measure: member index out of range");
    }
  }
  const Matrix& x = data.samples();
  Index count = 0;
  Vector diff(data.n());
  for (Index i = 0; i < data.m(); ++i) {
    for (Index r : member_set) {
      diff = (x.row(i) - x.row(r)).transpose();
      if (lp_norm(diff, metric.p()) <= epsilon) {
        ++count;
        break;
      }
    }
  }
  return static_cast<double>(count) / static_cast<double>(data.m());
}

}  // namespace conc::geometry
