#pragma once

#include "conc/core.hpp"

#include <vector>

namespace conc::search {

/// Candidate weight directions are the power-transformed principal
/// components for each s in the schedule (both signs), plus the signed axis
/// limit when enabled.
struct SearchConfig {
  explicit SearchConfig(ConcentrationProblem p) : problem(std::move(p)) {}

  std::vector<int> exponent_schedule{1, 2, 4, 8, 16, 32, 64};
  bool include_axis_limit = true;
  ConcentrationProblem problem;

  void validate() const;
};

struct SearchResult {
  HalfSpace half_space;
  double train_risk = 0.0;
  double train_adv_risk = 0.0;
};

/// b = -t where t is the ceil(alpha * m)-th smallest projection w'x_i, so
/// that H_{w,b} covers at least an alpha fraction of the rows exactly.
double quantile_bias(const Dataset& data, const Vector& w, double alpha);

/// Empirical measure of the epsilon-expansion of h. Computed through
/// expand() so it agrees with empirical_measure bit for bit.
double adv_risk(const Dataset& data, const HalfSpace& h, const ConcentrationProblem& problem);

/// Heuristic search over all principal components, exponents and signs for
/// the half space of training measure >= alpha whose expansion measure is
/// smallest. Deterministic: candidates are scored independently and reduced
/// in a fixed order with tie-breaks (smaller ||w||_q, earlier component,
/// smaller s, positive sign).
SearchResult search_halfspace(const Dataset& train, const SearchConfig& cfg);

}  // namespace conc::search
