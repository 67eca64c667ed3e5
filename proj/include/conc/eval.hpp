#pragma once

#include "conc/core.hpp"
#include "conc/search.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace conc::eval {

struct ConvergencePoint {
  Index train_size = 0;
  double mean_test_adv_risk = 0.0;
  double std_test_adv_risk = 0.0;
  int trials = 0;
};

/// Disjoint uniform random partition with |train| = round(fraction * m)
/// (clamped so both sides stay non-empty). Deterministic per seed.
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed);

/// Repeated trials: per trial, split with seed base_seed + t, search on the
/// train half, evaluate the found half space on the test half.
TrialReport run_trials(const Dataset& data, const search::SearchConfig& cfg, int trials,
                       std::uint64_t base_seed, double split_fraction = 0.5);

/// For each training size, sample disjoint train/test subsets (fresh per
/// trial, without replacement), search and evaluate; points emitted in
/// ascending train_size.
std::vector<ConvergencePoint> convergence_sweep(const Dataset& data,
                                                const search::SearchConfig& cfg,
                                                std::vector<Index> train_sizes, Index test_size,
                                                int trials, std::uint64_t seed);

/// ceil(c1 * n * ln(n) / delta^2): sample size at which the empirical
/// concentration over half spaces generalizes to within delta.
std::int64_t required_sample_size(Index n, double delta, double c1);

}  // namespace conc::eval
