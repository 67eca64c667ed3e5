#include "conc/eval.hpp"

#include "conc/geometry.hpp"
#include "conc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conc::eval {

namespace {

std::vector<Index> shuffled_indices(Index m, CounterRng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = m - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

std::pair<double, double> mean_and_population_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw std::invalid_argument("split: fraction must be in (0, 1)");
  }
  const Index m = data.m();
  if (m < 2) throw std::invalid_argument("split: need m >= 2");
  Index k = static_cast<Index>(std::llround(fraction * static_cast<double>(m)));
  k = std::clamp<Index>(k, 1, m - 1);  // keep both splits non-empty

  CounterRng rng(seed, /*stream=*/0);
  const auto idx = shuffled_indices(m, rng);
  const std::vector<Index> train_rows(idx.begin(), idx.begin() + k);
  const std::vector<Index> test_rows(idx.begin() + k, idx.end());
  return {data.take_rows(train_rows, ":train"), data.take_rows(test_rows, ":test")};
}

TrialReport run_trials(const Dataset& data, const search::SearchConfig& cfg, int trials,
                       std::uint64_t base_seed, double split_fraction) {
  if (trials < 1) throw std::invalid_argument("run_trials: need trials >= 1");
  std::vector<ConcentrationEstimate> estimates;
  estimates.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const auto [train, test] = split(data, split_fraction, base_seed + static_cast<std::uint64_t>(t));
    const auto found = search::search_halfspace(train, cfg);
    estimates.push_back(ConcentrationEstimate{
        found.half_space, found.train_risk, found.train_adv_risk,
        geometry::empirical_measure(test, found.half_space),
        search::adv_risk(test, found.half_space, cfg.problem)});
  }
  return TrialReport::from_estimates(std::move(estimates));
}

std::vector<ConvergencePoint> convergence_sweep(const Dataset& data,
                                                const search::SearchConfig& cfg,
                                                std::vector<Index> train_sizes, Index test_size,
                                                int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("convergence_sweep: need trials >= 1");
  if (test_size < 1) throw std::invalid_argument("convergence_sweep: need test_size >= 1");
  std::sort(train_sizes.begin(), train_sizes.end());
  for (Index size : train_sizes) {
    if (size < 2) throw std::invalid_argument("convergence_sweep: train sizes must be >= 2");
    if (size + test_size > data.m()) {
      throw DataError("convergence_sweep: train size + test size exceeds the data pool");
    }
  }

  std::vector<ConvergencePoint> points;
  points.reserve(train_sizes.size());
  for (std::size_t si = 0; si < train_sizes.size(); ++si) {
    const Index size = train_sizes[si];
    std::vector<double> advs;
    advs.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t stream =
          (static_cast<std::uint64_t>(si) << 32) | static_cast<std::uint64_t>(t);
      CounterRng rng(seed, stream);
      const auto idx = shuffled_indices(data.m(), rng);
      const std::vector<Index> train_rows(idx.begin(), idx.begin() + size);
      const std::vector<Index> test_rows(idx.begin() + size, idx.begin() + size + test_size);
      const Dataset train = data.take_rows(train_rows, ":train");
      const Dataset test = data.take_rows(test_rows, ":test");
      const auto found = search::search_halfspace(train, cfg);
      advs.push_back(search::adv_risk(test, found.half_space, cfg.problem));
    }
    const auto [mean, sd] = mean_and_population_std(advs);
    points.push_back(ConvergencePoint{size, mean, sd, trials});
  }
  return points;
}

std::int64_t required_sample_size(Index n, double delta, double c1) {
  if (n < 2) throw std::domain_error("required_sample_size: need n >= 2");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::domain_error("required_sample_size: delta must be in (0, 1)");
  }
  if (!(c1 > 0.0)) throw std::domain_error("required_sample_size: c1 must be > 0");
  const double value =
      c1 * static_cast<double>(n) * std::log(static_cast<double>(n)) / (delta * delta);
  return static_cast<std::int64_t>(std::ceil(value));
}

}  // namespace conc::eval
