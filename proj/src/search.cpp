#include "conc/search.hpp"

#include "conc/geometry.hpp"
#include "conc/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace conc::search {

void SearchConfig::validate() const {
  if (exponent_schedule.empty()) {
    throw std::invalid_argument("SearchConfig: exponent schedule must be non-empty");
  }
  if (exponent_schedule.front() != 1) {
    throw std::invalid_argument("SearchConfig: exponent schedule must contain 1");
  }
  for (std::size_t i = 0; i < exponent_schedule.size(); ++i) {
    if (exponent_schedule[i] < 1 ||
        (i > 0 && exponent_schedule[i] <= exponent_schedule[i - 1])) {
      throw std::invalid_argument(
          "SearchConfig: exponent schedule must be strictly increasing positive integers");
    }
  }
}

namespace {

Index quantile_rank(double alpha, Index m) {
  const Index k = static_cast<Index>(std::ceil(alpha * static_cast<double>(m)));
  return std::clamp<Index>(k, 1, m);
}

}  // namespace

double quantile_bias(const Dataset& data, const Vector& w, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("quantile_bias: alpha must be in (0, 1)");
  }
  Vector t = geometry::projections(data, w);
  const Index k = quantile_rank(alpha, data.m());
  std::nth_element(t.data(), t.data() + (k - 1), t.data() + t.size());
  return -t[k - 1];
}

double adv_risk(const Dataset& data, const HalfSpace& h, const ConcentrationProblem& problem) {
  return geometry::empirical_measure(data,
                                     geometry::expand(h, problem.epsilon(), problem.metric()));
}

namespace {

// Candidates are enumerated component-major, then exponent rank (the
// schedule, then the axis limit), then sign (+ before -). That order is the
// tie-break order after (adversarial count, ||w||_q), so a flat index is
// enough to reduce deterministically.
struct CandidateLayout {
  const std::vector<int>& schedule;
  bool axis;
  Index per_component;  // 2 * (#schedule + axis)

  Index component(Index flat) const { return flat / per_component; }
  Index exponent_rank(Index flat) const { return (flat % per_component) / 2; }
  bool positive(Index flat) const { return flat % 2 == 0; }
  bool is_axis(Index flat) const {
    return axis && exponent_rank(flat) == static_cast<Index>(schedule.size());
  }
};

Vector candidate_weight(const spectral::PrincipalComponents& pc, const CandidateLayout& layout,
                        Index flat) {
  const Vector v = pc.component(layout.component(flat));
  Vector w = layout.is_axis(flat)
                 ? spectral::axis_limit(v)
                 : spectral::pow_transform(v, layout.schedule[layout.exponent_rank(flat)]);
  if (!layout.positive(flat)) w = -w;
  return w;
}

struct Best {
  Index count = std::numeric_limits<Index>::max();
  double dual = std::numeric_limits<double>::infinity();
  Index flat = std::numeric_limits<Index>::max();

  bool better_than(const Best& other) const {
    if (count != other.count) return count < other.count;
    if (dual != other.dual) return dual < other.dual;
    return flat < other.flat;
  }
};

}  // namespace

SearchResult search_halfspace(const Dataset& train, const SearchConfig& cfg) {
  cfg.validate();
  if (train.m() < 2) throw std::invalid_argument("search_halfspace: need m >= 2 samples");

  const auto pc = spectral::eigendecompose(spectral::sample_covariance(train));
  const Index n = train.n();
  const Index m = train.m();
  const double alpha = cfg.problem.alpha();
  const double epsilon = cfg.problem.epsilon();
  const LpMetric& metric = cfg.problem.metric();
  const Index k = quantile_rank(alpha, m);

  const CandidateLayout layout{cfg.exponent_schedule, cfg.include_axis_limit,
                               2 * (static_cast<Index>(cfg.exponent_schedule.size()) +
                                    (cfg.include_axis_limit ? 1 : 0))};
  const Index total = n * layout.per_component;
  constexpr Index kBlock = 64;
  const Index num_blocks = (total + kBlock - 1) / kBlock;

  std::vector<Best> block_best(num_blocks);
  const Matrix& x = train.samples();

  auto score_block = [&](Index block_index, Matrix& weights, Matrix& proj, Vector& column) {
    const Index begin = block_index * kBlock;
    const Index count = std::min(kBlock, total - begin);
    weights.resize(n, count);
    std::vector<double> duals(count);
    for (Index c = 0; c < count; ++c) {
      const Vector w = candidate_weight(pc, layout, begin + c);
      duals[c] = metric.dual_norm(w);
      weights.col(c) = w;
    }
    proj.noalias() = x * weights;  // m x count
    Best best;
    for (Index c = 0; c < count; ++c) {
      column = proj.col(c);
      std::nth_element(column.data(), column.data() + (k - 1), column.data() + m);
      const double shifted_bias = -column[k - 1] - epsilon * duals[c];
      Index adv_count = 0;
      for (Index i = 0; i < m; ++i) {
        if (proj(i, c) + shifted_bias <= 0.0) ++adv_count;
      }
      const Best cand{adv_count, duals[c], begin + c};
      if (cand.better_than(best)) best = cand;
    }
    block_best[block_index] = best;
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<Index>(hw, num_blocks));
  if (workers <= 1) {
    Matrix weights, proj;
    Vector column(m);
    for (Index bi = 0; bi < num_blocks; ++bi) score_block(bi, weights, proj, column);
  } else {
    std::atomic<Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        Matrix weights, proj;
        Vector column(m);
        try {
          for (Index bi = next.fetch_add(1); bi < num_blocks; bi = next.fetch_add(1)) {
            score_block(bi, weights, proj, column);
          }
        } catch (...) {
          std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  Best best;
  for (const Best& b : block_best) {
    if (b.better_than(best)) best = b;
  }

  // Rebuild the winner and recompute its numbers through the canonical
  // geometry path, so the returned risks agree bitwise with
  // empirical_measure / adv_risk on the same half space.
  const Vector w = candidate_weight(pc, layout, best.flat);
  HalfSpace h(w, quantile_bias(train, w, alpha));
  SearchResult result{h, geometry::empirical_measure(train, h),
                      adv_risk(train, h, cfg.problem)};
  return result;
}

}  // namespace conc::search
