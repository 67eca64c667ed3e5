#pragma once

#include "conc/core.hpp"

#include <vector>

namespace conc::geometry {

/// X * w for every sample row. All membership counting routes through this
/// so identical inputs give bitwise-identical projections.
Vector projections(const Dataset& data, const Vector& w);

/// lp distance from x to the half space: 0 inside, else (w'x + b) / ||w||_q.
double distance_to_halfspace(const Eigen::Ref<const Vector>& x, const HalfSpace& h,
                             const LpMetric& metric);

/// Closest point of the half space to an exterior x. The witness lies on the
/// boundary and attains distance_to_halfspace.
Vector nearest_point(const Eigen::Ref<const Vector>& x, const HalfSpace& h,
                     const LpMetric& metric);

/// The epsilon-expansion of a half space is the half space with bias shifted
/// by -epsilon * ||w||_q.
HalfSpace expand(const HalfSpace& h, double epsilon, const LpMetric& metric);

/// Fraction of rows with w'x + b <= 0. Exact comparison, no tolerance:
/// boundary points count as members.
double empirical_measure(const Dataset& data, const HalfSpace& h);

/// Row indices of the members of h.
std::vector<Index> member_rows(const Dataset& data, const HalfSpace& h);

/// Test oracle: fraction of rows within lp distance epsilon of some member
/// row, by exhaustive pairwise distances. Quadratic; capped at m <= 2000.
double brute_force_expansion_measure(const Dataset& data, const std::vector<Index>& member_set,
                                     double epsilon, const LpMetric& metric);

}  // namespace conc::geometry
