#pragma once

#include <span>

#include "turtle/core.hpp"

// Seven distance measures over equal-schema score vectors. The ScoreVector
// overloads check schemas and throw SchemaMismatch; the span kernels assume
// equal lengths and do no checking.
namespace turtle::metrics {

using Values = std::span<const double>;

double chebyshev(Values p, Values q);
// Terms with |p_i| + |q_i| == 0 contribute 0.
double canberra(Values p, Values q);
double euclidean(Values p, Values q);
double manhattan(Values p, Values q);
double minkowski3(Values p, Values q);
double minkowski(Values p, Values q, int order);
// 0 when both vectors are all-zero.
double bray_curtis(Values p, Values q);
// 1 when exactly one vector is all-zero, 0 when both are.
double cosine_distance(Values p, Values q);
double distance(MetricKind kind, Values p, Values q);

double chebyshev(const ScoreVector& p, const ScoreVector& q);
double canberra(const ScoreVector& p, const ScoreVector& q);
double euclidean(const ScoreVector& p, const ScoreVector& q);
double manhattan(const ScoreVector& p, const ScoreVector& q);
double minkowski3(const ScoreVector& p, const ScoreVector& q);
/// Throws InvalidOrder when order < 1.
double minkowski(const ScoreVector& p, const ScoreVector& q, int order);
double bray_curtis(const ScoreVector& p, const ScoreVector& q);
double cosine_distance(const ScoreVector& p, const ScoreVector& q);
double distance(MetricKind kind, const ScoreVector& p, const ScoreVector& q);

/// Largest value `kind` reaches on the unit cube [0,1]^dim.
double unit_cube_bound(MetricKind kind, std::size_t dim);

}  // namespace turtle::metrics
