#include "turtle/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace turtle::metrics {

double chebyshev(Values p, Values q) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::abs(q[i] - p[i]));
    return m;
}

double canberra(Values p, Values q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double den = std::abs(q[i]) + std::abs(p[i]);
        if (den == 0.0) continue;
        sum += std::abs(q[i] - p[i]) / den;
    }
    return sum;
}

double euclidean(Values p, Values q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = q[i] - p[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double manhattan(Values p, Values q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(q[i] - p[i]);
    return sum;
}

double minkowski3(Values p, Values q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = std::abs(p[i] - q[i]);
        sum += d * d * d;
    }
    return std::cbrt(sum);
}

double minkowski(Values p, Values q, int order) {
    if (order < 1) throw Error(ErrorCode::InvalidOrder, std::to_string(order));
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::pow(std::abs(p[i] - q[i]), order);
    return std::pow(sum, 1.0 / order);
}

double bray_curtis(Values p, Values q) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        num += std::abs(p[i] - q[i]);
        den += std::abs(p[i] + q[i]);
    }
    if (den == 0.0) return 0.0;
    return num / den;
}

double cosine_distance(Values p, Values q) {
    double dot = 0.0;
    double pp = 0.0;
    double qq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * q[i];
        pp += p[i] * p[i];
        qq += q[i] * q[i];
    }
    if (pp == 0.0 && qq == 0.0) return 0.0;
    if (pp == 0.0 || qq == 0.0) return 1.0;
    if (std::equal(p.begin(), p.end(), q.begin(), q.end())) return 0.0;
    // sqrt of the product keeps the expression symmetric in p and q.
    double sim = dot / std::sqrt(pp * qq);
    return std::clamp(1.0 - sim, 0.0, 2.0);
}

double distance(MetricKind kind, Values p, Values q) {
    switch (kind) {
        case MetricKind::Chebyshev: return chebyshev(p, q);
        case MetricKind::Canberra: return canberra(p, q);
        case MetricKind::Euclidean: return euclidean(p, q);
        case MetricKind::Manhattan: return manhattan(p, q);
        case MetricKind::Minkowski3: return minkowski3(p, q);
        case MetricKind::BrayCurtis: return bray_curtis(p, q);
        case MetricKind::Cosine: return cosine_distance(p, q);
    }
    throw Error(ErrorCode::InvalidArgument, "metric");
}

// ---------------------------------------------------------------------------

double chebyshev(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return chebyshev(p.values(), q.values());
}

double canberra(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return canberra(p.values(), q.values());
}

double euclidean(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return euclidean(p.values(), q.values());
}

double manhattan(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return manhattan(p.values(), q.values());
}

double minkowski3(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return minkowski3(p.values(), q.values());
}

double minkowski(const ScoreVector& p, const ScoreVector& q, int order) {
    require_comparable(p, q);
    return minkowski(p.values(), q.values(), order);
}

double bray_curtis(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return bray_curtis(p.values(), q.values());
}

double cosine_distance(const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return cosine_distance(p.values(), q.values());
}

double distance(MetricKind kind, const ScoreVector& p, const ScoreVector& q) {
    require_comparable(p, q);
    return distance(kind, p.values(), q.values());
}

double unit_cube_bound(MetricKind kind, std::size_t dim) {
    const auto n = static_cast<double>(dim);
    switch (kind) {
        case MetricKind::Chebyshev: return 1.0;
        case MetricKind::Canberra: return n;
        case MetricKind::Euclidean: return std::sqrt(n);
        case MetricKind::Manhattan: return n;
        case MetricKind::Minkowski3: return std::cbrt(n);
        case MetricKind::BrayCurtis: return 1.0;
        case MetricKind::Cosine: return 1.0;
    }
    throw Error(ErrorCode::InvalidArgument, "metric");
}

}  // namespace turtle::metrics
