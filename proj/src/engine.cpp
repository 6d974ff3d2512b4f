#include "turtle/engine.hpp"

#include <algorithm>
#include <cmath>

#include "turtle/metrics.hpp"

namespace turtle::engine {

TurtleScore turtle_score(const ScoreVector& normalized, const std::optional<ScoreVector>& weights) {
    const std::size_t n = normalized.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "normalized", "empty score vector");

    std::vector<double> w(n, 1.0);
    if (weights) {
        require_comparable(normalized, *weights);
        w.assign(weights->values().begin(), weights->values().end());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] < 0.0) throw Error(ErrorCode::InvalidArgument, normalized.schema().names()[i], "negative weight");
        total += w[i];
    }
    if (total <= 0.0) throw Error(ErrorCode::AllZeroWeights, "weights");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * normalized[i];
    double aggregate = std::clamp(100.0 * (acc / total), 0.0, 100.0);
    for (auto& x : w) x /= total;
    return TurtleScore{normalized, aggregate, ScoreVector(normalized.schema_ptr(), std::move(w))};
}

double similarity_percentile(MetricKind kind, double d, std::size_t dim) {
    constexpr double kTolerance = 1e-9;
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "dim", "dimension must be positive");
    const double bound = metrics::unit_cube_bound(kind, dim);
    if (!(d >= 0.0) || d > bound + kTolerance)
        throw Error(ErrorCode::InvalidDistance, std::string(metric_name(kind)), std::to_string(d));
    return std::clamp(100.0 * (1.0 - d / bound), 0.0, 100.0);
}

// ---------------------------------------------------------------------------

void SimilarityQuery::validate() const {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k", "k must be at least 1");
    for (std::size_t i = 0; i < metrics.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (metrics[i] == metrics[j])
                throw Error(ErrorCode::InvalidArgument, "metrics", "repeated metric");
}

const std::vector<MetricKind>& SimilarityQuery::effective_metrics() const {
    static const std::vector<MetricKind> all(kAllMetrics.begin(), kAllMetrics.end());
    return metrics.empty() ? all : metrics;
}

namespace {

struct ResolvedQuery {
    const ScoreVector* vector = nullptr;
    const std::string* stored_id = nullptr;
};

ResolvedQuery resolve(const SimilarityQuery& query, std::span<const Candidate> corpus) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus");
    query.validate();
    ResolvedQuery r;
    if (const auto* id = std::get_if<std::string>(&query.target)) {
        auto it = std::find_if(corpus.begin(), corpus.end(), [&](const Candidate& c) { return c.id == *id; });
        if (it == corpus.end()) throw Error(ErrorCode::UnknownCandidateId, *id);
        r.vector = &it->features;
        r.stored_id = id;
    } else {
        r.vector = &std::get<ScoreVector>(query.target);
    }
    return r;
}

SimilarityRow score_row(const ScoreVector& query, const Candidate& c) {
    require_comparable(query, c.features);
    SimilarityRow row;
    row.candidate_id = c.id;
    for (auto kind : kAllMetrics) {
        double d = metrics::distance(kind, query.values(), c.features.values());
        row.percentiles[static_cast<std::size_t>(kind)] = similarity_percentile(kind, d, query.size());
    }
    return row;
}

std::vector<SimilarityRow> score_all(const ResolvedQuery& q, std::span<const Candidate> corpus) {
    std::vector<SimilarityRow> rows;
    rows.reserve(corpus.size());
    for (const auto& c : corpus) {
        if (q.stored_id && c.id == *q.stored_id) continue;
        rows.push_back(score_row(*q.vector, c));
    }
    return rows;
}

}  // namespace

std::vector<SimilarityRow> rank_similar(const SimilarityQuery& query, std::span<const Candidate> corpus) {
    auto resolved = resolve(query, corpus);
    auto rows = score_all(resolved, corpus);
    const auto key = static_cast<std::size_t>(query.effective_metrics().front());
    std::sort(rows.begin(), rows.end(), [key](const SimilarityRow& a, const SimilarityRow& b) {
        if (a.percentiles[key] != b.percentiles[key]) return a.percentiles[key] > b.percentiles[key];
        return a.candidate_id < b.candidate_id;
    });
    if (rows.size() > query.k) rows.resize(query.k);
    return rows;
}

std::vector<MetricMean> metric_ordering_report(const SimilarityQuery& query,
                                               std::span<const Candidate> corpus) {
    auto resolved = resolve(query, corpus);
    auto rows = score_all(resolved, corpus);
    if (rows.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus", "no candidates besides the query");

    std::vector<MetricMean> report;
    for (auto kind : kAllMetrics) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r.percentile(kind);
        report.push_back({kind, sum / static_cast<double>(rows.size())});
    }
    std::stable_sort(report.begin(), report.end(), [](const MetricMean& a, const MetricMean& b) {
        return a.mean_percentile < b.mean_percentile;
    });
    return report;
}

SimilarityResult similar(const SimilarityQuery& query, std::span<const Candidate> corpus) {
    auto resolved = resolve(query, corpus);
    auto rows = rank_similar(query, corpus);

    SimilarityResult result;
    if (resolved.stored_id) result.query_id = *resolved.stored_id;
    result.query_turtle = turtle_score(*resolved.vector, query.weights);
    for (auto& row : rows) {
        auto it = std::find_if(corpus.begin(), corpus.end(),
                               [&](const Candidate& c) { return c.id == row.candidate_id; });
        result.ranked.push_back({std::move(row), turtle_score(it->features, query.weights)});
    }
    return result;
}

}  // namespace turtle::engine
