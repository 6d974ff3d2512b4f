#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "turtle/core.hpp"

namespace turtle::engine {

/// Weighted mean of normalized components scaled to [0,100]. Missing weights
/// mean equal weights; given weights are renormalized to sum 1. Throws
/// AllZeroWeights, InvalidArgument (negative or mis-sized weights) and
/// SchemaMismatch.
TurtleScore turtle_score(const ScoreVector& normalized,
                         const std::optional<ScoreVector>& weights = std::nullopt);

/// 100 * (1 - d / bound) where bound is the metric's unit-cube maximum.
/// Throws InvalidDistance when d < 0 or d exceeds the bound by more than 1e-9.
double similarity_percentile(MetricKind kind, double d, std::size_t dim);

/// A preprocessed, normalized candidate.
struct Candidate {
    std::string id;
    ScoreVector features;
};

struct SimilarityQuery {
    // Stored candidate id, or a vector already normalized with corpus stats.
    std::variant<std::string, ScoreVector> target;
    // First entry is the sort key. Empty means all seven.
    std::vector<MetricKind> metrics;
    std::size_t k = 5;
    std::optional<ScoreVector> weights;

    /// Throws InvalidArgument when k == 0 or a metric repeats.
    void validate() const;
    const std::vector<MetricKind>& effective_metrics() const;
};

/// Rows for every candidate except a stored query itself, sorted by the first
/// requested metric's percentile descending with ties broken by ascending id,
/// truncated to k. Throws EmptyCorpus, UnknownCandidateId, SchemaMismatch.
std::vector<SimilarityRow> rank_similar(const SimilarityQuery& query, std::span<const Candidate> corpus);

struct MetricMean {
    MetricKind kind;
    double mean_percentile;

    friend bool operator==(const MetricMean&, const MetricMean&) = default;
};

/// Mean similarity percentile per metric over the corpus (excluding a stored
/// query), ascending; equal means keep the MetricKind enumeration order.
std::vector<MetricMean> metric_ordering_report(const SimilarityQuery& query,
                                               std::span<const Candidate> corpus);

struct RankedCandidate {
    SimilarityRow row;
    TurtleScore turtle;
};

struct SimilarityResult {
    std::string query_id;  // empty for an inline query
    TurtleScore query_turtle;
    std::vector<RankedCandidate> ranked;
};

/// rank_similar plus Turtle scores for the query and every returned row.
SimilarityResult similar(const SimilarityQuery& query, std::span<const Candidate> corpus);

}  // namespace turtle::engine
