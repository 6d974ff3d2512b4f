#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turtle/error.hpp"

namespace turtle {

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

inline constexpr std::size_t kComponentCount = 6;

enum class Component : std::size_t {
    github = 0,
    learning_analytics,
    kaggle,
    error_archive,
    job_shadowing,
    puzzle,
};

inline constexpr std::array<Component, kComponentCount> kAllComponents = {
    Component::github,        Component::learning_analytics, Component::kaggle,
    Component::error_archive, Component::job_shadowing,      Component::puzzle,
};

std::string_view component_name(Component c);
std::optional<Component> parse_component(std::string_view name);

// Only kaggle may be absent from a profile.
constexpr bool component_optional(Component c) { return c == Component::kaggle; }

// ---------------------------------------------------------------------------
// ScoreVector
// ---------------------------------------------------------------------------

/// Ordered list of unique component names shared by every vector of a corpus.
class Schema {
public:
    /// Throws DuplicateComponent when a name repeats.
    static std::shared_ptr<const Schema> make(std::vector<std::string> names);

    /// The six Turtle components in canonical order.
    static const std::shared_ptr<const Schema>& turtle();

    /// Anonymous schema `x0 .. x{dim-1}` for ad-hoc vectors.
    static std::shared_ptr<const Schema> positional(std::size_t dim);

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::optional<std::size_t> index_of(std::string_view name) const;

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    explicit Schema(std::vector<std::string> names) : names_(std::move(names)) {}
    std::vector<std::string> names_;
};

class ScoreVector {
public:
    /// Empty vector over an empty schema.
    ScoreVector() : ScoreVector(Schema::positional(0), {}) {}

    /// Throws SchemaMismatch on a length mismatch and NonFiniteScore naming
    /// the first NaN/infinite component.
    ScoreVector(std::shared_ptr<const Schema> schema, std::vector<double> values);

    /// Vector over a positional schema.
    static ScoreVector of(std::vector<double> values);
    static ScoreVector of(std::initializer_list<double> values) {
        return of(std::vector<double>(values));
    }

    const Schema& schema() const noexcept { return *schema_; }
    const std::shared_ptr<const Schema>& schema_ptr() const noexcept { return schema_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Throws UnknownComponent.
    double at(std::string_view name) const;

    bool comparable_with(const ScoreVector& other) const noexcept {
        return schema_ == other.schema_ || *schema_ == *other.schema_;
    }

    friend bool operator==(const ScoreVector& a, const ScoreVector& b) {
        return a.comparable_with(b) && a.values_ == b.values_;
    }

private:
    std::shared_ptr<const Schema> schema_;
    std::vector<double> values_;
};

/// Throws SchemaMismatch unless both vectors share a schema.
void require_comparable(const ScoreVector& p, const ScoreVector& q);

// ---------------------------------------------------------------------------
// Timestamp
// ---------------------------------------------------------------------------

/// Second-resolution UTC instant; informational only.
class Timestamp {
public:
    Timestamp() = default;
    explicit Timestamp(std::chrono::sys_seconds t) : t_(t) {}

    /// Accepts RFC 3339 `YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)`; fraction is
    /// dropped. Throws InvalidTimestamp.
    static Timestamp parse(std::string_view text);
    static Timestamp now();

    /// Always `YYYY-MM-DDTHH:MM:SSZ`.
    std::string to_rfc3339() const;
    std::chrono::sys_seconds time() const noexcept { return t_; }

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    std::chrono::sys_seconds t_{};
};

// ---------------------------------------------------------------------------
// CandidateProfile
// ---------------------------------------------------------------------------

struct ComponentScore {
    std::string name;
    std::optional<double> value;  // nullopt marks an absent score

    friend bool operator==(const ComponentScore&, const ComponentScore&) = default;
};

using RawScores = std::array<std::optional<double>, kComponentCount>;

struct CandidateProfile {
    std::string id;
    std::string display_name;
    std::vector<ComponentScore> scores;
    std::optional<std::string> role;
    Timestamp ingested_at;

    /// First entry named after `c`, or nullopt when absent or missing.
    std::optional<double> score(Component c) const;

    /// Scores in canonical component order.
    RawScores raw_scores() const;

    friend bool operator==(const CandidateProfile&, const CandidateProfile&) = default;
};

/// Builds a profile whose score list follows canonical component order.
CandidateProfile make_profile(std::string id, std::string display_name, const RawScores& scores,
                              std::optional<std::string> role = std::nullopt,
                              Timestamp ingested_at = {});

/// Returns `raw` unchanged when every invariant holds; otherwise throws
/// EmptyId, UnknownComponent, DuplicateComponent, NonFiniteScore,
/// NegativeScore or MissingComponent with the offending field as subject.
CandidateProfile validate_profile(const CandidateProfile& raw);

// ---------------------------------------------------------------------------
// Scores, metrics and models
// ---------------------------------------------------------------------------

struct TurtleScore {
    ScoreVector normalized;
    double aggregate = 0.0;  // in [0, 100]
    ScoreVector weights;     // nonnegative, sums to 1
};

inline constexpr std::size_t kMetricCount = 7;

enum class MetricKind : std::size_t {
    Chebyshev = 0,
    Canberra,
    Euclidean,
    Manhattan,
    Minkowski3,
    BrayCurtis,
    Cosine,
};

inline constexpr std::array<MetricKind, kMetricCount> kAllMetrics = {
    MetricKind::Chebyshev, MetricKind::Canberra,   MetricKind::Euclidean, MetricKind::Manhattan,
    MetricKind::Minkowski3, MetricKind::BrayCurtis, MetricKind::Cosine,
};

std::string_view metric_name(MetricKind kind);
/// Accepts the snake-case names produced by `metric_name`.
std::optional<MetricKind> parse_metric(std::string_view name);

/// One candidate's similarity percentiles against a query, one per metric.
struct SimilarityRow {
    std::string candidate_id;
    std::array<double, kMetricCount> percentiles{};

    double percentile(MetricKind kind) const {
        return percentiles[static_cast<std::size_t>(kind)];
    }

    friend bool operator==(const SimilarityRow&, const SimilarityRow&) = default;
};

struct TrainingConfig {
    int epochs = 200;
    double lambda = 1e-3;
    double eta0 = 0.1;
    std::string schedule = "inverse_scaling";  // eta0 / (1 + lambda * t)
    std::uint64_t seed = 42;
    bool shuffle = true;

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

/// One-vs-rest linear SVM: one weight vector and bias per class.
struct JobModel {
    std::vector<std::string> classes;
    std::vector<std::string> schema;
    std::vector<std::vector<double>> weights;
    std::vector<double> biases;
    TrainingConfig config;
    std::uint64_t snapshot_version = 0;

    /// Throws InvalidArgument when the shape or finiteness invariants fail.
    void validate() const;

    friend bool operator==(const JobModel&, const JobModel&) = default;
};

}  // namespace turtle
