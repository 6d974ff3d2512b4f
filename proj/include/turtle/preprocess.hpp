#pragma once

#include <array>
#include <span>
#include <vector>

#include "turtle/core.hpp"

// Corpus preparation: median imputation, IQR-fence clipping and min-max
// normalization, column by column over the six components.
namespace turtle::preprocess {

struct ColumnStats {
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::size_t count_nonnull = 0;

    double iqr() const { return q3 - q1; }
    /// Fences floored at 0 since scores are nonnegative.
    double lower_fence() const;
    double upper_fence() const;

    friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

struct CorpusStats {
    std::array<ColumnStats, kComponentCount> columns{};

    const ColumnStats& operator[](Component c) const { return columns[static_cast<std::size_t>(c)]; }
    ColumnStats& operator[](Component c) { return columns[static_cast<std::size_t>(c)]; }

    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

using RawRow = RawScores;
using Row = std::array<double, kComponentCount>;

/// Quantile of an ascending sample by linear interpolation at (n-1)*q.
double quantile(std::span<const double> sorted, double q);

/// Stats over one column; `subject` names the column in errors. Throws
/// AllAbsentComponent for an empty column.
ColumnStats column_stats(std::vector<double> values, std::string_view subject = "column");

/// Per-component stats over present values. Throws EmptyCorpus or
/// AllAbsentComponent(name).
CorpusStats compute_stats(std::span<const RawRow> corpus);
CorpusStats compute_stats(std::span<const Row> corpus);

/// Replaces absent values by the component median. Throws AllAbsentComponent
/// when the stats have no values for a component that needs filling.
std::vector<Row> impute(std::span<const RawRow> corpus, const CorpusStats& stats);

/// Clamps each value into its component's IQR fences.
std::vector<Row> clip_outliers(std::span<const Row> corpus, const CorpusStats& stats);

/// Min-max scaling to [0,1]; constant columns map to 0. Out-of-range inputs are
/// clamped, which only matters for queries scaled with corpus stats.
std::vector<Row> normalize(std::span<const Row> corpus, const CorpusStats& stats);

std::vector<RawRow> raw_rows(std::span<const CandidateProfile> corpus);

/// Fitted pipeline: stats before clipping (imputation, fences) and after
/// clipping (min-max bounds).
struct Pipeline {
    CorpusStats raw;
    CorpusStats clipped;

    /// impute -> clip -> recompute stats -> normalize over the whole corpus.
    static Pipeline fit(std::span<const RawRow> corpus);

    /// Applies the fitted steps to one row; output is in [0,1].
    Row transform(const RawRow& row) const;
    std::vector<Row> transform(std::span<const RawRow> corpus) const;

    friend bool operator==(const Pipeline&, const Pipeline&) = default;
};

ScoreVector to_vector(const Row& row);
/// Throws SchemaMismatch unless `v` uses the six-component schema.
Row from_vector(const ScoreVector& v);

}  // namespace turtle::preprocess
