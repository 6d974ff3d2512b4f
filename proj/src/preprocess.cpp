#include "turtle/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace turtle::preprocess {

double ColumnStats::lower_fence() const { return std::max(0.0, q1 - 1.5 * iqr()); }

double ColumnStats::upper_fence() const { return q3 + 1.5 * iqr(); }

double quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::EmptyCorpus, "quantile");
    double pos = static_cast<double>(sorted.size() - 1) * q;
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ColumnStats column_stats(std::vector<double> values, std::string_view subject) {
    if (values.empty()) throw Error(ErrorCode::AllAbsentComponent, std::string(subject));
    std::sort(values.begin(), values.end());
    ColumnStats s;
    s.count_nonnull = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    return s;
}

namespace {

template <typename RowT, typename Get>
CorpusStats stats_over(std::span<const RowT> corpus, Get get) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus");
    CorpusStats stats;
    for (auto c : kAllComponents) {
        auto idx = static_cast<std::size_t>(c);
        std::vector<double> column;
        column.reserve(corpus.size());
        for (const auto& row : corpus)
            if (auto v = get(row[idx])) column.push_back(*v);
        stats.columns[idx] = column_stats(std::move(column), component_name(c));
    }
    return stats;
}

double clamp_to(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double impute_value(const std::optional<double>& v, const ColumnStats& s, Component c) {
    if (v) return *v;
    if (s.count_nonnull == 0) throw Error(ErrorCode::AllAbsentComponent, std::string(component_name(c)));
    return s.median;
}

double clip_value(double x, const ColumnStats& s) { return clamp_to(x, s.lower_fence(), s.upper_fence()); }

double normalize_value(double x, const ColumnStats& s) {
    double range = s.max - s.min;
    if (range <= 0.0) return 0.0;
    return clamp_to((x - s.min) / range, 0.0, 1.0);
}

}  // namespace

CorpusStats compute_stats(std::span<const RawRow> corpus) {
    return stats_over(corpus, [](const std::optional<double>& v) { return v; });
}

CorpusStats compute_stats(std::span<const Row> corpus) {
    return stats_over(corpus, [](double v) { return std::optional<double>(v); });
}

std::vector<Row> impute(std::span<const RawRow> corpus, const CorpusStats& stats) {
    std::vector<Row> out(corpus.size());
    for (std::size_t r = 0; r < corpus.size(); ++r)
        for (auto c : kAllComponents) {
            auto idx = static_cast<std::size_t>(c);
            out[r][idx] = impute_value(corpus[r][idx], stats.columns[idx], c);
        }
    return out;
}

std::vector<Row> clip_outliers(std::span<const Row> corpus, const CorpusStats& stats) {
    std::vector<Row> out(corpus.begin(), corpus.end());
    for (auto& row : out)
        for (std::size_t i = 0; i < kComponentCount; ++i) row[i] = clip_value(row[i], stats.columns[i]);
    return out;
}

std::vector<Row> normalize(std::span<const Row> corpus, const CorpusStats& stats) {
    std::vector<Row> out(corpus.begin(), corpus.end());
    for (auto& row : out)
        for (std::size_t i = 0; i < kComponentCount; ++i) row[i] = normalize_value(row[i], stats.columns[i]);
    return out;
}

std::vector<RawRow> raw_rows(std::span<const CandidateProfile> corpus) {
    std::vector<RawRow> rows;
    rows.reserve(corpus.size());
    for (const auto& p : corpus) rows.push_back(p.raw_scores());
    return rows;
}

Pipeline Pipeline::fit(std::span<const RawRow> corpus) {
    Pipeline p;
    p.raw = compute_stats(corpus);
    auto filled = impute(corpus, p.raw);
    auto clipped = clip_outliers(filled, p.raw);
    p.clipped = compute_stats(std::span<const Row>(clipped));
    return p;
}

Row Pipeline::transform(const RawRow& row) const {
    Row out{};
    for (auto c : kAllComponents) {
        auto i = static_cast<std::size_t>(c);
        double x = impute_value(row[i], raw.columns[i], c);
        x = clip_value(x, raw.columns[i]);
        out[i] = normalize_value(x, clipped.columns[i]);
    }
    return out;
}

std::vector<Row> Pipeline::transform(std::span<const RawRow> corpus) const {
    std::vector<Row> out;
    out.reserve(corpus.size());
    for (const auto& row : corpus) out.push_back(transform(row));
    return out;
}

ScoreVector to_vector(const Row& row) {
    return ScoreVector(Schema::turtle(), std::vector<double>(row.begin(), row.end()));
}

Row from_vector(const ScoreVector& v) {
    if (!(v.schema() == *Schema::turtle()))
        throw Error(ErrorCode::SchemaMismatch, "", "expected the six Turtle components");
    Row row{};
    std::copy(v.values().begin(), v.values().end(), row.begin());
    return row;
}

}  // namespace turtle::preprocess
