#include "turtle/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace turtle {

namespace {

constexpr std::array<std::string_view, kComponentCount> kComponentNames = {
    "github", "learning_analytics", "kaggle", "error_archive", "job_shadowing", "puzzle",
};

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "chebyshev", "canberra", "euclidean", "manhattan", "minkowski3", "bray_curtis", "cosine",
};

}  // namespace

std::string_view component_name(Component c) {
    return kComponentNames[static_cast<std::size_t>(c)];
}

std::optional<Component> parse_component(std::string_view name) {
    for (std::size_t i = 0; i < kComponentCount; ++i)
        if (kComponentNames[i] == name) return static_cast<Component>(i);
    return std::nullopt;
}

std::string_view metric_name(MetricKind kind) { return kMetricNames[static_cast<std::size_t>(kind)]; }

std::optional<MetricKind> parse_metric(std::string_view name) {
    for (std::size_t i = 0; i < kMetricCount; ++i)
        if (kMetricNames[i] == name) return static_cast<MetricKind>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Schema> Schema::make(std::vector<std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (names[i] == names[j]) throw Error(ErrorCode::DuplicateComponent, names[i]);
    return std::shared_ptr<const Schema>(new Schema(std::move(names)));
}

const std::shared_ptr<const Schema>& Schema::turtle() {
    static const std::shared_ptr<const Schema> schema = [] {
        std::vector<std::string> names;
        for (auto n : kComponentNames) names.emplace_back(n);
        return make(std::move(names));
    }();
    return schema;
}

std::shared_ptr<const Schema> Schema::positional(std::size_t dim) {
    std::vector<std::string> names;
    names.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) names.push_back(fmt::format("x{}", i));
    return std::shared_ptr<const Schema>(new Schema(std::move(names)));
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

ScoreVector::ScoreVector(std::shared_ptr<const Schema> schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
    if (!schema_ || schema_->size() != values_.size())
        throw Error(ErrorCode::SchemaMismatch, "",
                    fmt::format("{} values for a {}-component schema", values_.size(),
                                schema_ ? schema_->size() : 0));
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i])) throw Error(ErrorCode::NonFiniteScore, schema_->names()[i]);
}

ScoreVector ScoreVector::of(std::vector<double> values) {
    auto schema = Schema::positional(values.size());
    return ScoreVector(std::move(schema), std::move(values));
}

double ScoreVector::at(std::string_view name) const {
    auto idx = schema_->index_of(name);
    if (!idx) throw Error(ErrorCode::UnknownComponent, std::string(name));
    return values_[*idx];
}

void require_comparable(const ScoreVector& p, const ScoreVector& q) {
    if (!p.comparable_with(q))
        throw Error(ErrorCode::SchemaMismatch, "",
                    fmt::format("schemas of size {} and {} differ", p.size(), q.size()));
}

// ---------------------------------------------------------------------------
// Timestamp

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > text.size()) return false;
    const char* first = text.data() + pos;
    const char* last = first + width;
    if (!std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; })) return false;
    std::from_chars(first, last, out);
    return true;
}

bool expect(std::string_view text, std::size_t pos, char c) {
    return pos < text.size() && text[pos] == c;
}

}  // namespace

Timestamp Timestamp::parse(std::string_view text) {
    using namespace std::chrono;
    auto fail = [&] { return Error(ErrorCode::InvalidTimestamp, "ingested_at", std::string(text)); };

    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_int(text, 0, 4, y) || !expect(text, 4, '-') || !read_int(text, 5, 2, mo) ||
        !expect(text, 7, '-') || !read_int(text, 8, 2, d) ||
        !(expect(text, 10, 'T') || expect(text, 10, 't')) || !read_int(text, 11, 2, h) ||
        !expect(text, 13, ':') || !read_int(text, 14, 2, mi) || !expect(text, 16, ':') ||
        !read_int(text, 17, 2, s))
        throw fail();

    std::size_t pos = 19;
    if (expect(text, pos, '.')) {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos, ++digits;
        if (digits == 0) throw fail();
    }

    int offset_minutes = 0;
    if (expect(text, pos, 'Z') || expect(text, pos, 'z')) {
        ++pos;
    } else if (expect(text, pos, '+') || expect(text, pos, '-')) {
        int sign = text[pos] == '-' ? -1 : 1;
        int oh = 0, om = 0;
        if (!read_int(text, pos + 1, 2, oh) || !expect(text, pos + 3, ':') ||
            !read_int(text, pos + 4, 2, om) || oh > 23 || om > 59)
            throw fail();
        offset_minutes = sign * (oh * 60 + om);
        pos += 6;
    } else {
        throw fail();
    }
    if (pos != text.size()) throw fail();

    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw fail();

    sys_seconds t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - minutes{offset_minutes};
    return Timestamp(t);
}

Timestamp Timestamp::now() {
    return Timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string Timestamp::to_rfc3339() const {
    using namespace std::chrono;
    auto day_start = floor<days>(t_);
    year_month_day ymd{day_start};
    hh_mm_ss<seconds> tod{t_ - day_start};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       tod.hours().count(), tod.minutes().count(), tod.seconds().count());
}

// ---------------------------------------------------------------------------
// CandidateProfile

std::optional<double> CandidateProfile::score(Component c) const {
    auto name = component_name(c);
    for (const auto& entry : scores)
        if (entry.name == name) return entry.value;
    return std::nullopt;
}

RawScores CandidateProfile::raw_scores() const {
    RawScores out;
    for (auto c : kAllComponents) out[static_cast<std::size_t>(c)] = score(c);
    return out;
}

CandidateProfile make_profile(std::string id, std::string display_name, const RawScores& scores,
                              std::optional<std::string> role, Timestamp ingested_at) {
    CandidateProfile p;
    p.id = std::move(id);
    p.display_name = std::move(display_name);
    for (auto c : kAllComponents)
        p.scores.push_back({std::string(component_name(c)), scores[static_cast<std::size_t>(c)]});
    p.role = std::move(role);
    p.ingested_at = ingested_at;
    return p;
}

CandidateProfile validate_profile(const CandidateProfile& raw) {
    if (raw.id.empty()) throw Error(ErrorCode::EmptyId, "id");

    std::array<bool, kComponentCount> seen{};
    for (const auto& entry : raw.scores) {
        auto c = parse_component(entry.name);
        if (!c) throw Error(ErrorCode::UnknownComponent, entry.name);
        auto idx = static_cast<std::size_t>(*c);
        if (seen[idx]) throw Error(ErrorCode::DuplicateComponent, entry.name);
        seen[idx] = true;

        if (!entry.value) {
            if (!component_optional(*c)) throw Error(ErrorCode::MissingComponent, entry.name);
            continue;
        }
        if (!std::isfinite(*entry.value)) throw Error(ErrorCode::NonFiniteScore, entry.name);
        if (*entry.value < 0.0) throw Error(ErrorCode::NegativeScore, entry.name);
    }
    for (auto c : kAllComponents)
        if (!seen[static_cast<std::size_t>(c)] && !component_optional(c))
            throw Error(ErrorCode::MissingComponent, std::string(component_name(c)));
    return raw;
}

// ---------------------------------------------------------------------------

void JobModel::validate() const {
    if (classes.empty()) throw Error(ErrorCode::InvalidArgument, "classes", "no classes");
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (classes[i] == classes[j])
                throw Error(ErrorCode::InvalidArgument, "classes", "duplicate class " + classes[i]);
    if (weights.size() != classes.size() || biases.size() != classes.size())
        throw Error(ErrorCode::InvalidArgument, "weights", "one weight vector and bias per class");
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (weights[c].size() != schema.size())
            throw Error(ErrorCode::InvalidArgument, "weights", "weight length differs from schema");
        if (!std::isfinite(biases[c])) throw Error(ErrorCode::InvalidArgument, "biases", "non-finite");
        for (double w : weights[c])
            if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "weights", "non-finite");
    }
}

}  // namespace turtle
