#include "turtle/record.hpp"

#include <charconv>
#include <set>

#include <fmt/format.h>

namespace turtle::record {

namespace {

constexpr std::string_view kId = "id";
constexpr std::string_view kName = "name";
constexpr std::string_view kRole = "role";
constexpr std::string_view kIngestedAt = "ingested_at";

bool is_known_field(std::string_view key) {
    return key == kId || key == kName || key == kRole || key == kIngestedAt || parse_component(key).has_value();
}

Error parse_error(std::string_view field, std::string detail) {
    return Error(ErrorCode::ParseError, std::string(field), std::move(detail));
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

}  // namespace

Json to_json(const CandidateProfile& profile) {
    Json j;
    j[std::string(kId)] = profile.id;
    j[std::string(kName)] = profile.display_name;
    for (auto c : kAllComponents) {
        auto v = profile.score(c);
        j[std::string(component_name(c))] = v ? Json(*v) : Json(nullptr);
    }
    j[std::string(kRole)] = profile.role ? Json(*profile.role) : Json(nullptr);
    j[std::string(kIngestedAt)] = profile.ingested_at.to_rfc3339();
    return j;
}

CandidateProfile from_json(const Json& object, Timestamp default_time) {
    if (!object.is_object()) throw parse_error("record", "expected a JSON object");

    CandidateProfile p;
    p.ingested_at = default_time;
    bool have_id = false;
    for (auto it = object.begin(); it != object.end(); ++it) {
        const std::string& key = it.key();
        const Json& v = it.value();
        if (key == kId) {
            if (!v.is_string()) throw parse_error(key, "expected a string");
            p.id = v.get<std::string>();
            have_id = true;
        } else if (key == kName) {
            if (!v.is_string() && !v.is_null()) throw parse_error(key, "expected a string");
            if (v.is_string()) p.display_name = v.get<std::string>();
        } else if (key == kRole) {
            if (!v.is_string() && !v.is_null()) throw parse_error(key, "expected a string or null");
            if (v.is_string() && !v.get<std::string>().empty()) p.role = v.get<std::string>();
        } else if (key == kIngestedAt) {
            if (!v.is_string() && !v.is_null()) throw parse_error(key, "expected an RFC 3339 string");
            if (v.is_string()) p.ingested_at = Timestamp::parse(v.get<std::string>());
        } else if (parse_component(key)) {
            if (v.is_null()) p.scores.push_back({key, std::nullopt});
            else if (v.is_number()) p.scores.push_back({key, v.get<double>()});
            else throw parse_error(key, "expected a number or null");
        } else {
            throw Error(ErrorCode::UnknownComponent, key);
        }
    }
    if (!have_id) throw parse_error(kId, "missing");
    return p;
}

Json parse(std::string_view text) {
    std::vector<std::set<std::string>> open_objects;
    std::string duplicate;
    Json::parser_callback_t cb = [&](int, nlohmann::json::parse_event_t event, Json& parsed) {
        using E = nlohmann::json::parse_event_t;
        switch (event) {
            case E::object_start: open_objects.emplace_back(); break;
            case E::object_end:
                if (!open_objects.empty()) open_objects.pop_back();
                break;
            case E::key: {
                auto key = parsed.get<std::string>();
                if (!open_objects.empty() && !open_objects.back().insert(key).second && duplicate.empty())
                    duplicate = key;
                break;
            }
            default: break;
        }
        return true;
    };
    Json result;
    try {
        result = Json::parse(text.begin(), text.end(), cb);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, fmt::format("byte {}", e.byte), e.what());
    }
    if (!duplicate.empty()) throw Error(ErrorCode::DuplicateComponent, duplicate);
    return result;
}

std::string encode_line(const CandidateProfile& profile) { return to_json(profile).dump(); }

CandidateProfile decode_line(std::string_view line) { return from_json(parse(line), Timestamp{}); }

// ---------------------------------------------------------------------------
// CSV

namespace {

// Splits one CSV line honoring double quotes ("" escapes a quote).
std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw parse_error("row", "unterminated quote");
    cells.push_back(trim(cur));
    return cells;
}

double parse_number(const std::string& cell, std::string_view field) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw parse_error(field, fmt::format("'{}' is not a number", cell));
    return v;
}

CandidateProfile row_to_profile(const std::vector<std::string>& header, const std::vector<std::string>& cells,
                                Timestamp default_time) {
    if (cells.size() != header.size())
        throw parse_error("row", fmt::format("{} cells for {} columns", cells.size(), header.size()));
    CandidateProfile p;
    p.ingested_at = default_time;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& key = header[i];
        const auto& cell = cells[i];
        if (key == kId) p.id = cell;
        else if (key == kName) p.display_name = cell;
        else if (key == kRole) {
            if (!cell.empty()) p.role = cell;
        } else if (key == kIngestedAt) {
            if (!cell.empty()) p.ingested_at = Timestamp::parse(cell);
        } else {
            if (cell.empty()) p.scores.push_back({key, std::nullopt});
            else p.scores.push_back({key, parse_number(cell, key)});
        }
    }
    return p;
}

}  // namespace

std::vector<CsvRow> read_csv(std::istream& in, Timestamp default_time) {
    std::string line;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        if (trim(line).empty()) continue;
        header = split_csv(line);
    }
    if (header.empty()) throw parse_error("header", "missing header row");
    std::set<std::string> seen;
    for (const auto& h : header) {
        if (!is_known_field(h)) throw parse_error("header", fmt::format("unknown column '{}'", h));
        if (!seen.insert(h).second) throw Error(ErrorCode::DuplicateComponent, h);
    }
    if (!seen.count(std::string(kId))) throw parse_error("header", "no id column");

    std::vector<CsvRow> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        try {
            rows.push_back({row, row_to_profile(header, split_csv(line), default_time)});
        } catch (const Error& e) {
            rows.push_back({row, e});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Stats

Json to_json(const preprocess::CorpusStats& stats) {
    Json j = Json::object();
    for (auto c : kAllComponents) {
        const auto& s = stats[c];
        j[std::string(component_name(c))] = {
            {"min", s.min}, {"max", s.max}, {"median", s.median},
            {"q1", s.q1},   {"q3", s.q3},   {"count_nonnull", s.count_nonnull},
        };
    }
    return j;
}

preprocess::CorpusStats stats_from_json(const Json& object) {
    preprocess::CorpusStats stats;
    try {
        for (auto c : kAllComponents) {
            const auto& s = object.at(std::string(component_name(c)));
            auto& out = stats[c];
            out.min = s.at("min").get<double>();
            out.max = s.at("max").get<double>();
            out.median = s.at("median").get<double>();
            out.q1 = s.at("q1").get<double>();
            out.q3 = s.at("q3").get<double>();
            out.count_nonnull = s.at("count_nonnull").get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("stats", e.what());
    }
    return stats;
}

Json to_json(const preprocess::Pipeline& pipeline) {
    Json j;
    j["raw"] = to_json(pipeline.raw);
    j["clipped"] = to_json(pipeline.clipped);
    return j;
}

preprocess::Pipeline pipeline_from_json(const Json& object) {
    if (!object.is_object() || !object.contains("raw") || !object.contains("clipped"))
        throw parse_error("stats", "expected raw and clipped sections");
    return {stats_from_json(object["raw"]), stats_from_json(object["clipped"])};
}

}  // namespace turtle::record
