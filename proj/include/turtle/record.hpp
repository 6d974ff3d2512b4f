#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "turtle/core.hpp"
#include "turtle/preprocess.hpp"

// Candidate record codec shared by the record file, the HTTP wire format and
// the CLI: one JSON object per line with the fields
//   id, name, github, learning_analytics, kaggle, error_archive,
//   job_shadowing, puzzle, role, ingested_at
// plus a CSV reader with the same column names.
namespace turtle::record {

using Json = nlohmann::ordered_json;

Json to_json(const CandidateProfile& profile);

/// Builds a profile without validating score values. A missing `ingested_at`
/// takes `default_time`. Throws ParseError for wrong field types,
/// UnknownComponent for unknown keys and InvalidTimestamp.
CandidateProfile from_json(const Json& object, Timestamp default_time);

/// Parses a JSON document, rejecting repeated keys within one object with
/// DuplicateComponent and syntax errors with ParseError("byte N").
Json parse(std::string_view text);

std::string encode_line(const CandidateProfile& profile);
CandidateProfile decode_line(std::string_view line);

/// One CSV data row: the parsed profile or the reason it was rejected.
struct CsvRow {
    std::size_t row = 0;  // 1-based data row; the header is row 0
    std::variant<CandidateProfile, Error> value;
};

/// Reads a header row naming record fields, then one profile per line. Empty
/// cells mean absent. Throws ParseError for a bad header.
std::vector<CsvRow> read_csv(std::istream& in, Timestamp default_time);

Json to_json(const preprocess::CorpusStats& stats);
preprocess::CorpusStats stats_from_json(const Json& object);
Json to_json(const preprocess::Pipeline& pipeline);
preprocess::Pipeline pipeline_from_json(const Json& object);

}  // namespace turtle::record
