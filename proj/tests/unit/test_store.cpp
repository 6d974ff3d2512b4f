#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "turtle/record.hpp"
#include "turtle/store.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace turtle;
using namespace turtle::store;
namespace fs = std::filesystem;

namespace {

std::vector<CandidateProfile> five() {
    return {
        fixture::profile("c01", {10, 20, 30, 40, 50, 60}, "backend"),
        fixture::profile("c02", {11, 21, 31, 41, 51, 61}, "frontend"),
        fixture::profile("c03", {12, 22, 32, 42, 52, 62}),
        fixture::profile("c04", {13, 23, 33, 43, 53, 63}, "backend"),
        fixture::profile("c05", {14, 24, 34, 44, 54, 64}, "data_science"),
    };
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines, std::size_t n) {
    std::ofstream out(p, std::ios::trunc);
    for (std::size_t i = 0; i < n; ++i) out << lines[i] << '\n';
}

}  // namespace

TEST_CASE("a fresh store is empty", "[store]") {
    oracle::TempDir dir;
    Store s(dir.path() / "data");
    auto snap = s.snapshot();
    CHECK(snap->version == 0);
    CHECK(snap->candidates.empty());
    CHECK_FALSE(snap->model.has_value());
}

TEST_CASE("append ingest accepts valid records and rejects the rest", "[store]") {
    oracle::TempDir dir;
    Store s(dir.path());
    auto batch = five();
    auto report = s.ingest(batch, IngestMode::append);
    CHECK(report.accepted == 5);
    CHECK(report.rejected.empty());
    CHECK(report.version == 5);

    auto bad = fixture::profile("c99", {1, 2, 3, 4, 5, 6});
    bad.scores[0].value = -1.0;
    std::vector<CandidateProfile> second = {batch[0], bad, fixture::profile("c06", {1, 1, 1, 1, 1, 1}),
                                            fixture::profile("c06", {2, 2, 2, 2, 2, 2})};
    report = s.ingest(second, IngestMode::append);
    CHECK(report.accepted == 1);
    REQUIRE(report.rejected.size() == 3);
    CHECK(report.rejected[0].index == 0);
    CHECK(report.rejected[0].code == ErrorCode::DuplicateId);
    CHECK(report.rejected[1].code == ErrorCode::NegativeScore);
    CHECK(report.rejected[1].subject == "github");
    CHECK(report.rejected[2].index == 3);
    CHECK(report.rejected[2].code == ErrorCode::DuplicateId);
    CHECK(report.version == 6);
    CHECK(lines_of(s.records_path()).size() == 6);
}

TEST_CASE("a rejected-only batch leaves the store untouched", "[store]") {
    oracle::TempDir dir;
    Store s(dir.path());
    auto batch = five();
    s.ingest(batch, IngestMode::append);
    auto report = s.ingest(batch, IngestMode::append);
    CHECK(report.accepted == 0);
    CHECK(report.rejected.size() == 5);
    CHECK(report.version == 5);
    CHECK(lines_of(s.records_path()).size() == 5);
}

TEST_CASE("snapshots are isolated from later writes", "[store]") {
    oracle::TempDir dir;
    Store s(dir.path());
    auto batch = five();
    s.ingest(std::span(batch).first(2), IngestMode::append);
    auto before = s.snapshot();
    s.ingest(std::span(batch).subspan(2), IngestMode::append);
    CHECK(before->version == 2);
    CHECK(before->candidates.size() == 2);
    CHECK(s.snapshot()->candidates.size() == 5);
}

TEST_CASE("replaying the record file reproduces the store", "[store]") {
    oracle::TempDir dir;
    {
        Store s(dir.path());
        auto batch = five();
        s.ingest(batch, IngestMode::append);
    }
    Store reopened(dir.path());
    auto snap = reopened.snapshot();
    CHECK(snap->version == 5);
    REQUIRE(snap->candidates.size() == 5);
    auto expected = five();
    for (const auto& p : expected) CHECK(snap->candidates.at(p.id) == p);
}

TEST_CASE("replay of every record-boundary prefix", "[store]") {
    oracle::TempDir dir;
    {
        Store s(dir.path());
        auto batch = five();
        for (const auto& p : batch) s.ingest(std::span(&p, 1), IngestMode::append);
    }
    auto all = lines_of(dir.path() / "candidates.jsonl");
    REQUIRE(all.size() == 5);
    auto expected = five();
    for (std::size_t n = 0; n <= all.size(); ++n) {
        oracle::TempDir cut;
        write_lines(cut.path() / "candidates.jsonl", all, n);
        Store s(cut.path());
        auto snap = s.snapshot();
        CHECK(snap->version == n);
        REQUIRE(snap->candidates.size() == n);
        for (std::size_t i = 0; i < n; ++i) CHECK(snap->candidates.at(expected[i].id) == expected[i]);
    }
}

TEST_CASE("a garbage line is reported by number", "[store]") {
    oracle::TempDir dir;
    {
        Store s(dir.path());
        auto batch = five();
        s.ingest(batch, IngestMode::append);
    }
    auto all = lines_of(dir.path() / "candidates.jsonl");
    all[2] = "{not json";
    write_lines(dir.path() / "candidates.jsonl", all, all.size());
    try {
        Store s(dir.path());
        FAIL("expected CorruptLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptLine);
        CHECK(e.subject() == "3");
    }
}

TEST_CASE("an empty record file is an empty store", "[store]") {
    oracle::TempDir dir;
    std::ofstream(dir.path() / "candidates.jsonl").close();
    Store s(dir.path());
    CHECK(s.snapshot()->version == 0);
    CHECK(s.snapshot()->candidates.empty());
}

TEST_CASE("upsert keeps the last record per id", "[store]") {
    oracle::TempDir dir;
    auto first = fixture::profile("u1", {1, 1, 1, 1, 1, 1}, "backend");
    auto second = fixture::profile("u1", {2, 2, 2, 2, 2, 2}, "frontend");
    {
        Store s(dir.path());
        s.ingest(std::span(&first, 1), IngestMode::append);
        auto r = s.ingest(std::span(&second, 1), IngestMode::upsert);
        CHECK(r.accepted == 1);
        CHECK(s.snapshot()->candidates.at("u1") == second);
    }
    Store reopened(dir.path());
    CHECK(reopened.snapshot()->candidates.size() == 1);
    CHECK(reopened.snapshot()->candidates.at("u1") == second);
    CHECK(reopened.snapshot()->version == 2);
}

TEST_CASE("an unwritable record file raises StorageUnavailable", "[store]") {
    oracle::TempDir dir;
    Store s(dir.path());
    fs::create_directory(s.records_path());
    auto batch = five();
    try {
        s.ingest(batch, IngestMode::append);
        FAIL("expected StorageUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StorageUnavailable);
    }
    CHECK(s.snapshot()->version == 0);
    CHECK(s.snapshot()->candidates.empty());
}

TEST_CASE("stats are kept only for the current version", "[store]") {
    oracle::TempDir dir;
    auto batch = five();
    preprocess::Pipeline pipeline;
    {
        Store s(dir.path());
        s.ingest(batch, IngestMode::append);
        auto rows = preprocess::raw_rows(std::vector<CandidateProfile>(batch.begin(), batch.end()));
        pipeline = preprocess::Pipeline::fit(rows);
        s.attach_stats(4, pipeline);
        CHECK_FALSE(s.snapshot()->stats.has_value());
        s.attach_stats(5, pipeline);
        REQUIRE(s.snapshot()->stats.has_value());
    }
    {
        Store s(dir.path());
        REQUIRE(s.snapshot()->stats.has_value());
        CHECK(s.snapshot()->stats->pipeline.raw.columns == pipeline.raw.columns);
        auto extra = fixture::profile("c06", {1, 1, 1, 1, 1, 1});
        s.ingest(std::span(&extra, 1), IngestMode::append);
        CHECK_FALSE(s.snapshot()->stats.has_value());
    }
}

TEST_CASE("record lines round trip", "[record]") {
    auto p = fixture::profile("r1", {0.5, 1, 2, 3, 4, 5}, "backend");
    p.scores[2].value.reset();
    auto line = record::encode_line(p);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(record::decode_line(line) == p);
    CHECK(record::to_json(p)["kaggle"].is_null());
}

TEST_CASE("record parse errors", "[record]") {
    try {
        record::parse(R"({"id": "a", "github": 1,})");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(e.subject().rfind("byte ", 0) == 0);
    }
    try {
        record::parse(R"({"id": "a", "github": 1, "github": 2})");
        FAIL("expected DuplicateComponent");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateComponent);
        CHECK(e.subject() == "github");
    }
    auto now = Timestamp::parse("2024-01-01T00:00:00Z");
    try {
        record::from_json(record::parse(R"({"id": "a", "gitlab": 1})"), now);
        FAIL("expected UnknownComponent");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownComponent);
        CHECK(e.subject() == "gitlab");
    }
    try {
        record::from_json(record::parse(R"({"id": "a", "github": "high"})"), now);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(e.subject() == "github");
    }
}

TEST_CASE("csv reading", "[record]") {
    std::istringstream in(
        "id,name,github,learning_analytics,kaggle,error_archive,job_shadowing,puzzle,role\n"
        "a1,\"Doe, Jane\",1,2,,4,5,6,backend\n"
        "a2,Bob,1,2,3,4,five,6,\n"
        " a3 , Ann ,+1,2.5,3,4,5,6,frontend\n");
    auto now = Timestamp::parse("2024-01-01T00:00:00Z");
    auto rows = record::read_csv(in, now);
    REQUIRE(rows.size() == 3);
    REQUIRE(std::holds_alternative<CandidateProfile>(rows[0].value));
    const auto& a1 = std::get<CandidateProfile>(rows[0].value);
    CHECK(a1.display_name == "Doe, Jane");
    CHECK_FALSE(a1.score(Component::kaggle).has_value());
    CHECK(a1.role == std::optional<std::string>("backend"));
    CHECK(a1.ingested_at == now);

    REQUIRE(std::holds_alternative<Error>(rows[1].value));
    CHECK(rows[1].row == 2);
    CHECK(std::get<Error>(rows[1].value).subject() == "job_shadowing");

    REQUIRE(std::holds_alternative<CandidateProfile>(rows[2].value));
    CHECK(std::get<CandidateProfile>(rows[2].value).id == "a3");
    CHECK(std::get<CandidateProfile>(rows[2].value).score(Component::github) == std::optional<double>(1.0));

    std::istringstream bad("id,name,gitlab\n");
    CHECK_THROWS_AS(record::read_csv(bad, now), Error);
}
