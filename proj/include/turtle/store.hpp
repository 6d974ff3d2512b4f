#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turtle/core.hpp"
#include "turtle/preprocess.hpp"

namespace turtle::store {

struct StatsRecord {
    std::uint64_t snapshot_version = 0;
    preprocess::Pipeline pipeline;
};

/// A trained model with the preprocessing it was trained under.
struct ModelRecord {
    JobModel model;
    preprocess::Pipeline pipeline;
};

/// Immutable view of the store. `version` counts committed candidate records.
struct StoreSnapshot {
    std::map<std::string, CandidateProfile> candidates;
    std::optional<StatsRecord> stats;
    std::optional<ModelRecord> model;
    std::uint64_t version = 0;
};

enum class IngestMode { append, upsert };

struct Rejection {
    std::size_t index = 0;  // position in the submitted batch
    std::string id;
    ErrorCode code = ErrorCode::ParseError;
    std::string subject;
    std::string detail;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<Rejection> rejected;
    std::uint64_t version = 0;
};

/// Replays a record file. Later lines with the same id replace earlier ones.
/// A missing file is an empty snapshot. Throws CorruptLine("<n>") at the first
/// line that does not decode to a valid profile.
StoreSnapshot rebuild_from_file(const std::filesystem::path& path);

/// Candidate store over a data directory:
///   candidates.jsonl  append-only record file
///   stats.json        latest preprocessing stats, stamped with a version
///   model.txt         latest job model
///   model_stats.json  preprocessing the model was trained under
///
/// Writers are serialized; snapshots are shared immutable values.
class Store {
public:
    /// Creates the directory when needed and replays the record file.
    explicit Store(std::filesystem::path dir);

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Valid records are fsync'ed to the record file before returning; a
    /// failed write throws StorageUnavailable and leaves the store unchanged.
    IngestReport ingest(std::span<const CandidateProfile> records, IngestMode mode);

    std::shared_ptr<const StoreSnapshot> snapshot() const;

    /// Persists stats computed from snapshot `version`. Stats for a version
    /// older than the current one are ignored.
    void attach_stats(std::uint64_t version, const preprocess::Pipeline& pipeline);

    /// Persists the model and the preprocessing it was trained under.
    void attach_model(const ModelRecord& record);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::filesystem::path records_path() const { return dir_ / "candidates.jsonl"; }

private:
    void publish(std::shared_ptr<const StoreSnapshot> next);

    std::filesystem::path dir_;
    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const StoreSnapshot> current_;
};

}  // namespace turtle::store
