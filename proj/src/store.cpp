#include "turtle/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "turtle/classifier.hpp"
#include "turtle/record.hpp"

namespace turtle::store {

namespace fs = std::filesystem;

namespace {

Error io_error(const fs::path& path, const std::string& what) {
    return Error(ErrorCode::StorageUnavailable, path.string(), what);
}

class File {
public:
    File(const fs::path& path, int flags) : fd_(::open(path.c_str(), flags | O_CLOEXEC, 0644)) {
        if (fd_ < 0) throw io_error(path, std::strerror(errno));
    }
    ~File() {
        if (fd_ >= 0) ::close(fd_);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
    int fd() const { return fd_; }

private:
    int fd_;
};

bool write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

// Appends `data` and syncs; on failure the file is cut back to its old size.
void durable_append(const fs::path& path, std::string_view data) {
    File f(path, O_WRONLY | O_APPEND | O_CREAT);
    struct stat st {};
    if (::fstat(f.fd(), &st) != 0) throw io_error(path, std::strerror(errno));
    if (!write_all(f.fd(), data) || ::fsync(f.fd()) != 0) {
        std::string why = std::strerror(errno);
        [[maybe_unused]] int rc = ::ftruncate(f.fd(), st.st_size);
        throw io_error(path, why);
    }
}

void write_atomically(const fs::path& path, std::string_view data) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        File f(tmp, O_WRONLY | O_CREAT | O_TRUNC);
        if (!write_all(f.fd(), data) || ::fsync(f.fd()) != 0) throw io_error(tmp, std::strerror(errno));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw io_error(path, ec.message());
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path stats_path(const fs::path& dir) { return dir / "stats.json"; }
fs::path model_path(const fs::path& dir) { return dir / "model.txt"; }
fs::path model_stats_path(const fs::path& dir) { return dir / "model_stats.json"; }

std::string stats_document(std::uint64_t version, const preprocess::Pipeline& pipeline) {
    record::Json j;
    j["snapshot_version"] = version;
    j["raw"] = record::to_json(pipeline.raw);
    j["clipped"] = record::to_json(pipeline.clipped);
    return j.dump(2) + "\n";
}

StatsRecord parse_stats_document(const fs::path& path, const std::string& text) {
    try {
        auto j = record::parse(text);
        return {j.at("snapshot_version").get<std::uint64_t>(), record::pipeline_from_json(j)};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string(), e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, path.string(), e.what());
    }
}

}  // namespace

StoreSnapshot rebuild_from_file(const fs::path& path) {
    StoreSnapshot snap;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (fs::exists(path)) throw io_error(path, "cannot open record file");
        return snap;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        try {
            auto profile = validate_profile(record::decode_line(line));
            auto id = profile.id;
            snap.candidates.insert_or_assign(std::move(id), std::move(profile));
        } catch (const Error& e) {
            throw Error(ErrorCode::CorruptLine, std::to_string(line_no), e.what());
        }
        ++snap.version;
    }
    return snap;
}

Store::Store(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw io_error(dir_, ec.message());

    auto snap = std::make_shared<StoreSnapshot>(rebuild_from_file(records_path()));

    if (auto text = read_file(stats_path(dir_))) {
        auto stats = parse_stats_document(stats_path(dir_), *text);
        if (stats.snapshot_version == snap->version) snap->stats = std::move(stats);
    }
    auto model_text = read_file(model_path(dir_));
    auto model_stats_text = read_file(model_stats_path(dir_));
    if (model_text && model_stats_text) {
        ModelRecord rec;
        rec.model = classifier::deserialize(*model_text);
        rec.pipeline = parse_stats_document(model_stats_path(dir_), *model_stats_text).pipeline;
        snap->model = std::move(rec);
    }
    current_ = std::move(snap);
}

std::shared_ptr<const StoreSnapshot> Store::snapshot() const {
    std::lock_guard lock(read_mutex_);
    return current_;
}

void Store::publish(std::shared_ptr<const StoreSnapshot> next) {
    std::lock_guard lock(read_mutex_);
    current_ = std::move(next);
}

IngestReport Store::ingest(std::span<const CandidateProfile> records, IngestMode mode) {
    std::lock_guard writer(write_mutex_);
    auto base = snapshot();

    IngestReport report;
    std::vector<const CandidateProfile*> accepted;
    std::set<std::string> batch_ids;
    std::string lines;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        try {
            validate_profile(rec);
            if (mode == IngestMode::append && (base->candidates.count(rec.id) || batch_ids.count(rec.id)))
                throw Error(ErrorCode::DuplicateId, rec.id);
        } catch (const Error& e) {
            report.rejected.push_back({i, rec.id, e.code(), e.subject(), e.detail()});
            continue;
        }
        batch_ids.insert(rec.id);
        accepted.push_back(&rec);
        lines += record::encode_line(rec);
        lines += '\n';
    }

    report.version = base->version;
    if (accepted.empty()) return report;

    durable_append(records_path(), lines);

    auto next = std::make_shared<StoreSnapshot>(*base);
    next->stats.reset();
    for (const auto* rec : accepted) next->candidates.insert_or_assign(rec->id, *rec);
    next->version = base->version + accepted.size();
    report.accepted = accepted.size();
    report.version = next->version;
    publish(std::move(next));
    return report;
}

void Store::attach_stats(std::uint64_t version, const preprocess::Pipeline& pipeline) {
    std::lock_guard writer(write_mutex_);
    auto base = snapshot();
    if (version != base->version) return;
    write_atomically(stats_path(dir_), stats_document(version, pipeline));
    auto next = std::make_shared<StoreSnapshot>(*base);
    next->stats = StatsRecord{version, pipeline};
    publish(std::move(next));
}

void Store::attach_model(const ModelRecord& record) {
    std::lock_guard writer(write_mutex_);
    record.model.validate();
    write_atomically(model_stats_path(dir_), stats_document(record.model.snapshot_version, record.pipeline));
    write_atomically(model_path(dir_), classifier::serialize(record.model));
    auto next = std::make_shared<StoreSnapshot>(*snapshot());
    next->model = record;
    publish(std::move(next));
}

}  // namespace turtle::store
