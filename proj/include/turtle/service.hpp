#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "turtle/engine.hpp"
#include "turtle/record.hpp"
#include "turtle/store.hpp"

namespace httplib {
class Server;
}

namespace turtle::service {

struct Config {
    std::size_t default_k = 5;
    std::uint64_t seed = 42;
    std::string ui_origin = "*";
};

struct Response {
    int status = 200;
    record::Json body;
};

/// A snapshot run through the preprocessing pipeline.
struct Prepared {
    std::uint64_t version = 0;
    preprocess::Pipeline pipeline;
    std::vector<engine::Candidate> candidates;  // ascending id
    std::vector<std::optional<std::string>> roles;
};

/// Endpoint logic over a store. Bodies are JSON text in the record wire
/// format; every response body carries the snapshot version it was computed
/// from. Thread-safe.
class Service {
public:
    Service(store::Store& store, Config config);

    // POST /candidates[?mode=upsert]
    Response ingest(std::string_view body, std::string_view mode = {});
    // POST /similar
    Response similar(std::string_view body);
    // POST /predict-job
    Response predict_job(std::string_view body);
    // POST /train
    Response train(std::string_view body);
    // GET /report/metric-ordering?query=<id>
    Response metric_ordering(std::string_view query_id);

    /// Preprocessed view of the current snapshot, cached per version.
    /// Throws EmptyCorpus / AllAbsentComponent.
    std::shared_ptr<const Prepared> prepared();

    const Config& config() const noexcept { return config_; }

    /// Registers the routes and CORS handling on `server`.
    void mount(httplib::Server& server);

private:
    std::shared_ptr<const Prepared> prepare(const store::StoreSnapshot& snap);

    store::Store& store_;
    Config config_;
    std::mutex cache_mutex_;
    std::shared_ptr<const Prepared> cache_;
};

/// HTTP status for a library error.
int status_for(ErrorCode code);
record::Json error_body(const Error& e);

}  // namespace turtle::service
