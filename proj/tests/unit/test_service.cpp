#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include <httplib.h>

#include "turtle/service.hpp"
#include "../support/oracles.hpp"

using namespace turtle;
using namespace turtle::service;
using record::Json;

namespace {

const char* kSeven = R"([
  {"id":"c00","name":"Ada","github":80,"learning_analytics":60,"kaggle":40,"error_archive":100,"job_shadowing":50,"puzzle":70,"role":"backend"},
  {"id":"c01","name":"Ben","github":80,"learning_analytics":60,"kaggle":40,"error_archive":100,"job_shadowing":50,"puzzle":70,"role":"backend"},
  {"id":"c02","name":"Cy","github":20,"learning_analytics":90,"kaggle":null,"error_archive":30,"job_shadowing":80,"puzzle":20,"role":"frontend"},
  {"id":"c03","name":"Di","github":55,"learning_analytics":40,"kaggle":90,"error_archive":60,"job_shadowing":20,"puzzle":85,"role":"data_science"},
  {"id":"c04","name":"Ed","github":10,"learning_analytics":95,"kaggle":5,"error_archive":25,"job_shadowing":90,"puzzle":15,"role":"frontend"},
  {"id":"c05","name":"Fa","github":60,"learning_analytics":35,"kaggle":95,"error_archive":70,"job_shadowing":25,"puzzle":90,"role":"data_science"},
  {"id":"c06","name":"Gu","github":90,"learning_analytics":55,"kaggle":30,"error_archive":95,"job_shadowing":45,"puzzle":60,"role":"backend"}
])";

struct Fixture {
    oracle::TempDir dir;
    store::Store store{dir.path()};
    Service svc{store, Config{}};
};

}  // namespace

TEST_CASE("status mapping", "[service]") {
    CHECK(status_for(ErrorCode::UnknownCandidateId) == 404);
    CHECK(status_for(ErrorCode::EmptyCorpus) == 409);
    CHECK(status_for(ErrorCode::NoModelTrained) == 409);
    CHECK(status_for(ErrorCode::StorageUnavailable) == 503);
    CHECK(status_for(ErrorCode::NegativeScore) == 400);
    CHECK(status_for(ErrorCode::ParseError) == 400);
}

TEST_CASE("queries on an empty store are conflicts", "[service]") {
    Fixture f;
    auto r = f.svc.similar(R"({"query":"c00"})");
    CHECK(r.status == 409);
    CHECK(r.body["error"] == "EmptyCorpus");
    CHECK(f.svc.metric_ordering("c00").status == 409);
    CHECK(f.svc.train("{}").status == 409);
}

TEST_CASE("ingest reports accepted and rejected records", "[service]") {
    Fixture f;
    auto r = f.svc.ingest(kSeven);
    REQUIRE(r.status == 200);
    CHECK(r.body["accepted"] == 7);
    CHECK(r.body["snapshot_version"] == 7);

    r = f.svc.ingest(R"([{"id":"c00","github":1,"learning_analytics":1,"error_archive":1,"job_shadowing":1,"puzzle":1},
                        {"id":"x1","github":1,"error_archive":1,"job_shadowing":1,"puzzle":1},
                        {"id":"x2","github":"a"}])");
    REQUIRE(r.status == 200);
    CHECK(r.body["accepted"] == 0);
    REQUIRE(r.body["rejected"].size() == 3);
    CHECK(r.body["rejected"][0]["error"] == "DuplicateId");
    CHECK(r.body["rejected"][1]["error"] == "MissingComponent");
    CHECK(r.body["rejected"][1]["subject"] == "learning_analytics");
    CHECK(r.body["rejected"][2]["index"] == 2);
    CHECK(r.body["rejected"][2]["error"] == "ParseError");

    r = f.svc.ingest(R"({"id": "y",)");
    CHECK(r.status == 400);
    CHECK(r.body["error"] == "ParseError");
    CHECK(r.body["subject"].get<std::string>().rfind("byte ", 0) == 0);
}

TEST_CASE("similar ranks a duplicate first at 100 on every metric", "[service]") {
    Fixture f;
    f.svc.ingest(kSeven);
    auto r = f.svc.similar(R"({"query":"c00","k":3})");
    REQUIRE(r.status == 200);
    CHECK(r.body["snapshot_version"] == 7);
    CHECK(r.body["metrics"].size() == 7);
    REQUIRE(r.body["rows"].size() == 3);
    CHECK(r.body["rows"][0]["candidate_id"] == "c01");
    for (const auto& [name, v] : r.body["rows"][0]["percentiles"].items()) CHECK(v.get<double>() == 100.0);
    for (const auto& row : r.body["rows"]) CHECK(row["candidate_id"] != "c00");

    auto single = f.svc.similar(R"({"query":"c00","metrics":"cosine"})");
    REQUIRE(single.status == 200);
    CHECK(single.body["rows"][0]["percentiles"].size() == 1);

    CHECK(f.svc.similar(R"({"query":"nobody"})").status == 404);
    CHECK(f.svc.similar(R"({"query":"c00","k":0})").status == 400);
    CHECK(f.svc.similar(R"({"query":"c00","metrics":["hamming"]})").status == 400);
    auto zero = f.svc.similar(R"({"query":"c00","weights":{"github":0}})");
    CHECK(zero.status == 400);
    CHECK(zero.body["error"] == "AllZeroWeights");
}

TEST_CASE("an inline query identical to a stored candidate scores 100", "[service]") {
    Fixture f;
    f.svc.ingest(kSeven);
    auto r = f.svc.similar(
        R"({"query":{"github":55,"learning_analytics":40,"kaggle":90,"error_archive":60,"job_shadowing":20,"puzzle":85},"k":1})");
    REQUIRE(r.status == 200);
    CHECK(r.body["query"]["id"].is_null());
    CHECK(r.body["rows"][0]["candidate_id"] == "c03");
    for (const auto& [name, v] : r.body["rows"][0]["percentiles"].items()) CHECK(v.get<double>() == 100.0);

    auto missing = f.svc.similar(R"({"query":{"github":55,"kaggle":90,"error_archive":60,"job_shadowing":20,"puzzle":85}})");
    CHECK(missing.status == 400);
    CHECK(missing.body["error"] == "MissingComponent");
    CHECK(missing.body["subject"] == "learning_analytics");
}

TEST_CASE("predict before train, then train and predict", "[service]") {
    Fixture f;
    f.svc.ingest(kSeven);
    auto r = f.svc.predict_job(R"({"query":"c00"})");
    CHECK(r.status == 409);
    CHECK(r.body["error"] == "NoModelTrained");

    auto t1 = f.svc.train("{}");
    REQUIRE(t1.status == 200);
    CHECK(t1.body["classes"] == Json::array({"backend", "data_science", "frontend"}));
    CHECK(t1.body["trained_on"] == 7);
    auto t2 = f.svc.train("{}");
    CHECK(t1.body["model_hash"] == t2.body["model_hash"]);

    auto p = f.svc.predict_job(R"({"query":"c05"})");
    REQUIRE(p.status == 200);
    CHECK(p.body["label"] == "data_science");
    CHECK(p.body["model_hash"] == t1.body["model_hash"]);
    CHECK(p.body["scores"].size() == 3);
    CHECK(f.svc.predict_job(R"({"query":"nobody"})").status == 404);
}

TEST_CASE("a model survives a restart", "[service]") {
    oracle::TempDir dir;
    Json hash;
    {
        store::Store s(dir.path());
        Service svc(s, Config{});
        svc.ingest(kSeven);
        hash = svc.train("{}").body["model_hash"];
    }
    store::Store s(dir.path());
    Service svc(s, Config{});
    auto p = svc.predict_job(R"({"query":"c02"})");
    REQUIRE(p.status == 200);
    CHECK(p.body["model_hash"] == hash);
}

TEST_CASE("metric ordering report", "[service]") {
    Fixture f;
    f.svc.ingest(kSeven);
    auto r = f.svc.metric_ordering("c00");
    REQUIRE(r.status == 200);
    REQUIRE(r.body["rows"].size() == 7);
    double prev = -1.0;
    for (const auto& row : r.body["rows"]) {
        CHECK(row["mean_percentile"].get<double>() >= prev);
        prev = row["mean_percentile"].get<double>();
    }
    CHECK(f.svc.metric_ordering("nobody").status == 404);
    CHECK(f.svc.metric_ordering("").status == 400);
}

TEST_CASE("the prepared corpus is cached per version", "[service]") {
    Fixture f;
    f.svc.ingest(kSeven);
    auto a = f.svc.prepared();
    auto b = f.svc.prepared();
    CHECK(a.get() == b.get());
    f.svc.ingest(R"({"id":"c07","github":1,"learning_analytics":1,"error_archive":1,"job_shadowing":1,"puzzle":1})");
    auto c = f.svc.prepared();
    CHECK(c->version == 8);
    CHECK(a->version == 7);
}

TEST_CASE("endpoints over HTTP", "[service][http]") {
    Fixture f;
    httplib::Server server;
    f.svc.mount(server);
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    auto health = cli.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto empty = cli.Post("/similar", R"({"query":"c00"})", "application/json");
    REQUIRE(empty);
    CHECK(empty->status == 409);

    auto ing = cli.Post("/candidates", kSeven, "application/json");
    REQUIRE(ing);
    CHECK(ing->status == 200);
    CHECK(ing->get_header_value("Access-Control-Allow-Origin") == "*");

    auto sim = cli.Post("/similar", R"({"query":"c00","k":2})", "application/json");
    REQUIRE(sim);
    CHECK(sim->status == 200);
    CHECK(sim->body == f.svc.similar(R"({"query":"c00","k":2})").body.dump());

    auto upsert = cli.Post("/candidates?mode=upsert",
                           R"({"id":"c06","github":1,"learning_analytics":1,"error_archive":1,"job_shadowing":1,"puzzle":1})",
                           "application/json");
    REQUIRE(upsert);
    CHECK(Json::parse(upsert->body)["accepted"] == 1);

    auto bad = cli.Post("/similar", "{", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    auto pred = cli.Post("/predict-job", R"({"query":"c00"})", "application/json");
    REQUIRE(pred);
    CHECK(pred->status == 409);
    auto train = cli.Post("/train", "{}", "application/json");
    REQUIRE(train);
    CHECK(train->status == 200);
    pred = cli.Post("/predict-job", R"({"query":"c00"})", "application/json");
    REQUIRE(pred);
    CHECK(pred->status == 200);

    auto rep = cli.Get("/report/metric-ordering?query=zz");
    REQUIRE(rep);
    CHECK(rep->status == 404);

    auto opt = cli.Options("/similar");
    REQUIRE(opt);
    CHECK(opt->status == 204);

    server.stop();
    th.join();
}
