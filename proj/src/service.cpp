#include "turtle/service.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

#include "turtle/classifier.hpp"

namespace turtle::service {

using record::Json;

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownCandidateId: return 404;
        case ErrorCode::EmptyCorpus:
        case ErrorCode::AllAbsentComponent:
        case ErrorCode::SingleClassCorpus:
        case ErrorCode::UnlabeledProfile:
        case ErrorCode::NoModelTrained: return 409;
        case ErrorCode::StorageUnavailable: return 503;
        case ErrorCode::CorruptLine: return 500;
        default: return 400;
    }
}

Json error_body(const Error& e) {
    Json j;
    j["error"] = std::string(to_string(e.code()));
    j["subject"] = e.subject();
    j["detail"] = e.detail();
    return j;
}

namespace {

Response fail(const Error& e) { return {status_for(e.code()), error_body(e)}; }

Json parse_body(std::string_view body) {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
    return record::parse(body);
}

Json components_json(const ScoreVector& v) {
    Json j = Json::object();
    for (std::size_t i = 0; i < v.size(); ++i) j[v.schema().names()[i]] = v[i];
    return j;
}

Json turtle_json(const TurtleScore& t) {
    Json j;
    j["aggregate"] = t.aggregate;
    j["normalized"] = components_json(t.normalized);
    j["weights"] = components_json(t.weights);
    return j;
}

Json percentiles_json(const SimilarityRow& row, const std::vector<MetricKind>& metrics) {
    Json j = Json::object();
    for (auto m : metrics) j[std::string(metric_name(m))] = row.percentile(m);
    return j;
}

// Validated raw scores of an inline candidate object.
RawScores inline_scores(const Json& object) {
    if (!object.is_object()) throw Error(ErrorCode::ParseError, "query", "expected an id or a candidate object");
    Json copy = object;
    if (!copy.contains("id")) copy["id"] = "query";
    auto profile = validate_profile(record::from_json(copy, Timestamp{}));
    return profile.raw_scores();
}

std::vector<MetricKind> parse_metrics(const Json& request) {
    if (!request.contains("metrics")) return {};
    const auto& m = request["metrics"];
    auto one = [](const Json& v) {
        if (!v.is_string()) throw Error(ErrorCode::InvalidArgument, "metrics", "expected metric names");
        auto kind = parse_metric(v.get<std::string>());
        if (!kind) throw Error(ErrorCode::InvalidArgument, "metrics", "unknown metric " + v.get<std::string>());
        return *kind;
    };
    if (m.is_string() && m.get<std::string>() == "all") return {};
    if (m.is_string()) return {one(m)};
    if (!m.is_array() || m.empty()) throw Error(ErrorCode::InvalidArgument, "metrics", "expected a non-empty list");
    std::vector<MetricKind> out;
    for (const auto& v : m) out.push_back(one(v));
    return out;
}

std::optional<ScoreVector> parse_weights(const Json& request) {
    if (!request.contains("weights") || request["weights"].is_null()) return std::nullopt;
    const auto& w = request["weights"];
    if (!w.is_object()) throw Error(ErrorCode::InvalidArgument, "weights", "expected an object");
    std::vector<double> values(kComponentCount, 0.0);
    for (auto it = w.begin(); it != w.end(); ++it) {
        auto c = parse_component(it.key());
        if (!c) throw Error(ErrorCode::UnknownComponent, it.key());
        if (!it.value().is_number()) throw Error(ErrorCode::InvalidArgument, it.key(), "weight must be a number");
        double v = it.value().get<double>();
        if (!std::isfinite(v) || v < 0.0)
            throw Error(ErrorCode::InvalidArgument, it.key(), "weight must be finite and nonnegative");
        values[static_cast<std::size_t>(*c)] = v;
    }
    return ScoreVector(Schema::turtle(), std::move(values));
}

std::size_t parse_k(const Json& request, std::size_t fallback) {
    if (!request.contains("k")) return fallback;
    const auto& k = request["k"];
    if (!k.is_number_integer() || k.get<std::int64_t>() < 1)
        throw Error(ErrorCode::InvalidArgument, "k", "k must be a positive integer");
    return static_cast<std::size_t>(k.get<std::int64_t>());
}

}  // namespace

Service::Service(store::Store& store, Config config) : store_(store), config_(std::move(config)) {}

std::shared_ptr<const Prepared> Service::prepare(const store::StoreSnapshot& snap) {
    auto out = std::make_shared<Prepared>();
    out->version = snap.version;
    if (snap.candidates.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus", "no candidates stored");

    std::vector<preprocess::RawRow> rows;
    rows.reserve(snap.candidates.size());
    for (const auto& [id, profile] : snap.candidates) rows.push_back(profile.raw_scores());

    if (snap.stats && snap.stats->snapshot_version == snap.version) {
        out->pipeline = snap.stats->pipeline;
    } else {
        out->pipeline = preprocess::Pipeline::fit(rows);
        store_.attach_stats(snap.version, out->pipeline);
    }
    auto normalized = out->pipeline.transform(rows);
    std::size_t i = 0;
    for (const auto& [id, profile] : snap.candidates) {
        out->candidates.push_back({id, preprocess::to_vector(normalized[i++])});
        out->roles.push_back(profile.role);
    }
    return out;
}

std::shared_ptr<const Prepared> Service::prepared() {
    auto snap = store_.snapshot();
    {
        std::lock_guard lock(cache_mutex_);
        if (cache_ && cache_->version == snap->version) return cache_;
    }
    auto fresh = prepare(*snap);
    std::lock_guard lock(cache_mutex_);
    if (!cache_ || cache_->version < fresh->version) cache_ = fresh;
    return fresh;
}

Response Service::ingest(std::string_view body, std::string_view mode) {
    try {
        auto request = parse_body(body);
        auto ingest_mode = store::IngestMode::append;
        const Json* items = &request;
        if (request.is_object() && request.contains("candidates")) {
            items = &request["candidates"];
            if (request.contains("mode")) {
                if (!request["mode"].is_string()) throw Error(ErrorCode::InvalidArgument, "mode", "expected a string");
                mode = request["mode"].get_ref<const std::string&>();
            }
        }
        if (mode == "upsert") ingest_mode = store::IngestMode::upsert;
        else if (!mode.empty() && mode != "append")
            throw Error(ErrorCode::InvalidArgument, "mode", "expected append or upsert");

        std::vector<Json> objects;
        if (items->is_array()) objects.assign(items->begin(), items->end());
        else objects.push_back(*items);

        const auto now = Timestamp::now();
        std::vector<CandidateProfile> profiles;
        std::vector<std::size_t> positions;
        std::vector<store::Rejection> parse_rejections;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            try {
                profiles.push_back(record::from_json(objects[i], now));
                positions.push_back(i);
            } catch (const Error& e) {
                std::string id;
                if (objects[i].is_object() && objects[i].contains("id") && objects[i]["id"].is_string())
                    id = objects[i]["id"].get<std::string>();
                parse_rejections.push_back({i, id, e.code(), e.subject(), e.detail()});
            }
        }
        auto report = store_.ingest(profiles, ingest_mode);
        for (auto& r : report.rejected) r.index = positions[r.index];
        report.rejected.insert(report.rejected.end(), parse_rejections.begin(), parse_rejections.end());
        std::sort(report.rejected.begin(), report.rejected.end(),
                  [](const auto& a, const auto& b) { return a.index < b.index; });

        Json j;
        j["snapshot_version"] = report.version;
        j["accepted"] = report.accepted;
        j["rejected"] = Json::array();
        for (const auto& r : report.rejected) {
            Json e;
            e["index"] = r.index;
            e["id"] = r.id;
            e["error"] = std::string(to_string(r.code));
            e["subject"] = r.subject;
            e["detail"] = r.detail;
            j["rejected"].push_back(std::move(e));
        }
        return {200, j};
    } catch (const Error& e) {
        return fail(e);
    }
}

Response Service::similar(std::string_view body) {
    try {
        auto request = parse_body(body);
        if (!request.is_object() || !request.contains("query"))
            throw Error(ErrorCode::InvalidArgument, "query", "missing");
        auto prep = prepared();

        engine::SimilarityQuery q;
        const auto& target = request["query"];
        if (target.is_string()) q.target = target.get<std::string>();
        else q.target = preprocess::to_vector(prep->pipeline.transform(inline_scores(target)));
        q.metrics = parse_metrics(request);
        q.k = parse_k(request, config_.default_k);
        q.weights = parse_weights(request);

        auto result = engine::similar(q, prep->candidates);
        const auto& metrics = q.effective_metrics();

        Json j;
        j["snapshot_version"] = prep->version;
        j["query"] = {{"id", result.query_id.empty() ? Json(nullptr) : Json(result.query_id)},
                      {"turtle", turtle_json(result.query_turtle)}};
        j["metrics"] = Json::array();
        for (auto m : metrics) j["metrics"].push_back(std::string(metric_name(m)));
        j["rows"] = Json::array();
        for (const auto& rc : result.ranked) {
            Json row;
            row["candidate_id"] = rc.row.candidate_id;
            row["percentiles"] = percentiles_json(rc.row, metrics);
            row["turtle_score"] = rc.turtle.aggregate;
            j["rows"].push_back(std::move(row));
        }
        return {200, j};
    } catch (const Error& e) {
        return fail(e);
    }
}

Response Service::train(std::string_view body) {
    try {
        auto request = parse_body(body);
        if (!request.is_object()) throw Error(ErrorCode::InvalidArgument, "body", "expected an object");
        TrainingConfig cfg;
        cfg.seed = config_.seed;
        try {
            if (request.contains("epochs")) cfg.epochs = request["epochs"].get<int>();
            if (request.contains("lambda")) cfg.lambda = request["lambda"].get<double>();
            if (request.contains("eta0")) cfg.eta0 = request["eta0"].get<double>();
            if (request.contains("seed")) cfg.seed = request["seed"].get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, "config", e.what());
        }

        auto prep = prepared();
        std::vector<classifier::LabeledExample> examples;
        for (std::size_t i = 0; i < prep->candidates.size(); ++i)
            if (prep->roles[i]) examples.push_back({prep->candidates[i].features, prep->roles[i]});
        if (examples.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus", "no labeled candidates");

        auto model = classifier::train(examples, cfg);
        model.snapshot_version = prep->version;
        auto eval = classifier::evaluate(model, examples);
        store_.attach_model({model, prep->pipeline});

        Json j;
        j["snapshot_version"] = prep->version;
        j["model_version"] = model.snapshot_version;
        j["model_hash"] = classifier::content_hash(model);
        j["classes"] = model.classes;
        j["trained_on"] = examples.size();
        j["training_accuracy"] = eval.accuracy;
        j["per_class"] = Json::array();
        for (const auto& c : eval.per_class)
            j["per_class"].push_back({{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}});
        return {200, j};
    } catch (const Error& e) {
        return fail(e);
    }
}

Response Service::predict_job(std::string_view body) {
    try {
        auto request = parse_body(body);
        if (!request.is_object() || !request.contains("query"))
            throw Error(ErrorCode::InvalidArgument, "query", "missing");
        auto snap = store_.snapshot();
        if (!snap->model) throw Error(ErrorCode::NoModelTrained, "model", "train a model first");
        const auto& rec = *snap->model;

        const auto& target = request["query"];
        RawScores raw;
        Json query_id = nullptr;
        if (target.is_string()) {
            auto it = snap->candidates.find(target.get<std::string>());
            if (it == snap->candidates.end()) throw Error(ErrorCode::UnknownCandidateId, target.get<std::string>());
            raw = it->second.raw_scores();
            query_id = it->first;
        } else {
            raw = inline_scores(target);
        }
        auto features = preprocess::to_vector(rec.pipeline.transform(raw));
        auto pred = classifier::predict(rec.model, features);

        Json j;
        j["snapshot_version"] = snap->version;
        j["model_version"] = rec.model.snapshot_version;
        j["model_hash"] = classifier::content_hash(rec.model);
        j["query"] = query_id;
        j["label"] = pred.label;
        j["scores"] = Json::array();
        for (std::size_t c = 0; c < rec.model.classes.size(); ++c)
            j["scores"].push_back({{"label", rec.model.classes[c]}, {"score", pred.scores[c]}});
        return {200, j};
    } catch (const Error& e) {
        return fail(e);
    }
}

Response Service::metric_ordering(std::string_view query_id) {
    try {
        if (query_id.empty()) throw Error(ErrorCode::InvalidArgument, "query", "missing");
        auto prep = prepared();
        engine::SimilarityQuery q;
        q.target = std::string(query_id);
        auto report = engine::metric_ordering_report(q, prep->candidates);

        Json j;
        j["snapshot_version"] = prep->version;
        j["query"] = std::string(query_id);
        j["rows"] = Json::array();
        for (const auto& r : report)
            j["rows"].push_back({{"metric", std::string(metric_name(r.kind))}, {"mean_percentile", r.mean_percentile}});
        return {200, j};
    } catch (const Error& e) {
        return fail(e);
    }
}

// ---------------------------------------------------------------------------
// HTTP

void Service::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };

    server.set_default_headers({
        {"Access-Control-Allow-Origin", config_.ui_origin},
        {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    });
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/health", [reply](const httplib::Request&, httplib::Response& res) {
        reply(res, {200, Json{{"status", "ok"}}});
    });
    server.Post("/candidates", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, ingest(req.body, req.get_param_value("mode")));
    });
    server.Post("/similar", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, similar(req.body));
    });
    server.Post("/predict-job", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, predict_job(req.body));
    });
    server.Post("/train", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, train(req.body));
    });
    server.Get("/report/metric-ordering", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, metric_ordering(req.get_param_value("query")));
    });
}

}  // namespace turtle::service
