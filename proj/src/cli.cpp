#include "turtle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "turtle/record.hpp"
#include "turtle/service.hpp"
#include "turtle/store.hpp"

namespace turtle::cli {

using record::Json;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kIoError = 2;

struct Options {
    std::string data_dir = "turtle-data";
    std::uint64_t seed = 42;
    std::string format = "table";

    std::string file;
    bool upsert = false;

    std::string query;
    std::size_t k = 5;
    std::string metric = "all";
    std::string weights;

    std::optional<int> epochs;
    std::optional<double> lambda;
    std::optional<double> eta0;
};

// `name=value,...` into a JSON object; an empty value or `null` becomes null.
Json parse_assignments(const std::string& text, const std::string& what) {
    Json obj = Json::object();
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(pos, end - pos);
        pos = end + 1;
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, what, "expected name=value, got " + item);
        std::string name = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        if (value.empty() || value == "null") {
            obj[name] = nullptr;
            continue;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw Error(ErrorCode::InvalidArgument, name, "'" + value + "' is not a number");
        obj[name] = v;
    }
    return obj;
}

Json query_json(const std::string& query) {
    if (query.find('=') != std::string::npos) return parse_assignments(query, "query");
    return Json(query);
}

int report_error(const service::Response& r, std::ostream& err) {
    err << "error: " << r.body.value("error", std::string("unknown"));
    auto subject = r.body.value("subject", std::string());
    auto detail = r.body.value("detail", std::string());
    if (!subject.empty()) err << "(" << subject << ")";
    if (!detail.empty()) err << ": " << detail;
    err << "\n";
    return r.status == 503 ? kIoError : kRejected;
}

std::string fixed2(double v) { return fmt::format("{:.2f}", v); }

void print_similarity_table(const Json& body, std::ostream& out) {
    const auto& query = body["query"];
    std::string qid = query["id"].is_null() ? "(inline)" : query["id"].get<std::string>();
    out << fmt::format("snapshot {}  query {}  turtle {}\n", body["snapshot_version"].get<std::uint64_t>(), qid,
                       fixed2(query["turtle"]["aggregate"].get<double>()));

    std::vector<std::string> metrics = body["metrics"].get<std::vector<std::string>>();
    std::size_t id_width = std::string_view("candidate").size();
    for (const auto& row : body["rows"]) id_width = std::max(id_width, row["candidate_id"].get<std::string>().size());

    std::string line = fmt::format("{:<{}}", "candidate", id_width);
    for (const auto& m : metrics) line += fmt::format("  {:>{}}", m, std::max<std::size_t>(m.size(), 6));
    line += fmt::format("  {:>6}", "turtle");
    out << line << "\n";

    for (const auto& row : body["rows"]) {
        line = fmt::format("{:<{}}", row["candidate_id"].get<std::string>(), id_width);
        for (const auto& m : metrics)
            line += fmt::format("  {:>{}}", fixed2(row["percentiles"][m].get<double>()),
                                std::max<std::size_t>(m.size(), 6));
        line += fmt::format("  {:>6}", fixed2(row["turtle_score"].get<double>()));
        out << line << "\n";
    }
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Options& opt, std::ostream& out, std::ostream& err) {
    std::ifstream in(opt.file);
    if (!in) {
        err << "error: cannot open " << opt.file << "\n";
        return kIoError;
    }

    struct Pending {
        std::size_t row;
        CandidateProfile profile;
    };
    std::vector<Pending> pending;
    std::vector<std::pair<std::size_t, std::string>> problems;
    const auto now = Timestamp::now();

    const bool csv = opt.file.size() >= 4 && opt.file.substr(opt.file.size() - 4) == ".csv";
    try {
        if (csv) {
            for (auto& row : record::read_csv(in, now)) {
                if (auto* p = std::get_if<CandidateProfile>(&row.value)) pending.push_back({row.row, std::move(*p)});
                else problems.emplace_back(row.row, std::get<Error>(row.value).what());
            }
        } else {
            std::string line;
            std::size_t row = 0;
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                ++row;
                try {
                    pending.push_back({row, record::from_json(record::parse(line), now)});
                } catch (const Error& e) {
                    problems.emplace_back(row, e.what());
                }
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kRejected;
    }

    std::vector<CandidateProfile> profiles;
    for (const auto& p : pending) profiles.push_back(p.profile);

    store::IngestReport report;
    try {
        store::Store store(opt.data_dir);
        report = store.ingest(profiles, opt.upsert ? store::IngestMode::upsert : store::IngestMode::append);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::StorageUnavailable ? kIoError : kRejected;
    }
    for (const auto& r : report.rejected) {
        std::string msg(to_string(r.code));
        if (!r.subject.empty()) msg += "(" + r.subject + ")";
        if (!r.detail.empty()) msg += ": " + r.detail;
        problems.emplace_back(pending[r.index].row, msg);
    }
    std::sort(problems.begin(), problems.end());

    for (const auto& [row, msg] : problems) out << fmt::format("row {}  rejected  {}\n", row, msg);
    out << fmt::format("accepted {}\n", report.accepted);
    out << fmt::format("rejected {}\n", problems.size());
    out << fmt::format("snapshot {}\n", report.version);
    return problems.empty() ? kOk : kRejected;
}

template <typename Fn>
int with_service(const Options& opt, std::ostream& err, Fn&& fn) {
    try {
        store::Store store(opt.data_dir);
        service::Config cfg;
        cfg.seed = opt.seed;
        cfg.default_k = opt.k;
        service::Service svc(store, cfg);
        return fn(svc);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::StorageUnavailable || e.code() == ErrorCode::CorruptLine ? kIoError
                                                                                                : kRejected;
    }
}

int cmd_similar(const Options& opt, std::ostream& out, std::ostream& err) {
    Json request;
    try {
        request["query"] = query_json(opt.query);
        request["k"] = opt.k;
        request["metrics"] = Json::array();
        if (opt.metric == "all") {
            request["metrics"] = "all";
        } else {
            std::size_t pos = 0;
            while (pos <= opt.metric.size()) {
                auto end = opt.metric.find(',', pos);
                if (end == std::string::npos) end = opt.metric.size();
                if (end > pos) request["metrics"].push_back(opt.metric.substr(pos, end - pos));
                pos = end + 1;
            }
        }
        if (!opt.weights.empty()) request["weights"] = parse_assignments(opt.weights, "weights");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kRejected;
    }

    return with_service(opt, err, [&](service::Service& svc) {
        auto r = svc.similar(request.dump());
        if (r.status != 200) return report_error(r, err);
        if (opt.format == "records") out << r.body.dump() << "\n";
        else print_similarity_table(r.body, out);
        return kOk;
    });
}

int cmd_train(const Options& opt, std::ostream& out, std::ostream& err) {
    Json request = Json::object();
    request["seed"] = opt.seed;
    if (opt.epochs) request["epochs"] = *opt.epochs;
    if (opt.lambda) request["lambda"] = *opt.lambda;
    if (opt.eta0) request["eta0"] = *opt.eta0;

    return with_service(opt, err, [&](service::Service& svc) {
        auto r = svc.train(request.dump());
        if (r.status != 200) return report_error(r, err);
        if (opt.format == "records") {
            out << r.body.dump() << "\n";
            return kOk;
        }
        const auto& b = r.body;
        out << fmt::format("snapshot {}  model {}\n", b["snapshot_version"].get<std::uint64_t>(),
                           b["model_hash"].get<std::string>());
        out << "classes";
        for (const auto& c : b["classes"]) out << " " << c.get<std::string>();
        out << "\n";
        out << fmt::format("trained on {} candidates\n", b["trained_on"].get<std::size_t>());
        out << fmt::format("accuracy {:.4f}\n", b["training_accuracy"].get<double>());
        for (const auto& c : b["per_class"])
            out << fmt::format("  {}  precision {:.4f}  recall {:.4f}\n", c["label"].get<std::string>(),
                               c["precision"].get<double>(), c["recall"].get<double>());
        return kOk;
    });
}

int cmd_predict(const Options& opt, std::ostream& out, std::ostream& err) {
    Json request;
    try {
        request["query"] = query_json(opt.query);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kRejected;
    }
    return with_service(opt, err, [&](service::Service& svc) {
        auto r = svc.predict_job(request.dump());
        if (r.status == 409 && r.body.value("error", "") == "NoModelTrained") {
            err << "error: no model trained\n";
            return kRejected;
        }
        if (r.status != 200) return report_error(r, err);
        if (opt.format == "records") {
            out << r.body.dump() << "\n";
            return kOk;
        }
        out << fmt::format("predicted {}\n", r.body["label"].get<std::string>());
        for (const auto& s : r.body["scores"])
            out << fmt::format("  {}  {:.4f}\n", s["label"].get<std::string>(), s["score"].get<double>());
        return kOk;
    });
}

int cmd_report(const Options& opt, std::ostream& out, std::ostream& err) {
    return with_service(opt, err, [&](service::Service& svc) {
        auto r = svc.metric_ordering(opt.query);
        if (r.status != 200) return report_error(r, err);
        if (opt.format == "records") {
            out << r.body.dump() << "\n";
            return kOk;
        }
        out << fmt::format("snapshot {}  query {}\n", r.body["snapshot_version"].get<std::uint64_t>(), opt.query);
        for (const auto& row : r.body["rows"])
            out << fmt::format("{:<12}  {:>6}\n", row["metric"].get<std::string>(),
                               fixed2(row["mean_percentile"].get<double>()));
        return kOk;
    });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    if (const char* env = std::getenv("TURTLE_DATA_DIR")) opt.data_dir = env;

    CLI::App app{"Turtle Score candidate similarity and job prediction"};
    app.require_subcommand(1);
    app.add_option("--data-dir", opt.data_dir, "Data directory (env TURTLE_DATA_DIR)");
    app.add_option("--seed", opt.seed, "Training seed");
    app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"table", "records"}));

    auto* ingest = app.add_subcommand("ingest", "Ingest candidates from CSV or record lines");
    ingest->add_option("--file", opt.file, "CSV (.csv) or record-line file")->required();
    ingest->add_flag("--upsert", opt.upsert, "Replace candidates with existing ids");

    auto* similar = app.add_subcommand("similar", "Rank candidates similar to a query");
    similar->add_option("--query", opt.query, "Stored id or name=value,... vector")->required();
    similar->add_option("--k", opt.k, "Number of rows")->check(CLI::PositiveNumber);
    similar->add_option("--metric", opt.metric, "Sort metric, comma list, or all");
    similar->add_option("--weights", opt.weights, "Component weights name=value,...");

    auto* train = app.add_subcommand("train", "Train the job-role classifier");
    train->add_option("--epochs", opt.epochs, "Training epochs");
    train->add_option("--lambda", opt.lambda, "L2 regularization");
    train->add_option("--eta0", opt.eta0, "Initial learning rate");

    auto* predict = app.add_subcommand("predict", "Predict a job role");
    predict->add_option("--query", opt.query, "Stored id or name=value,... vector")->required();

    auto* report = app.add_subcommand("report", "Mean similarity per metric, ascending");
    report->add_option("--query", opt.query, "Stored id")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kRejected;
    }

    if (*ingest) return cmd_ingest(opt, out, err);
    if (*similar) return cmd_similar(opt, out, err);
    if (*train) return cmd_train(opt, out, err);
    if (*predict) return cmd_predict(opt, out, err);
    return cmd_report(opt, out, err);
}

}  // namespace turtle::cli
