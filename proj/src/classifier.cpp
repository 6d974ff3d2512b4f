#include "turtle/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace turtle::classifier {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Unbiased draw in [0, bound) from the raw 64-bit stream so the shuffle does
// not depend on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(order[i - 1], order[j]);
    }
}

}  // namespace

double objective(const BinaryProblem& problem, std::span<const double> w, double b) {
    double loss = 0.0;
    for (std::size_t i = 0; i < problem.x.size(); ++i)
        loss += hinge_loss(problem.y[i] * (dot(w, problem.x[i]) + b));
    if (!problem.x.empty()) loss /= static_cast<double>(problem.x.size());
    return 0.5 * problem.lambda * dot(w, w) + loss;
}

void subgradient(const BinaryProblem& problem, std::span<const double> w, double b,
                 std::span<double> grad_w, double& grad_b) {
    const auto n = static_cast<double>(problem.x.size());
    for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] = problem.lambda * w[j];
    grad_b = 0.0;
    for (std::size_t i = 0; i < problem.x.size(); ++i) {
        const auto& x = problem.x[i];
        double y = problem.y[i];
        if (y * (dot(w, x) + b) >= 1.0) continue;
        for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] -= y * x[j] / n;
        grad_b -= y / n;
    }
}

JobModel train(std::span<const LabeledExample> corpus, const TrainingConfig& config, TrainingTrace* trace) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus");
    if (config.epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs", "must be positive");
    if (!(config.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda", "must be positive");
    if (!(config.eta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta0", "must be positive");
    if (config.schedule != "inverse_scaling")
        throw Error(ErrorCode::InvalidArgument, "schedule", "unknown schedule " + config.schedule);

    const auto& schema = corpus.front().features.schema_ptr();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& ex = corpus[i];
        if (!ex.label) throw Error(ErrorCode::UnlabeledProfile, std::to_string(i));
        require_comparable(corpus.front().features, ex.features);
        labels.push_back(*ex.label);
    }
    std::vector<std::string> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) throw Error(ErrorCode::SingleClassCorpus, classes.front());

    const std::size_t n = corpus.size();
    const std::size_t dim = schema->size();

    std::vector<BinaryProblem> problems(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        auto& p = problems[c];
        p.lambda = config.lambda;
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = corpus[i].features.values();
            p.x.emplace_back(v.begin(), v.end());
            p.y.push_back(labels[i] == classes[c] ? 1.0 : -1.0);
        }
    }

    JobModel model;
    model.classes = classes;
    model.schema = schema->names();
    model.weights.assign(classes.size(), std::vector<double>(dim, 0.0));
    model.biases.assign(classes.size(), 0.0);
    model.config = config;
    if (trace) trace->objective.assign(classes.size(), {});

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) shuffle(order, rng);
        for (std::size_t i : order) {
            const double eta = config.eta0 / (1.0 + config.lambda * static_cast<double>(t));
            for (std::size_t c = 0; c < classes.size(); ++c) {
                auto& w = model.weights[c];
                double& b = model.biases[c];
                const auto& x = problems[c].x[i];
                const double y = problems[c].y[i];
                const bool violated = y * (dot(w, x) + b) < 1.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    double g = config.lambda * w[j] - (violated ? y * x[j] : 0.0);
                    w[j] -= eta * g;
                }
                if (violated) b += eta * y;
            }
            ++t;
        }
        if (trace)
            for (std::size_t c = 0; c < classes.size(); ++c)
                trace->objective[c].push_back(objective(problems[c], model.weights[c], model.biases[c]));
    }
    return model;
}

Prediction predict(const JobModel& model, const ScoreVector& features) {
    if (features.schema().names() != model.schema)
        throw Error(ErrorCode::SchemaMismatch, "", "features do not match the model schema");
    Prediction out;
    std::size_t best = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        out.scores.push_back(dot(model.weights[c], features.values()) + model.biases[c]);
        if (out.scores[c] > out.scores[best]) best = c;
    }
    out.label = model.classes.at(best);
    return out;
}

Evaluation evaluate(const JobModel& model, std::span<const LabeledExample> corpus) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus");
    const std::size_t k = model.classes.size();
    std::vector<std::size_t> tp(k, 0), predicted(k, 0), actual(k, 0);

    Evaluation ev;
    ev.total = corpus.size();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus[i].label) throw Error(ErrorCode::UnlabeledProfile, std::to_string(i));
        auto pred = predict(model, corpus[i].features);
        auto pi = static_cast<std::size_t>(
            std::find(model.classes.begin(), model.classes.end(), pred.label) - model.classes.begin());
        ++predicted[pi];
        auto ai = static_cast<std::size_t>(
            std::find(model.classes.begin(), model.classes.end(), *corpus[i].label) - model.classes.begin());
        if (ai < k) ++actual[ai];
        if (pred.label == *corpus[i].label) {
            ++ev.correct;
            ++tp[pi];
        }
    }
    ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
    for (std::size_t c = 0; c < k; ++c) {
        ClassReport r;
        r.label = model.classes[c];
        r.precision = predicted[c] ? static_cast<double>(tp[c]) / static_cast<double>(predicted[c]) : 0.0;
        r.recall = actual[c] ? static_cast<double>(tp[c]) / static_cast<double>(actual[c]) : 0.0;
        ev.per_class.push_back(std::move(r));
    }
    return ev;
}

// ---------------------------------------------------------------------------
// Persistence
//
//   turtle_job_model 1
//   snapshot_version <u64>
//   epochs / lambda / eta0 / schedule / seed / shuffle <value>
//   schema <n> <name>...
//   classes <k>
//   then per class:  class <label to end of line> / bias <v> / weights <v>...

std::string serialize(const JobModel& model) {
    std::string out;
    out += "turtle_job_model 1\n";
    out += fmt::format("snapshot_version {}\n", model.snapshot_version);
    out += fmt::format("epochs {}\n", model.config.epochs);
    out += fmt::format("lambda {}\n", model.config.lambda);
    out += fmt::format("eta0 {}\n", model.config.eta0);
    out += fmt::format("schedule {}\n", model.config.schedule);
    out += fmt::format("seed {}\n", model.config.seed);
    out += fmt::format("shuffle {}\n", model.config.shuffle ? 1 : 0);
    out += fmt::format("schema {}", model.schema.size());
    for (const auto& name : model.schema) out += " " + name;
    out += "\n";
    out += fmt::format("classes {}\n", model.classes.size());
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        out += "class " + model.classes[c] + "\n";
        out += fmt::format("bias {}\n", model.biases[c]);
        out += "weights";
        for (double w : model.weights[c]) out += fmt::format(" {}", w);
        out += "\n";
    }
    return out;
}

namespace {

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    // Returns the value after `key ` on the next line.
    std::string_view expect(std::string_view key) {
        if (pos_ >= text_.size()) fail("unexpected end of document, expected " + std::string(key));
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos) end = text_.size();
        std::string_view line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++line_no_;
        if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ' ')
            fail("expected key " + std::string(key));
        return line.substr(key.size() + 1);
    }

    template <typename T>
    T number(std::string_view token) {
        T value{};
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            fail("bad number '" + std::string(token) + "'");
        return value;
    }

    std::vector<std::string_view> split(std::string_view s) {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < s.size()) {
            auto j = s.find(' ', i);
            if (j == std::string_view::npos) j = s.size();
            if (j > i) out.push_back(s.substr(i, j - i));
            i = j + 1;
        }
        return out;
    }

    bool at_end() const { return pos_ >= text_.size(); }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::ParseError, fmt::format("line {}", line_no_), why);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

}  // namespace

JobModel deserialize(std::string_view text) {
    LineReader r(text);
    if (r.expect("turtle_job_model") != "1") r.fail("unsupported model format version");
    JobModel m;
    m.snapshot_version = r.number<std::uint64_t>(r.expect("snapshot_version"));
    m.config.epochs = r.number<int>(r.expect("epochs"));
    m.config.lambda = r.number<double>(r.expect("lambda"));
    m.config.eta0 = r.number<double>(r.expect("eta0"));
    m.config.schedule = std::string(r.expect("schedule"));
    m.config.seed = r.number<std::uint64_t>(r.expect("seed"));
    m.config.shuffle = r.number<int>(r.expect("shuffle")) != 0;

    auto schema = r.split(r.expect("schema"));
    if (schema.empty() || r.number<std::size_t>(schema[0]) != schema.size() - 1) r.fail("schema length mismatch");
    for (std::size_t i = 1; i < schema.size(); ++i) m.schema.emplace_back(schema[i]);

    auto k = r.number<std::size_t>(r.expect("classes"));
    for (std::size_t c = 0; c < k; ++c) {
        m.classes.emplace_back(r.expect("class"));
        m.biases.push_back(r.number<double>(r.expect("bias")));
        std::vector<double> w;
        for (auto tok : r.split(r.expect("weights"))) w.push_back(r.number<double>(tok));
        m.weights.push_back(std::move(w));
    }
    if (!r.at_end()) r.fail("trailing content");
    try {
        m.validate();
    } catch (const Error& e) {
        r.fail(e.what());
    }
    return m;
}

std::string content_hash(const JobModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize(model)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace turtle::classifier
