#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turtle/core.hpp"

// One-vs-rest linear SVM trained by seeded stochastic subgradient descent on
// the L2-regularized hinge loss.
namespace turtle::classifier {

struct LabeledExample {
    ScoreVector features;
    std::optional<std::string> label;
};

/// One binary sub-problem: labels are +1 / -1.
struct BinaryProblem {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    double lambda = 1e-3;
};

inline double hinge_loss(double margin) { return margin < 1.0 ? 1.0 - margin : 0.0; }

/// lambda/2 * |w|^2 + mean_i hinge(y_i * (w . x_i + b)); the bias is not regularized.
double objective(const BinaryProblem& problem, std::span<const double> w, double b);

/// A subgradient of `objective`; the hinge kink contributes 0.
void subgradient(const BinaryProblem& problem, std::span<const double> w, double b,
                 std::span<double> grad_w, double& grad_b);

/// Full-data objective after every epoch, one series per class.
struct TrainingTrace {
    std::vector<std::vector<double>> objective;
};

/// Classes are the sorted distinct labels. Learning rate is
/// eta0 / (1 + lambda * t) with t counting updates. Throws EmptyCorpus,
/// UnlabeledProfile, SingleClassCorpus, SchemaMismatch, InvalidArgument.
JobModel train(std::span<const LabeledExample> corpus, const TrainingConfig& config,
               TrainingTrace* trace = nullptr);

struct Prediction {
    std::string label;
    std::vector<double> scores;  // one per model class, in model order
};

/// argmax_c (w_c . x + b_c); ties go to the lowest class index.
/// Throws SchemaMismatch.
Prediction predict(const JobModel& model, const ScoreVector& features);

struct ClassReport {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
};

struct Evaluation {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::vector<ClassReport> per_class;
};

/// Throws EmptyCorpus, UnlabeledProfile. 0/0 precision or recall is 0.
Evaluation evaluate(const JobModel& model, std::span<const LabeledExample> corpus);

/// Plain-text `key value` document; see README for the layout.
std::string serialize(const JobModel& model);
/// Throws ParseError naming the offending line.
JobModel deserialize(std::string_view text);

/// 16 hex digits of FNV-1a over the serialized model.
std::string content_hash(const JobModel& model);

}  // namespace turtle::classifier
