#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgwalk/embedding.hpp"

namespace kgwalk {

// Fixed train/test split: entity sets disjoint, every test class present in
// the train set.
struct LabeledSplit {
  std::vector<std::pair<std::string, std::string>> train;  // (entity label, class)
  std::vector<std::pair<std::string, std::string>> test;
};

// TSV `entity TAB class TAB {train|test}`; validates the invariants above.
LabeledSplit load_split(std::istream& in);
LabeledSplit load_split_file(const std::string& path);
void validate_split(const LabeledSplit& split);

// L2-regularized multinomial logistic regression trained by full-batch
// gradient descent with backtracking. Regularization values are inverse
// strengths (larger C = weaker penalty), chosen by stratified cross-validation
// on the train split.
struct LogisticModel {
  std::vector<std::string> classes;  // class id -> name, first-appearance order
  std::size_t dimension = 0;
  std::vector<double> weights;  // classes x (dimension + 1), bias last
  double chosen_regularization = 0.0;

  std::size_t predict(std::span<const double> x) const;
};

LogisticModel train_classifier(const EmbeddingMatrix& features, const LabeledSplit& split,
                               std::span<const double> reg_grid, int folds, std::uint64_t seed);

double evaluate_accuracy(const LogisticModel& model, const EmbeddingMatrix& features,
                         const LabeledSplit& split);

std::span<const double> default_regularization_grid();

struct EvaluationReport {
  std::vector<double> accuracies;
  std::vector<double> chosen_regularization;
  std::vector<std::uint64_t> seeds;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

// Reruns one pipeline realization per repetition; run(seed) returns
// (accuracy, chosen regularization). vary_seeds derives a fresh seed per
// repetition, otherwise every run reuses base_seed.
EvaluationReport repeat_runs(const std::function<std::pair<double, double>(std::uint64_t)>& run,
                             int repetitions, std::uint64_t base_seed, bool vary_seeds = true);

// Per-strategy mean rank across datasets: strategies ranked per dataset by
// descending score, ties receiving the mean of their positions.
std::vector<double> average_rank(const std::vector<std::vector<double>>& scores_by_dataset);

std::string render_rank_table(std::span<const std::string> datasets,
                              std::span<const std::string> strategies,
                              const std::vector<std::vector<double>>& scores_by_dataset);

namespace detail {

// Exposed for tests: full-batch fit on explicit features. Returns the loss
// trace (one entry per accepted step, strictly non-increasing).
struct LogisticFit {
  std::vector<double> weights;
  std::vector<double> loss_trace;
};
LogisticFit fit_multinomial_logistic(const std::vector<double>& features, std::size_t dimension,
                                     const std::vector<std::size_t>& labels, std::size_t classes,
                                     double regularization_c, int max_steps = 1000,
                                     double tolerance = 1e-6);

}  // namespace detail

}  // namespace kgwalk
