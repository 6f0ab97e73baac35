#include "kgwalk/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kgwalk/util.hpp"

namespace kgwalk {

LabeledSplit load_split(std::istream& in) {
  LabeledSplit split;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = kgwalk::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected entity TAB class TAB {train|test}", line);
    }
    auto entry = std::make_pair(unescape_token(fields[0]), unescape_token(fields[1]));
    if (fields[2] == "train") {
      split.train.push_back(std::move(entry));
    } else if (fields[2] == "test") {
      split.test.push_back(std::move(entry));
    } else {
      throw ParseError(line_no, "split column must be train or test", line);
    }
  }
  validate_split(split);
  return split;
}

LabeledSplit load_split_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_split(in);
}

void validate_split(const LabeledSplit& split) {
  std::unordered_set<std::string> train_entities;
  std::unordered_set<std::string> train_classes;
  for (const auto& [entity, cls] : split.train) {
    train_entities.insert(entity);
    train_classes.insert(cls);
  }
  for (const auto& [entity, cls] : split.test) {
    if (train_entities.contains(entity)) {
      throw Error("split: entity appears in both train and test: " + entity);
    }
    if (!train_classes.contains(cls)) {
      throw Error("split: test class missing from train set: " + cls);
    }
  }
}

std::span<const double> default_regularization_grid() {
  static const double kGrid[] = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  return kGrid;
}

namespace detail {

namespace {

double logistic_loss(const std::vector<double>& features, std::size_t dim,
                     const std::vector<std::size_t>& labels, std::size_t classes,
                     const std::vector<double>& w, double lambda,
                     std::vector<double>* probs_out) {
  const std::size_t n = labels.size();
  const std::size_t cols = dim + 1;
  double loss = 0.0;
  if (probs_out) probs_out->assign(n * classes, 0.0);
  std::vector<double> logits(classes);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = features.data() + i * dim;
    double max_logit = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
      const double* row = w.data() + c * cols;
      double z = row[dim];
      for (std::size_t d = 0; d < dim; ++d) z += row[d] * x[d];
      logits[c] = z;
      max_logit = std::max(max_logit, z);
    }
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      logits[c] = std::exp(logits[c] - max_logit);
      denom += logits[c];
    }
    loss -= std::log(logits[labels[i]] / denom);
    if (probs_out) {
      for (std::size_t c = 0; c < classes; ++c) {
        (*probs_out)[i * classes + c] = logits[c] / denom;
      }
    }
  }
  loss /= static_cast<double>(n);
  double reg = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double* row = w.data() + c * cols;
    for (std::size_t d = 0; d < dim; ++d) reg += row[d] * row[d];  // bias unregularized
  }
  return loss + 0.5 * lambda * reg;
}

}  // namespace

LogisticFit fit_multinomial_logistic(const std::vector<double>& features, std::size_t dimension,
                                     const std::vector<std::size_t>& labels, std::size_t classes,
                                     double regularization_c, int max_steps, double tolerance) {
  const std::size_t n = labels.size();
  if (n == 0) throw Error("classifier: empty training set");
  if (classes < 2) throw Error("classifier: need at least two classes");
  if (regularization_c <= 0) throw Error("classifier: regularization must be positive");
  const std::size_t cols = dimension + 1;
  const double lambda = 1.0 / (regularization_c * static_cast<double>(n));

  LogisticFit fit;
  fit.weights.assign(classes * cols, 0.0);
  std::vector<double> probs;
  double loss = logistic_loss(features, dimension, labels, classes, fit.weights, lambda, &probs);
  fit.loss_trace.push_back(loss);

  std::vector<double> grad(classes * cols);
  std::vector<double> candidate(classes * cols);
  double step = 1.0;

  for (int iter = 0; iter < max_steps; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = features.data() + i * dimension;
      for (std::size_t c = 0; c < classes; ++c) {
        double delta = probs[i * classes + c] - (labels[i] == c ? 1.0 : 0.0);
        double* row = grad.data() + c * cols;
        for (std::size_t d = 0; d < dimension; ++d) row[d] += delta * x[d];
        row[dimension] += delta;
      }
    }
    double grad_norm = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      double* row = grad.data() + c * cols;
      for (std::size_t d = 0; d < cols; ++d) {
        row[d] /= static_cast<double>(n);
        if (d < dimension) row[d] += lambda * fit.weights[c * cols + d];
        grad_norm += row[d] * row[d];
      }
    }
    if (grad_norm == 0.0) break;

    // backtracking keeps the trace monotone even for aggressive steps
    double next_loss = 0.0;
    bool accepted = false;
    while (step > 1e-14) {
      for (std::size_t k = 0; k < candidate.size(); ++k) {
        candidate[k] = fit.weights[k] - step * grad[k];
      }
      next_loss = logistic_loss(features, dimension, labels, classes, candidate, lambda, &probs);
      if (next_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    fit.weights.swap(candidate);
    fit.loss_trace.push_back(next_loss);
    bool converged = loss - next_loss < tolerance;
    loss = next_loss;
    step = std::min(step * 1.3, 1e6);
    if (converged) break;
  }
  return fit;
}

}  // namespace detail

std::size_t LogisticModel::predict(std::span<const double> x) const {
  const std::size_t cols = dimension + 1;
  std::size_t best = 0;
  double best_z = -1e300;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double* row = weights.data() + c * cols;
    double z = row[dimension];
    for (std::size_t d = 0; d < dimension; ++d) z += row[d] * x[d];
    if (z > best_z) {
      best_z = z;
      best = c;
    }
  }
  return best;
}

namespace {

struct TrainData {
  std::vector<double> features;       // n x dim
  std::vector<std::size_t> labels;    // class ids
  std::vector<std::string> classes;   // id -> name
};

TrainData gather_train_data(const EmbeddingMatrix& emb, const LabeledSplit& split) {
  TrainData data;
  std::unordered_map<std::string, std::size_t> class_ids;
  data.features.reserve(split.train.size() * emb.dimension());
  for (const auto& [entity, cls] : split.train) {
    auto idx = emb.vocabulary().find(entity);
    if (!idx) throw Error("entity not in embedding vocabulary: " + entity);
    auto vec = emb.input_vector(*idx);
    data.features.insert(data.features.end(), vec.begin(), vec.end());
    auto [it, inserted] = class_ids.emplace(cls, data.classes.size());
    if (inserted) data.classes.push_back(cls);
    data.labels.push_back(it->second);
  }
  return data;
}

// Stratified fold ids: per class, members shuffled then dealt round-robin.
std::vector<std::size_t> stratified_folds(const std::vector<std::size_t>& labels,
                                          std::size_t classes, int folds, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(mix_seed(seed, 0xf01d));
  std::vector<std::size_t> fold_of(labels.size(), 0);
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) {
      fold_of[members[j]] = j % static_cast<std::size_t>(folds);
    }
  }
  return fold_of;
}

}  // namespace

LogisticModel train_classifier(const EmbeddingMatrix& features, const LabeledSplit& split,
                               std::span<const double> reg_grid, int folds, std::uint64_t seed) {
  if (split.train.empty()) throw Error("classifier: empty train split");
  if (reg_grid.empty()) throw Error("classifier: empty regularization grid");
  TrainData data = gather_train_data(features, split);
  const std::size_t dim = features.dimension();
  const std::size_t classes = data.classes.size();
  if (classes < 2) {
    throw Error("classifier: train split is degenerate (single class), cannot cross-validate");
  }
  folds = std::max(2, std::min<int>(folds, static_cast<int>(data.labels.size())));

  double best_c = reg_grid[0];
  double best_score = -1.0;
  if (reg_grid.size() > 1) {
    std::vector<std::size_t> fold_of = stratified_folds(data.labels, classes, folds, seed);

    // one task per (grid value, fold); folds run in parallel, the reduction
    // below is sequential so the choice is deterministic
    struct FoldResult {
      std::size_t correct = 0;
      std::size_t evaluated = 0;
    };
    const std::size_t grid_size = reg_grid.size();
    std::vector<FoldResult> results(grid_size * static_cast<std::size_t>(folds));
    parallel_for(results.size(), static_cast<int>(std::min<std::size_t>(results.size(), 8)),
                 [&](std::size_t begin, std::size_t end) {
      for (std::size_t task = begin; task < end; ++task) {
        double c = reg_grid[task / static_cast<std::size_t>(folds)];
        std::size_t fold = task % static_cast<std::size_t>(folds);
        std::vector<double> sub_features;
        std::vector<std::size_t> sub_labels;
        std::vector<std::size_t> held_out;
        for (std::size_t i = 0; i < data.labels.size(); ++i) {
          if (fold_of[i] == fold) {
            held_out.push_back(i);
          } else {
            const double* x = data.features.data() + i * dim;
            sub_features.insert(sub_features.end(), x, x + dim);
            sub_labels.push_back(data.labels[i]);
          }
        }
        if (held_out.empty()) continue;
        std::set<std::size_t> present(sub_labels.begin(), sub_labels.end());
        if (present.size() < 2) continue;
        auto fit = detail::fit_multinomial_logistic(sub_features, dim, sub_labels, classes, c);
        LogisticModel sub;
        sub.classes = data.classes;
        sub.dimension = dim;
        sub.weights = std::move(fit.weights);
        for (std::size_t i : held_out) {
          std::span<const double> x{data.features.data() + i * dim, dim};
          results[task].correct += sub.predict(x) == data.labels[i];
          ++results[task].evaluated;
        }
      }
    });

    std::size_t total_evaluated = 0;
    for (std::size_t g = 0; g < grid_size; ++g) {
      std::size_t correct = 0;
      std::size_t evaluated = 0;
      for (int fold = 0; fold < folds; ++fold) {
        correct += results[g * folds + fold].correct;
        evaluated += results[g * folds + fold].evaluated;
      }
      total_evaluated += evaluated;
      if (evaluated == 0) continue;
      double score = static_cast<double>(correct) / static_cast<double>(evaluated);
      if (score > best_score) {
        best_score = score;
        best_c = reg_grid[g];
      }
    }
    // splits too small to yield a usable fold (e.g. one example per class)
    // fall back to the first grid value
    if (total_evaluated == 0) best_c = reg_grid[0];
  }

  auto fit = detail::fit_multinomial_logistic(data.features, dim, data.labels, classes, best_c);
  LogisticModel model;
  model.classes = std::move(data.classes);
  model.dimension = dim;
  model.weights = std::move(fit.weights);
  model.chosen_regularization = best_c;
  return model;
}

double evaluate_accuracy(const LogisticModel& model, const EmbeddingMatrix& features,
                         const LabeledSplit& split) {
  if (split.test.empty()) throw Error("evaluate: empty test split");
  std::unordered_map<std::string, std::size_t> class_ids;
  for (std::size_t c = 0; c < model.classes.size(); ++c) class_ids.emplace(model.classes[c], c);
  std::size_t correct = 0;
  for (const auto& [entity, cls] : split.test) {
    auto idx = features.vocabulary().find(entity);
    if (!idx) throw Error("entity not in embedding vocabulary: " + entity);
    auto it = class_ids.find(cls);
    if (it == class_ids.end()) continue;  // class unseen in train: always wrong
    correct += model.predict(features.input_vector(*idx)) == it->second;
  }
  return static_cast<double>(correct) / static_cast<double>(split.test.size());
}

EvaluationReport repeat_runs(const std::function<std::pair<double, double>(std::uint64_t)>& run,
                             int repetitions, std::uint64_t base_seed, bool vary_seeds) {
  if (repetitions < 1) throw Error("repetitions must be at least 1");
  EvaluationReport report;
  for (int i = 0; i < repetitions; ++i) {
    std::uint64_t seed = vary_seeds ? mix_seed(base_seed, static_cast<std::uint64_t>(i))
                                    : base_seed;
    auto [accuracy, chosen_c] = run(seed);
    report.seeds.push_back(seed);
    report.accuracies.push_back(accuracy);
    report.chosen_regularization.push_back(chosen_c);
  }
  report.mean = std::accumulate(report.accuracies.begin(), report.accuracies.end(), 0.0) /
                static_cast<double>(report.accuracies.size());
  if (report.accuracies.size() > 1) {
    double ss = 0.0;
    for (double a : report.accuracies) ss += (a - report.mean) * (a - report.mean);
    report.stddev = std::sqrt(ss / static_cast<double>(report.accuracies.size() - 1));
  }
  return report;
}

std::vector<double> average_rank(const std::vector<std::vector<double>>& scores_by_dataset) {
  if (scores_by_dataset.empty()) throw Error("average_rank: no datasets");
  const std::size_t strategies = scores_by_dataset.front().size();
  if (strategies == 0) throw Error("average_rank: no strategies");
  std::vector<double> rank_sum(strategies, 0.0);
  for (const auto& scores : scores_by_dataset) {
    if (scores.size() != strategies) throw Error("average_rank: ragged score table");
    for (double s : scores) {
      if (!std::isfinite(s)) throw Error("average_rank: missing cell");
    }
    std::vector<std::size_t> order(strategies);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::size_t i = 0;
    while (i < strategies) {
      std::size_t j = i;
      while (j + 1 < strategies && scores[order[j + 1]] == scores[order[i]]) ++j;
      double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) rank_sum[order[k]] += mean_rank;
      i = j + 1;
    }
  }
  for (double& r : rank_sum) r /= static_cast<double>(scores_by_dataset.size());
  return rank_sum;
}

std::string render_rank_table(std::span<const std::string> datasets,
                              std::span<const std::string> strategies,
                              const std::vector<std::vector<double>>& scores_by_dataset) {
  if (datasets.size() != scores_by_dataset.size()) {
    throw Error("rank table: dataset count does not match score rows");
  }
  std::vector<double> ranks = average_rank(scores_by_dataset);

  std::size_t label_width = std::string("avg rank").size();
  for (const auto& d : datasets) label_width = std::max(label_width, d.size());

  auto cell = [](double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return std::string(buf);
  };

  std::vector<std::size_t> widths(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    widths[s] = strategies[s].size();
    for (const auto& row : scores_by_dataset) widths[s] = std::max(widths[s], cell(row[s]).size());
    widths[s] = std::max(widths[s], cell(ranks[s]).size());
  }

  std::string out(label_width, ' ');
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    out += "  ";
    out += std::string(widths[s] - strategies[s].size(), ' ');
    out += strategies[s];
  }
  out += '\n';
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    out += datasets[d];
    out += std::string(label_width - datasets[d].size(), ' ');
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      std::string c = cell(scores_by_dataset[d][s]);
      out += "  ";
      out += std::string(widths[s] - c.size(), ' ');
      out += c;
    }
    out += '\n';
  }
  out += "avg rank";
  out += std::string(label_width - 8, ' ');
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    std::string c = cell(ranks[s]);
    out += "  ";
    out += std::string(widths[s] - c.size(), ' ');
    out += c;
  }
  out += '\n';
  return out;
}

}  // namespace kgwalk
