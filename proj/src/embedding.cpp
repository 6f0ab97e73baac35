#include "kgwalk/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "kgwalk/util.hpp"

namespace kgwalk {

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  auto it = index.find(std::string(token));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Vocabulary::require(std::string_view token) const {
  auto idx = find(token);
  if (!idx) throw Error("token not in vocabulary: " + std::string(token));
  return *idx;
}

Vocabulary build_vocabulary(const WalkCorpus& corpus, std::int64_t min_count) {
  if (corpus.walks.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& walk : corpus.walks) {
    for (const std::string& token : walk) ++counts[token];
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) throw Error("min_count leaves the vocabulary empty");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  vocab.tokens.reserve(kept.size());
  vocab.counts.reserve(kept.size());
  for (auto& [token, count] : kept) {
    vocab.index.emplace(token, static_cast<std::uint32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(std::move(token));
    vocab.counts.push_back(count);
  }
  return vocab;
}

EmbeddingMatrix::EmbeddingMatrix(Vocabulary vocab, std::size_t dimension)
    : vocab_(std::move(vocab)),
      dimension_(dimension),
      input_(vocab_.size() * dimension, 0.0),
      output_(vocab_.size() * dimension, 0.0) {
  if (dimension == 0) throw Error("embedding dimension must be positive");
  if (vocab_.size() == 0) throw Error("embedding vocabulary must be non-empty");
}

std::span<const double> EmbeddingMatrix::input_vector(std::size_t idx) const {
  return {input_.data() + idx * dimension_, dimension_};
}
std::span<double> EmbeddingMatrix::input_vector(std::size_t idx) {
  return {input_.data() + idx * dimension_, dimension_};
}
std::span<const double> EmbeddingMatrix::output_vector(std::size_t idx) const {
  return {output_.data() + idx * dimension_, dimension_};
}
std::span<double> EmbeddingMatrix::output_vector(std::size_t idx) {
  return {output_.data() + idx * dimension_, dimension_};
}

std::span<const double> EmbeddingMatrix::vector_of(std::string_view token) const {
  return input_vector(vocab_.require(token));
}

bool EmbeddingMatrix::all_finite() const {
  auto finite = [](const std::vector<double>& values) {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(input_) && finite(output_);
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double dot(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) sum += a[i] * b[i];
  return sum;
}

// Shared update for one (center, target, label) pair: accumulates the center
// gradient in `scratch` and updates the target's output vector in place.
inline void update_target(const double* center, double* target, double label, double lr,
                          std::size_t dim, double* scratch) {
  double g = (label - sigmoid(dot(center, target, dim))) * lr;
  for (std::size_t i = 0; i < dim; ++i) scratch[i] += g * target[i];
  for (std::size_t i = 0; i < dim; ++i) target[i] += g * center[i];
}

// Cumulative unigram^(3/4) table; negatives drawn by binary search.
std::vector<double> negative_cdf(const Vocabulary& vocab) {
  std::vector<double> cdf(vocab.size());
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    total += std::pow(static_cast<double>(vocab.counts[i]), 0.75);
    cdf[i] = total;
  }
  return cdf;
}

inline std::size_t draw_negative(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.uniform() * cdf.back();
  return static_cast<std::size_t>(
      std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace

namespace sgns {

double sample_objective(const EmbeddingMatrix& m, std::size_t center, std::size_t context,
                        std::span<const std::size_t> negatives) {
  const double* v = m.input_vector(center).data();
  const std::size_t dim = m.dimension();
  double obj = std::log(sigmoid(dot(v, m.output_vector(context).data(), dim)));
  for (std::size_t n : negatives) {
    obj += std::log(sigmoid(-dot(v, m.output_vector(n).data(), dim)));
  }
  return obj;
}

SampleGradient sample_gradient(const EmbeddingMatrix& m, std::size_t center, std::size_t context,
                               std::span<const std::size_t> negatives) {
  const std::size_t dim = m.dimension();
  const double* v = m.input_vector(center).data();
  SampleGradient grad;
  grad.center.assign(dim, 0.0);
  grad.context.assign(dim, 0.0);
  grad.negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));

  const double* u_o = m.output_vector(context).data();
  double r_o = 1.0 - sigmoid(dot(v, u_o, dim));
  for (std::size_t i = 0; i < dim; ++i) {
    grad.center[i] += r_o * u_o[i];
    grad.context[i] = r_o * v[i];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double* u_n = m.output_vector(negatives[k]).data();
    double r_n = -sigmoid(dot(v, u_n, dim));
    for (std::size_t i = 0; i < dim; ++i) {
      grad.center[i] += r_n * u_n[i];
      grad.negatives[k][i] = r_n * v[i];
    }
  }
  return grad;
}

void apply_sample(EmbeddingMatrix& m, std::size_t center, std::size_t context,
                  std::span<const std::size_t> negatives, double lr) {
  const std::size_t dim = m.dimension();
  std::vector<double> scratch(dim, 0.0);
  double* v = m.input_vector(center).data();
  update_target(v, m.output_vector(context).data(), 1.0, lr, dim, scratch.data());
  for (std::size_t n : negatives) {
    update_target(v, m.output_vector(n).data(), 0.0, lr, dim, scratch.data());
  }
  for (std::size_t i = 0; i < dim; ++i) v[i] += scratch[i];
}

}  // namespace sgns

EmbeddingMatrix train_skipgram(const WalkCorpus& corpus, const Vocabulary& vocab,
                               const TrainingConfig& config) {
  if (config.dimension < 1) throw Error("embedding dimension must be positive");
  if (vocab.size() == 0) throw Error("embedding vocabulary must be non-empty");
  if (config.window < 1) throw Error("window must be at least 1");
  if (config.negatives < 0) throw Error("negative count must be non-negative");
  if (config.epochs < 1) throw Error("epochs must be at least 1");

  const std::size_t dim = static_cast<std::size_t>(config.dimension);
  EmbeddingMatrix m(vocab, dim);
  m.set_config(config);

  // tokens outside the vocabulary are dropped from the walk
  std::vector<std::vector<std::uint32_t>> walks;
  walks.reserve(corpus.walks.size());
  std::size_t total_centers_per_epoch = 0;
  for (const auto& walk : corpus.walks) {
    std::vector<std::uint32_t> indices;
    indices.reserve(walk.size());
    for (const std::string& token : walk) {
      if (auto idx = vocab.find(token)) indices.push_back(*idx);
    }
    if (indices.empty()) continue;
    total_centers_per_epoch += indices.size();
    walks.push_back(std::move(indices));
  }

  {
    Rng init_rng(mix_seed(config.seed, 0x1b17));
    for (std::size_t idx = 0; idx < vocab.size(); ++idx) {
      auto row = m.input_vector(idx);
      for (std::size_t i = 0; i < dim; ++i) {
        row[i] = (init_rng.uniform() - 0.5) / static_cast<double>(dim);
      }
    }
  }
  if (walks.empty()) return m;

  const std::vector<double> cdf = negative_cdf(vocab);
  const double total_centers =
      static_cast<double>(total_centers_per_epoch) * static_cast<double>(config.epochs);
  std::atomic<std::uint64_t> processed{0};

  auto run_worker = [&](int worker, std::size_t begin, std::size_t end) {
    Rng rng(mix_seed(config.seed, 0xbeef + static_cast<std::uint64_t>(worker)));
    std::vector<double> scratch(dim);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t w = begin; w < end; ++w) {
        const auto& walk = walks[w];
        for (std::size_t i = 0; i < walk.size(); ++i) {
          std::uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
          double lr = config.initial_lr *
                      (1.0 - static_cast<double>(done) / (total_centers + 1.0));
          lr = std::max(lr, config.min_lr);

          std::size_t reach = 1 + static_cast<std::size_t>(
                                      rng.below(static_cast<std::uint64_t>(config.window)));
          std::size_t lo = i >= reach ? i - reach : 0;
          std::size_t hi = std::min(walk.size() - 1, i + reach);
          const std::uint32_t center = walk[i];
          double* v = m.input_vector(center).data();
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            const std::uint32_t context = walk[j];
            std::fill(scratch.begin(), scratch.end(), 0.0);
            update_target(v, m.output_vector(context).data(), 1.0, lr, dim, scratch.data());
            for (int k = 0; k < config.negatives; ++k) {
              std::size_t n = draw_negative(cdf, rng);
              if (n == context) continue;  // drawing the positive skips the sample
              update_target(v, m.output_vector(n).data(), 0.0, lr, dim, scratch.data());
            }
            for (std::size_t d = 0; d < dim; ++d) v[d] += scratch[d];
          }
        }
      }
    }
  };

  const int workers = std::max(1, config.workers);
  if (workers == 1 || walks.size() < 2) {
    run_worker(0, 0, walks.size());
  } else {
    // shared matrices updated without locks; racy by design, not reproducible
    std::size_t n = walks.size();
    std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < w; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back([&, t, begin, end] { run_worker(static_cast<int>(t), begin, end); });
    }
    for (auto& th : threads) th.join();
  }
  return m;
}

double cosine_similarity(const EmbeddingMatrix& m, std::string_view a, std::string_view b) {
  auto va = m.vector_of(a);
  auto vb = m.vector_of(b);
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    ab += va[i] * vb[i];
    aa += va[i] * va[i];
    bb += vb[i] * vb[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

void save_embeddings(const EmbeddingMatrix& m, std::ostream& out) {
  if (m.vocabulary_size() == 0 || m.dimension() == 0) {
    throw Error("refusing to save an empty embedding matrix");
  }
  out << m.vocabulary_size() << ' ' << m.dimension() << '\n';
  for (std::size_t idx = 0; idx < m.vocabulary_size(); ++idx) {
    out << escape_token(m.vocabulary().tokens[idx]);
    auto row = m.input_vector(idx);
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i == 0 ? '\t' : ' ') << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw Error("embedding write failed");
}

std::string embeddings_to_string(const EmbeddingMatrix& m) {
  std::ostringstream out;
  save_embeddings(m, out);
  return out.str();
}

void save_embeddings_file(const EmbeddingMatrix& m, const std::string& path) {
  write_file(path, embeddings_to_string(m));
}

EmbeddingMatrix load_embeddings(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("embeddings: missing header");
  std::size_t rows = 0, dim = 0;
  {
    std::istringstream hs(header);
    if (!(hs >> rows >> dim) || rows == 0 || dim == 0) {
      throw Error("embeddings: malformed header: " + header);
    }
    std::string rest;
    if (hs >> rest) throw Error("embeddings: malformed header: " + header);
  }

  Vocabulary vocab;
  std::vector<double> values;
  values.reserve(rows * dim);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= rows) throw Error("embeddings: more rows than the header declares");
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw Error("embeddings: missing TAB after token");
    std::string token = unescape_token(line.substr(0, tab));
    if (!vocab.index.emplace(token, static_cast<std::uint32_t>(row)).second) {
      throw Error("embeddings: duplicate token: " + token);
    }
    vocab.tokens.push_back(std::move(token));
    vocab.counts.push_back(1);  // file stores vectors only

    std::size_t count = 0;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double value = 0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc()) throw Error("embeddings: bad float in row " + std::to_string(row));
      values.push_back(value);
      ++count;
      p = next;
    }
    if (count != dim) {
      throw Error("embeddings: row " + std::to_string(row) + " has " + std::to_string(count) +
                  " values, expected " + std::to_string(dim));
    }
    ++row;
  }
  if (row != rows) {
    throw Error("embeddings: header declares " + std::to_string(rows) + " rows, found " +
                std::to_string(row));
  }
  EmbeddingMatrix m(std::move(vocab), dim);
  for (std::size_t idx = 0; idx < rows; ++idx) {
    auto out_row = m.input_vector(idx);
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(idx * dim),
              values.begin() + static_cast<std::ptrdiff_t>((idx + 1) * dim), out_row.begin());
  }
  return m;
}

EmbeddingMatrix load_embeddings_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_embeddings(in);
}

}  // namespace kgwalk
