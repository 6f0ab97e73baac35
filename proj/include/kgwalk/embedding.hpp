#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgwalk/corpus.hpp"

namespace kgwalk {

struct Vocabulary {
  std::vector<std::string> tokens;  // index -> token, by (count desc, token asc)
  std::vector<std::int64_t> counts;
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::uint32_t> find(std::string_view token) const;
  std::uint32_t require(std::string_view token) const;  // throws on unknown token
};

Vocabulary build_vocabulary(const WalkCorpus& corpus, std::int64_t min_count = 1);

struct TrainingConfig {
  int dimension = 500;
  int window = 5;
  int negatives = 25;
  int epochs = 10;
  double initial_lr = 0.025;
  double min_lr = 1e-4;
  std::uint64_t seed = 0;
  int workers = 1;  // 1 => bitwise-reproducible; >1 => lock-free racy updates
};

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(Vocabulary vocab, std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  const Vocabulary& vocabulary() const { return vocab_; }

  std::span<const double> input_vector(std::size_t idx) const;
  std::span<double> input_vector(std::size_t idx);
  std::span<const double> output_vector(std::size_t idx) const;
  std::span<double> output_vector(std::size_t idx);
  std::span<const double> vector_of(std::string_view token) const;

  const TrainingConfig& config() const { return config_; }
  void set_config(const TrainingConfig& config) { config_ = config; }

  bool all_finite() const;

 private:
  Vocabulary vocab_;
  std::size_t dimension_ = 0;
  std::vector<double> input_;
  std::vector<double> output_;
  TrainingConfig config_;
};

// Skip-gram with negative sampling: dynamic window uniform in [1, window],
// negatives from the unigram^(3/4) distribution, input vectors initialised
// uniformly in [-0.5/d, 0.5/d], output vectors zero, learning rate decayed
// linearly to min_lr over the total center count.
EmbeddingMatrix train_skipgram(const WalkCorpus& corpus, const Vocabulary& vocab,
                               const TrainingConfig& config);

double cosine_similarity(const EmbeddingMatrix& m, std::string_view a, std::string_view b);

// Text format: `<vocab_size> <dimension>` then one `token TAB floats...` row
// per input vector, full round-trip precision.
void save_embeddings(const EmbeddingMatrix& m, std::ostream& out);
std::string embeddings_to_string(const EmbeddingMatrix& m);
void save_embeddings_file(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix load_embeddings(std::istream& in);
EmbeddingMatrix load_embeddings_file(const std::string& path);

namespace sgns {

// Objective for one sample: log s(u_o . v_c) + sum_n log s(-u_n . v_c),
// where v is the center's input vector and u are output vectors.
double sample_objective(const EmbeddingMatrix& m, std::size_t center, std::size_t context,
                        std::span<const std::size_t> negatives);

struct SampleGradient {
  std::vector<double> center;                  // d objective / d input[center]
  std::vector<double> context;                 // d objective / d output[context]
  std::vector<std::vector<double>> negatives;  // per negative output vector
};

SampleGradient sample_gradient(const EmbeddingMatrix& m, std::size_t center, std::size_t context,
                               std::span<const std::size_t> negatives);

// One gradient-ascent step, same update order as the training loop.
void apply_sample(EmbeddingMatrix& m, std::size_t center, std::size_t context,
                  std::span<const std::size_t> negatives, double lr);

}  // namespace sgns

}  // namespace kgwalk
