#pragma once

#include <map>
#include <span>
#include <vector>

#include "kgwalk/corpus.hpp"

namespace kgwalk {

// Injective mapping from token tuples to dense integer labels, assigned in
// first-encounter order and rendered as ng<id> tokens.
class NGramMap {
 public:
  std::size_t intern(const std::vector<std::string>& ngram);
  const std::vector<std::string>& ngram_of(std::size_t id) const;
  std::size_t size() const { return order_.size(); }

 private:
  std::map<std::vector<std::string>, std::size_t> ids_;
  std::vector<const std::vector<std::string>*> order_;
};

// Root kept, every later hop replaced by the first index at which its token
// occurs in the walk (root is index 0).
WalkCorpus anonymize(const WalkCorpus& corpus);

// Deduplicated (root, hop) pairs over all walks, first-occurrence order.
WalkCorpus walklets(const WalkCorpus& corpus);

// For each threshold, a copy of every walk keeping the root and the hops whose
// walk-frequency fraction reaches the threshold; copies concatenated in
// threshold order.
WalkCorpus halk(const WalkCorpus& corpus, std::span<const double> thresholds);
std::vector<WalkCorpus> halk_per_threshold(const WalkCorpus& corpus,
                                           std::span<const double> thresholds);
std::span<const double> default_halk_thresholds();

// Original walks plus, per walk, one variant per combination of n_wild
// positions (indices 1..len-1) replaced by `*`; n_wild=0 is the identity.
WalkCorpus inject_wildcards(const WalkCorpus& corpus, int n_wild);

// Wildcard injection followed by sliding-window relabelling: the first n
// tokens verbatim, then one interned label per n-token window, with a single
// map shared across the corpus.
WalkCorpus ngram_relabel(const WalkCorpus& corpus, int n, int n_wild);
WalkCorpus ngram_relabel(const WalkCorpus& corpus, int n, int n_wild, NGramMap& map);

}  // namespace kgwalk
