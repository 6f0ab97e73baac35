#include "kgwalk/transforms.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

#include "kgwalk/util.hpp"

namespace kgwalk {

std::size_t NGramMap::intern(const std::vector<std::string>& ngram) {
  auto [it, inserted] = ids_.emplace(ngram, order_.size());
  if (inserted) order_.push_back(&it->first);
  return it->second;
}

const std::vector<std::string>& NGramMap::ngram_of(std::size_t id) const {
  if (id >= order_.size()) throw Error("unknown n-gram label: " + std::to_string(id));
  return *order_[id];
}

WalkCorpus anonymize(const WalkCorpus& corpus) {
  WalkCorpus out = corpus.derive("anonymous");
  out.walks.reserve(corpus.walks.size());
  for (const auto& walk : corpus.walks) {
    std::vector<std::string> anon;
    anon.reserve(walk.size());
    anon.push_back(walk.front());
    for (std::size_t i = 1; i < walk.size(); ++i) {
      std::size_t first = 0;
      while (walk[first] != walk[i]) ++first;
      anon.push_back(std::to_string(first));
    }
    out.walks.push_back(std::move(anon));
  }
  return out;
}

WalkCorpus walklets(const WalkCorpus& corpus) {
  WalkCorpus out = corpus.derive("walklet");
  std::unordered_set<std::string> seen;
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 1; i < walk.size(); ++i) {
      std::string key = walk.front() + '\x1f' + walk[i];
      if (seen.insert(std::move(key)).second) {
        out.walks.push_back({walk.front(), walk[i]});
      }
    }
  }
  return out;
}

namespace {

// Number of distinct walks each token occurs in.
std::unordered_map<std::string, std::size_t> walk_frequencies(const WalkCorpus& corpus) {
  std::unordered_map<std::string, std::size_t> counts;
  std::unordered_map<std::string, std::size_t> last_walk;
  for (std::size_t i = 0; i < corpus.walks.size(); ++i) {
    for (const std::string& token : corpus.walks[i]) {
      auto [it, inserted] = last_walk.emplace(token, i);
      if (inserted || it->second != i) {
        it->second = i;
        ++counts[token];
      }
    }
  }
  return counts;
}

void append_halk_walks(const WalkCorpus& corpus,
                       const std::unordered_map<std::string, std::size_t>& counts,
                       double threshold, WalkCorpus& out) {
  const double total = static_cast<double>(corpus.walks.size());
  for (const auto& walk : corpus.walks) {
    std::vector<std::string> kept;
    kept.reserve(walk.size());
    kept.push_back(walk.front());
    for (std::size_t i = 1; i < walk.size(); ++i) {
      if (static_cast<double>(counts.at(walk[i])) / total >= threshold) {
        kept.push_back(walk[i]);
      }
    }
    out.walks.push_back(std::move(kept));
  }
}

std::string thresholds_parameter(std::span<const double> thresholds) {
  std::vector<std::string> parts;
  parts.reserve(thresholds.size());
  for (double t : thresholds) parts.push_back(format_double(t));
  return join(parts, ",");
}

}  // namespace

WalkCorpus halk(const WalkCorpus& corpus, std::span<const double> thresholds) {
  if (thresholds.empty()) throw Error("halk requires at least one threshold");
  WalkCorpus out = corpus.derive("halk");
  out.add_parameter("thresholds", thresholds_parameter(thresholds));
  auto counts = walk_frequencies(corpus);
  for (double threshold : thresholds) {
    append_halk_walks(corpus, counts, threshold, out);
  }
  return out;
}

std::vector<WalkCorpus> halk_per_threshold(const WalkCorpus& corpus,
                                           std::span<const double> thresholds) {
  if (thresholds.empty()) throw Error("halk requires at least one threshold");
  auto counts = walk_frequencies(corpus);
  std::vector<WalkCorpus> out;
  out.reserve(thresholds.size());
  for (double threshold : thresholds) {
    WalkCorpus one = corpus.derive("halk");
    one.add_parameter("thresholds", format_double(threshold));
    append_halk_walks(corpus, counts, threshold, one);
    out.push_back(std::move(one));
  }
  return out;
}

std::span<const double> default_halk_thresholds() {
  static const std::array<double, 8> kThresholds = {0.0,   0.1,   0.05,   0.01,
                                                    0.005, 0.001, 0.0005, 0.0001};
  return kThresholds;
}

namespace {

void wildcard_variants(const std::vector<std::string>& walk, int n_wild,
                       std::vector<std::vector<std::string>>& out) {
  const std::size_t len = walk.size();
  if (len < 1 || static_cast<std::size_t>(n_wild) > len - 1) return;
  std::vector<std::size_t> comb(n_wild);
  for (int i = 0; i < n_wild; ++i) comb[i] = 1 + static_cast<std::size_t>(i);
  while (true) {
    std::vector<std::string> variant = walk;
    for (std::size_t idx : comb) variant[idx] = "*";
    out.push_back(std::move(variant));
    // next combination of n_wild indices from [1, len)
    int pos = n_wild - 1;
    while (pos >= 0 && comb[pos] == len - static_cast<std::size_t>(n_wild - pos)) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int i = pos + 1; i < n_wild; ++i) comb[i] = comb[i - 1] + 1;
  }
}

}  // namespace

WalkCorpus inject_wildcards(const WalkCorpus& corpus, int n_wild) {
  if (n_wild < 0) throw Error("wildcard count must be non-negative");
  WalkCorpus out = corpus.derive("wildcards");
  out.add_parameter("wildcards", std::to_string(n_wild));
  out.walks = corpus.walks;
  if (n_wild == 0) return out;
  for (const auto& walk : corpus.walks) {
    wildcard_variants(walk, n_wild, out.walks);
  }
  return out;
}

WalkCorpus ngram_relabel(const WalkCorpus& corpus, int n, int n_wild) {
  NGramMap map;
  return ngram_relabel(corpus, n, n_wild, map);
}

WalkCorpus ngram_relabel(const WalkCorpus& corpus, int n, int n_wild, NGramMap& map) {
  if (n < 1) throw Error("n-gram size must be at least 1");
  WalkCorpus extended = inject_wildcards(corpus, n_wild);
  WalkCorpus out = corpus.derive("ngram");
  out.add_parameter("n", std::to_string(n));
  out.add_parameter("wildcards", std::to_string(n_wild));
  out.walks.reserve(extended.walks.size());
  const std::size_t window = static_cast<std::size_t>(n);
  for (const auto& walk : extended.walks) {
    std::vector<std::string> relabelled(walk.begin(),
                                        walk.begin() + std::min(window, walk.size()));
    for (std::size_t end = window; end <= walk.size(); ++end) {
      std::vector<std::string> ngram(walk.begin() + (end - window), walk.begin() + end);
      relabelled.push_back("ng" + std::to_string(map.intern(ngram)));
    }
    out.walks.push_back(std::move(relabelled));
  }
  return out;
}

}  // namespace kgwalk
