#include "kgwalk/wl.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_map>

namespace kgwalk {

std::uint32_t WLLabelStore::label(int iteration, VertexId v) const {
  if (iteration < 0 || iteration >= static_cast<int>(labels_.size())) {
    throw Error("wl iteration out of range: " + std::to_string(iteration));
  }
  if (v >= labels_[iteration].size()) {
    throw Error("unknown vertex id: " + std::to_string(v));
  }
  return labels_[iteration][v];
}

std::size_t WLLabelStore::distinct(int iteration) const {
  if (iteration < 0 || iteration >= static_cast<int>(distinct_.size())) {
    throw Error("wl iteration out of range: " + std::to_string(iteration));
  }
  return distinct_[iteration];
}

WLLabelStore wl_relabel(const KnowledgeGraph& g, int iterations) {
  if (iterations < 0) throw Error("wl iterations must be non-negative");
  const std::size_t n = g.vertex_count();

  WLLabelStore store;
  store.labels_.reserve(static_cast<std::size_t>(iterations) + 1);

  // iteration 0: injective integerization of the original labels
  std::vector<std::uint32_t> base(n);
  {
    std::unordered_map<std::string_view, std::uint32_t> intern;
    for (VertexId v = 0; v < n; ++v) {
      auto [it, inserted] =
          intern.emplace(g.vertex(v).label, static_cast<std::uint32_t>(intern.size()));
      base[v] = it->second;
    }
    store.distinct_.push_back(intern.size());
  }
  store.labels_.push_back(std::move(base));

  using Key = std::pair<std::uint32_t, std::vector<std::uint32_t>>;
  for (int k = 1; k <= iterations; ++k) {
    const auto& prev = store.labels_.back();
    std::vector<std::uint32_t> next(n);
    std::map<Key, std::uint32_t> intern;
    for (VertexId v = 0; v < n; ++v) {
      std::vector<std::uint32_t> neighbour_labels;
      auto in = g.in_neighbours(v);
      neighbour_labels.reserve(in.size());
      for (VertexId u : in) neighbour_labels.push_back(prev[u]);
      std::sort(neighbour_labels.begin(), neighbour_labels.end());
      neighbour_labels.erase(std::unique(neighbour_labels.begin(), neighbour_labels.end()),
                             neighbour_labels.end());  // set semantics
      Key key{prev[v], std::move(neighbour_labels)};
      auto [it, inserted] = intern.emplace(std::move(key), static_cast<std::uint32_t>(intern.size()));
      next[v] = it->second;
    }
    store.distinct_.push_back(intern.size());
    store.labels_.push_back(std::move(next));
  }
  return store;
}

std::vector<WlViolation> check_wl_bijection(const KnowledgeGraph& g, const WLLabelStore& store,
                                            bool all_kinds) {
  if (store.vertex_count() != g.vertex_count()) {
    throw Error("wl store does not match the graph");
  }
  std::vector<WlViolation> violations;
  for (int k = 0; k <= store.iterations(); ++k) {
    std::unordered_map<std::uint32_t, VertexId> first_with_label;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (!all_kinds && g.vertex(v).kind != VertexKind::Entity) continue;
      auto [it, inserted] = first_with_label.emplace(store.label(k, v), v);
      if (!inserted) violations.push_back(WlViolation{k, it->second, v});
    }
  }
  return violations;
}

WalkCorpus wl_walk_corpus(const KnowledgeGraph& g, std::span<const std::vector<Walk>> per_root,
                          const WLLabelStore& store, const WalkConfig& cfg, bool relabel_roots) {
  WalkCorpus corpus;
  corpus.strategy = "wl";
  corpus.depth = cfg.depth;
  corpus.seed = cfg.seed;
  corpus.add_parameter("iterations", std::to_string(store.iterations()));
  if (relabel_roots) corpus.add_parameter("relabel_roots", "1");

  for (int k = 0; k <= store.iterations(); ++k) {
    std::string prefix = "wl" + std::to_string(k) + "_";
    for (const auto& walks : per_root) {
      for (const Walk& walk : walks) {
        std::vector<std::string> tokens;
        tokens.reserve(walk.size());
        for (std::size_t i = 0; i < walk.size(); ++i) {
          if (i == 0 && !relabel_roots) {
            tokens.push_back(g.vertex(walk[i]).label);
          } else {
            tokens.push_back(prefix + std::to_string(store.label(k, walk[i])));
          }
        }
        corpus.walks.push_back(std::move(tokens));
      }
    }
  }
  return corpus;
}

void write_wl_labels(const KnowledgeGraph& g, const WLLabelStore& store, std::ostream& out) {
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (int k = 0; k <= store.iterations(); ++k) {
      out << escape_token(g.vertex(v).label) << '\t' << k << '\t' << store.label(k, v) << '\n';
    }
  }
}

}  // namespace kgwalk
