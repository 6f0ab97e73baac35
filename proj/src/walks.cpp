#include "kgwalk/walks.hpp"

#include <algorithm>
#include <unordered_set>

namespace kgwalk {

namespace {

void require_entity_root(const KnowledgeGraph& g, VertexId root) {
  if (g.vertex(root).kind != VertexKind::Entity) {
    throw Error("walk root must be an entity vertex: " + g.vertex(root).label);
  }
}

struct WalkHash {
  std::size_t operator()(const Walk& w) const {
    return fnv1a64(std::string_view(reinterpret_cast<const char*>(w.data()),
                                    w.size() * sizeof(VertexId)));
  }
};

}  // namespace

std::vector<Walk> extract_exhaustive(const KnowledgeGraph& g, VertexId root,
                                     const WalkConfig& cfg) {
  require_entity_root(g, root);
  if (cfg.depth < 0) throw Error("walk depth must be non-negative");

  std::vector<Walk> out;
  Walk current{root};
  const std::size_t want = static_cast<std::size_t>(cfg.depth) + 1;

  // depth-first so emission order follows walk prefixes
  auto descend = [&](auto&& self) -> void {
    if (current.size() == want) {
      out.push_back(current);
      return;
    }
    auto next = g.out_neighbours(current.back());
    if (next.empty()) {
      out.push_back(current);  // dead end kept at maximal length
      return;
    }
    for (VertexId v : next) {
      current.push_back(v);
      self(self);
      current.pop_back();
    }
  };
  descend(descend);
  return out;
}

std::uint64_t count_walks_oracle(const KnowledgeGraph& g, VertexId root, int depth) {
  if (depth < 0) return 0;
  std::vector<std::uint64_t> counts(g.vertex_count(), 0);
  counts[root] = 1;
  std::vector<std::uint64_t> next(g.vertex_count(), 0);
  for (int level = 0; level < depth; ++level) {
    std::fill(next.begin(), next.end(), 0);
    for (VertexId u = 0; u < counts.size(); ++u) {
      if (counts[u] == 0) continue;
      for (VertexId v : g.out_neighbours(u)) next[v] += counts[u];
    }
    counts.swap(next);
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  return total;
}

std::vector<Walk> sample_walks(const KnowledgeGraph& g, VertexId root, const WalkConfig& cfg) {
  require_entity_root(g, root);
  if (!cfg.max_walks) throw Error("sample_walks requires max_walks");
  const std::uint32_t target = *cfg.max_walks;
  if (target == 0) return {};

  Rng rng(mix_seed(cfg.seed, root));
  std::vector<Walk> out;
  std::unordered_set<Walk, WalkHash> seen;
  // enough attempts to re-find duplicates on small graphs while staying bounded
  const std::uint64_t max_attempts = std::max<std::uint64_t>(64, 8ull * target);
  for (std::uint64_t attempt = 0; attempt < max_attempts && out.size() < target; ++attempt) {
    Walk walk{root};
    for (int step = 0; step < cfg.depth; ++step) {
      auto next = g.out_neighbours(walk.back());
      if (next.empty()) break;
      walk.push_back(next[rng.index(next.size())]);
    }
    if (seen.insert(walk).second) out.push_back(std::move(walk));
  }
  return out;
}

std::vector<Walk> community_walks(const KnowledgeGraph& g, VertexId root, const WalkConfig& cfg,
                                  const CommunityPartition& partition, double sample_prob,
                                  double hop_prob) {
  require_entity_root(g, root);
  if (cfg.depth < 0) throw Error("walk depth must be non-negative");
  if (sample_prob < 0 || sample_prob > 1 || hop_prob < 0 || hop_prob > 1) {
    throw Error("community_walks probabilities must lie in [0, 1]");
  }

  Rng rng(mix_seed(cfg.seed, root));
  std::vector<Walk> finished;  // dead-ended walks, kept at maximal length
  std::vector<Walk> level{Walk{root}};
  std::unordered_set<Walk, WalkHash> level_seen;

  for (int step = 0; step < cfg.depth && !level.empty(); ++step) {
    std::vector<Walk> next;
    level_seen.clear();
    for (const Walk& walk : level) {
      auto neighbours = g.out_neighbours(walk.back());
      if (neighbours.empty()) {
        finished.push_back(walk);
        continue;
      }
      for (VertexId n : neighbours) {
        if (rng.uniform() < sample_prob) {
          Walk extended = walk;
          extended.push_back(n);
          if (level_seen.insert(extended).second) next.push_back(std::move(extended));
        }
        if (rng.uniform() < hop_prob) {
          auto members = partition.members(partition.community_of(n));
          VertexId hop = members[rng.index(members.size())];
          Walk extended = walk;
          extended.push_back(hop);
          if (level_seen.insert(extended).second) next.push_back(std::move(extended));
        }
      }
    }
    level = std::move(next);
  }

  finished.insert(finished.end(), level.begin(), level.end());
  return finished;
}

std::vector<std::string> walk_tokens(const KnowledgeGraph& g, const Walk& walk) {
  std::vector<std::string> tokens;
  tokens.reserve(walk.size());
  for (VertexId v : walk) tokens.push_back(g.vertex(v).label);
  return tokens;
}

std::vector<Walk> dedup_walks_by_tokens(const KnowledgeGraph& g, std::vector<Walk> walks) {
  std::unordered_set<std::string> seen;
  std::vector<Walk> out;
  out.reserve(walks.size());
  for (Walk& walk : walks) {
    std::string key;
    for (VertexId v : walk) {
      key += g.vertex(v).label;
      key += '\x1f';
    }
    if (seen.insert(std::move(key)).second) out.push_back(std::move(walk));
  }
  return out;
}

std::vector<std::vector<Walk>> extract_for_roots(
    const KnowledgeGraph& g, std::span<const VertexId> roots, int workers,
    const std::function<std::vector<Walk>(VertexId)>& extract_root) {
  std::vector<std::vector<Walk>> per_root(roots.size());
  parallel_for(roots.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      per_root[i] = dedup_walks_by_tokens(g, extract_root(roots[i]));
    }
  });
  return per_root;
}

WalkCorpus corpus_from_root_walks(const KnowledgeGraph& g,
                                  std::span<const std::vector<Walk>> per_root,
                                  std::string strategy, const WalkConfig& cfg) {
  WalkCorpus corpus;
  corpus.strategy = std::move(strategy);
  corpus.depth = cfg.depth;
  corpus.seed = cfg.seed;
  if (cfg.max_walks) corpus.add_parameter("max_walks", std::to_string(*cfg.max_walks));
  for (const auto& walks : per_root) {
    for (const Walk& walk : walks) {
      corpus.walks.push_back(walk_tokens(g, walk));
    }
  }
  return corpus;
}

}  // namespace kgwalk
