#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kgwalk/community.hpp"
#include "kgwalk/corpus.hpp"
#include "kgwalk/rdf_graph.hpp"

namespace kgwalk {

// Root-anchored vertex-id sequence; consecutive vertices are joined by an
// out-edge except across a community teleport hop.
using Walk = std::vector<VertexId>;

// depth counts edge traversals in the expanded graph, so a depth-d walk holds
// d+1 vertices (root, predicate, entity, ...).
struct WalkConfig {
  int depth = 4;
  std::optional<std::uint32_t> max_walks;  // per-root cap used by sample_walks
  std::uint64_t seed = 0;
};

// Every walk of exactly cfg.depth edges, in depth-first prefix order; walks
// that dead-end earlier are kept at their maximal length.
std::vector<Walk> extract_exhaustive(const KnowledgeGraph& g, VertexId root,
                                     const WalkConfig& cfg);

// Number of directed paths of length exactly `depth` from root, computed by
// level-by-level multiplicity summation (never by enumeration).
std::uint64_t count_walks_oracle(const KnowledgeGraph& g, VertexId root, int depth);

// Up to cfg.max_walks distinct walks from independent uniform random descents,
// seeded per (cfg.seed, root).
std::vector<Walk> sample_walks(const KnowledgeGraph& g, VertexId root, const WalkConfig& cfg);

// Level-wise expansion where each out-neighbour n of the walk's last vertex is
// appended with probability sample_prob, and with probability hop_prob a
// uniformly chosen member of n's community is appended instead/additionally.
// sample_prob=1, hop_prob=0 degenerates to extract_exhaustive.
std::vector<Walk> community_walks(const KnowledgeGraph& g, VertexId root, const WalkConfig& cfg,
                                  const CommunityPartition& partition, double sample_prob,
                                  double hop_prob);

std::vector<std::string> walk_tokens(const KnowledgeGraph& g, const Walk& walk);

// Removes walks that render to a token sequence already seen, keeping the
// first representative. Distinct predicate instances share labels, so
// id-distinct walks may collide as tokens.
std::vector<Walk> dedup_walks_by_tokens(const KnowledgeGraph& g, std::vector<Walk> walks);

// Runs extract_root over every root (parallel across roots; results in root
// order) and dedups each root's walks by token sequence.
std::vector<std::vector<Walk>> extract_for_roots(
    const KnowledgeGraph& g, std::span<const VertexId> roots, int workers,
    const std::function<std::vector<Walk>(VertexId)>& extract_root);

WalkCorpus corpus_from_root_walks(const KnowledgeGraph& g,
                                  std::span<const std::vector<Walk>> per_root,
                                  std::string strategy, const WalkConfig& cfg);

}  // namespace kgwalk
