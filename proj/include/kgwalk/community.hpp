#pragma once

#include <iosfwd>
#include <span>
#include <tuple>
#include <vector>

#include "kgwalk/rdf_graph.hpp"

namespace kgwalk {

// Weighted undirected graph; parallel edges are merged with weight
// accumulation. Degrees count self-loops twice, total_weight() counts every
// merged edge (loops included) once.
class UndirectedGraph {
 public:
  UndirectedGraph(std::size_t vertex_count,
                  std::span<const std::tuple<VertexId, VertexId, double>> edges);

  // Unit-weight projection of the expanded graph's directed edges.
  static UndirectedGraph project(const KnowledgeGraph& g);

  std::size_t vertex_count() const { return adj_.size(); }
  double total_weight() const { return total_weight_; }
  double weighted_degree(VertexId v) const { return degree_[v]; }
  std::span<const std::pair<VertexId, double>> neighbours(VertexId v) const { return adj_[v]; }

 private:
  std::vector<std::vector<std::pair<VertexId, double>>> adj_;  // loops stored once
  std::vector<double> degree_;
  double total_weight_ = 0;
};

class CommunityPartition {
 public:
  CommunityPartition() = default;

  // Renumbers community ids densely in first-appearance order.
  static CommunityPartition from_assignment(std::vector<std::uint32_t> assignment,
                                            double resolution = 1.0);

  std::size_t vertex_count() const { return assignment_.size(); }
  std::size_t community_count() const { return communities_.size(); }
  std::uint32_t community_of(VertexId v) const;
  std::span<const VertexId> members(std::uint32_t community) const;
  double resolution() const { return resolution_; }

 private:
  std::vector<std::uint32_t> assignment_;
  std::vector<std::vector<VertexId>> communities_;
  double resolution_ = 1.0;
};

// Two-phase Louvain (local moving + aggregation) with seeded visiting order.
// Runs `restarts` independent passes with derived seeds and keeps the
// highest-modularity partition; the greedy single pass is order-sensitive on
// small graphs. Deterministic for a fixed seed.
CommunityPartition louvain(const UndirectedGraph& g, double resolution, std::uint64_t seed,
                           int restarts = 10);
CommunityPartition louvain(const KnowledgeGraph& g, double resolution, std::uint64_t seed,
                           int restarts = 10);

// Q = sum_c [ e_c/m - resolution * (a_c/2m)^2 ]; 0 on edgeless graphs.
double modularity(const UndirectedGraph& g, const CommunityPartition& partition,
                  double resolution);
double modularity(const KnowledgeGraph& g, const CommunityPartition& partition,
                  double resolution);

// TSV export `vertex_label TAB community_id`, one line per vertex in id order.
void write_partition(const KnowledgeGraph& g, const CommunityPartition& partition,
                     std::ostream& out);
// Reads the export back; labels must match the graph's vertices in id order.
CommunityPartition read_partition(const KnowledgeGraph& g, std::istream& in, double resolution);

}  // namespace kgwalk
