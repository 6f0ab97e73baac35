#include "kgwalk/community.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>

namespace kgwalk {

UndirectedGraph::UndirectedGraph(std::size_t vertex_count,
                                 std::span<const std::tuple<VertexId, VertexId, double>> edges) {
  adj_.resize(vertex_count);
  degree_.assign(vertex_count, 0.0);

  std::vector<std::tuple<VertexId, VertexId, double>> canon;
  canon.reserve(edges.size());
  for (auto [a, b, w] : edges) {
    if (a >= vertex_count || b >= vertex_count) throw Error("undirected edge out of range");
    if (a > b) std::swap(a, b);
    canon.emplace_back(a, b, w);
  }
  std::sort(canon.begin(), canon.end(),
            [](const auto& x, const auto& y) {
              return std::tie(std::get<0>(x), std::get<1>(x)) <
                     std::tie(std::get<0>(y), std::get<1>(y));
            });

  for (std::size_t i = 0; i < canon.size();) {
    auto [a, b, w] = canon[i];
    std::size_t j = i + 1;
    while (j < canon.size() && std::get<0>(canon[j]) == a && std::get<1>(canon[j]) == b) {
      w += std::get<2>(canon[j]);
      ++j;
    }
    i = j;
    total_weight_ += w;
    if (a == b) {
      adj_[a].emplace_back(a, w);
      degree_[a] += 2 * w;
    } else {
      adj_[a].emplace_back(b, w);
      adj_[b].emplace_back(a, w);
      degree_[a] += w;
      degree_[b] += w;
    }
  }
}

UndirectedGraph UndirectedGraph::project(const KnowledgeGraph& g) {
  std::vector<std::tuple<VertexId, VertexId, double>> edges;
  edges.reserve(g.edge_count());
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (VertexId v : g.out_neighbours(u)) {
      edges.emplace_back(u, v, 1.0);
    }
  }
  return UndirectedGraph(g.vertex_count(), edges);
}

CommunityPartition CommunityPartition::from_assignment(std::vector<std::uint32_t> assignment,
                                                       double resolution) {
  CommunityPartition p;
  p.resolution_ = resolution;
  std::vector<std::uint32_t> renumber;
  constexpr std::uint32_t kUnset = 0xffffffffu;
  p.assignment_.resize(assignment.size());
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    std::uint32_t raw = assignment[v];
    if (raw >= renumber.size()) renumber.resize(raw + 1, kUnset);
    if (renumber[raw] == kUnset) {
      renumber[raw] = static_cast<std::uint32_t>(p.communities_.size());
      p.communities_.emplace_back();
    }
    p.assignment_[v] = renumber[raw];
    p.communities_[renumber[raw]].push_back(static_cast<VertexId>(v));
  }
  return p;
}

std::uint32_t CommunityPartition::community_of(VertexId v) const {
  if (v >= assignment_.size()) {
    throw Error("partition does not cover vertex " + std::to_string(v));
  }
  return assignment_[v];
}

std::span<const VertexId> CommunityPartition::members(std::uint32_t community) const {
  if (community >= communities_.size()) {
    throw Error("unknown community " + std::to_string(community));
  }
  return communities_[community];
}

namespace {

// One local-moving phase; returns the (raw) assignment and whether any vertex
// moved. Gain comparisons use k_i,in - resolution * k_i * sum_tot / 2m, the
// shared constant factor 1/m dropped.
struct LocalMoveResult {
  std::vector<std::uint32_t> assignment;
  bool moved = false;
};

LocalMoveResult local_moving(const UndirectedGraph& g, double resolution, Rng& rng) {
  const std::size_t n = g.vertex_count();
  LocalMoveResult result;
  result.assignment.resize(n);
  std::iota(result.assignment.begin(), result.assignment.end(), 0u);
  const double m = g.total_weight();
  if (m <= 0.0) return result;  // edgeless: singletons are optimal

  std::vector<double> sum_tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) sum_tot[v] = g.weighted_degree(static_cast<VertexId>(v));

  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  // scratch: weight from the current vertex to each community
  std::vector<double> comm_weight(n, 0.0);
  std::vector<std::uint32_t> touched;

  bool improved = true;
  while (improved) {
    improved = false;
    for (VertexId v : order) {
      const std::uint32_t old_comm = result.assignment[v];
      const double k_v = g.weighted_degree(v);

      touched.clear();
      for (const auto& [u, w] : g.neighbours(v)) {
        if (u == static_cast<VertexId>(v)) continue;  // self-loop moves with v
        std::uint32_t c = result.assignment[u];
        if (comm_weight[c] == 0.0) touched.push_back(c);
        comm_weight[c] += w;
      }

      sum_tot[old_comm] -= k_v;

      // Candidates in deterministic order: the current community first, then
      // neighbour communities in adjacency scan order; strictly better wins.
      double best_gain = comm_weight[old_comm] - resolution * k_v * sum_tot[old_comm] / (2.0 * m);
      std::uint32_t best_comm = old_comm;
      for (std::uint32_t c : touched) {
        if (c == old_comm) continue;
        double gain = comm_weight[c] - resolution * k_v * sum_tot[c] / (2.0 * m);
        if (gain > best_gain) {
          best_gain = gain;
          best_comm = c;
        }
      }

      sum_tot[best_comm] += k_v;
      result.assignment[v] = best_comm;
      if (best_comm != old_comm) {
        improved = true;
        result.moved = true;
      }
      for (std::uint32_t c : touched) comm_weight[c] = 0.0;
    }
  }
  return result;
}

std::vector<std::uint32_t> renumber_dense(const std::vector<std::uint32_t>& raw,
                                          std::size_t& community_count) {
  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> map(raw.size(), kUnset);
  std::vector<std::uint32_t> out(raw.size());
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (map[raw[v]] == kUnset) map[raw[v]] = next++;
    out[v] = map[raw[v]];
  }
  community_count = next;
  return out;
}

UndirectedGraph aggregate(const UndirectedGraph& g, const std::vector<std::uint32_t>& comm,
                          std::size_t community_count) {
  std::vector<std::tuple<VertexId, VertexId, double>> edges;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (const auto& [v, w] : g.neighbours(u)) {
      if (v < u) continue;  // each merged edge visited once; loops appear once already
      edges.emplace_back(comm[u], comm[v], w);
    }
  }
  return UndirectedGraph(community_count, edges);
}

}  // namespace

namespace {

CommunityPartition louvain_once(const UndirectedGraph& g, double resolution, std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  std::vector<std::uint32_t> vertex_to_comm(g.vertex_count());
  std::iota(vertex_to_comm.begin(), vertex_to_comm.end(), 0u);

  UndirectedGraph level = g;
  bool first = true;
  while (true) {
    LocalMoveResult result = local_moving(level, resolution, rng);
    if (!result.moved && !first) break;
    std::size_t community_count = 0;
    std::vector<std::uint32_t> dense = renumber_dense(result.assignment, community_count);
    for (auto& c : vertex_to_comm) c = dense[c];
    if (!result.moved || community_count == level.vertex_count()) break;
    level = aggregate(level, dense, community_count);
    first = false;
  }
  return CommunityPartition::from_assignment(std::move(vertex_to_comm), resolution);
}

}  // namespace

CommunityPartition louvain(const UndirectedGraph& g, double resolution, std::uint64_t seed,
                           int restarts) {
  if (g.vertex_count() == 0) throw Error("louvain: empty graph");
  if (resolution <= 0) throw Error("louvain: resolution must be positive");
  restarts = std::max(1, restarts);

  CommunityPartition best;
  double best_q = -1e300;
  for (int r = 0; r < restarts; ++r) {
    CommunityPartition candidate = louvain_once(g, resolution, mix_seed(seed, r));
    double q = modularity(g, candidate, resolution);
    if (q > best_q) {
      best_q = q;
      best = std::move(candidate);
    }
  }
  return best;
}

CommunityPartition louvain(const KnowledgeGraph& g, double resolution, std::uint64_t seed,
                           int restarts) {
  if (g.vertex_count() == 0) throw Error("louvain: empty graph");
  return louvain(UndirectedGraph::project(g), resolution, seed, restarts);
}

double modularity(const UndirectedGraph& g, const CommunityPartition& partition,
                  double resolution) {
  if (partition.vertex_count() != g.vertex_count()) {
    throw Error("modularity: partition does not cover all vertices");
  }
  const double m = g.total_weight();
  if (m <= 0.0) return 0.0;

  std::vector<double> intra(partition.community_count(), 0.0);
  std::vector<double> degree(partition.community_count(), 0.0);
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    degree[partition.community_of(u)] += g.weighted_degree(u);
    for (const auto& [v, w] : g.neighbours(u)) {
      if (v < u) continue;
      if (partition.community_of(u) == partition.community_of(v)) {
        intra[partition.community_of(u)] += w;
      }
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < intra.size(); ++c) {
    double a = degree[c] / (2.0 * m);
    q += intra[c] / m - resolution * a * a;
  }
  return q;
}

double modularity(const KnowledgeGraph& g, const CommunityPartition& partition,
                  double resolution) {
  return modularity(UndirectedGraph::project(g), partition, resolution);
}

void write_partition(const KnowledgeGraph& g, const CommunityPartition& partition,
                     std::ostream& out) {
  if (partition.vertex_count() != g.vertex_count()) {
    throw Error("partition does not cover all vertices");
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    out << escape_token(g.vertex(v).label) << '\t' << partition.community_of(v) << '\n';
  }
}

CommunityPartition read_partition(const KnowledgeGraph& g, std::istream& in, double resolution) {
  std::vector<std::uint32_t> assignment;
  assignment.reserve(g.vertex_count());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected label TAB community", line);
    VertexId v = static_cast<VertexId>(assignment.size());
    if (v >= g.vertex_count()) throw ParseError(line_no, "more lines than vertices", line);
    if (unescape_token(line.substr(0, tab)) != g.vertex(v).label) {
      throw ParseError(line_no, "label does not match vertex " + std::to_string(v), line);
    }
    std::uint32_t comm = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, comm);
    if (ec != std::errc() || ptr != last) throw ParseError(line_no, "bad community id", line);
    assignment.push_back(comm);
  }
  if (assignment.size() != g.vertex_count()) {
    throw Error("partition file covers " + std::to_string(assignment.size()) + " of " +
                std::to_string(g.vertex_count()) + " vertices");
  }
  return CommunityPartition::from_assignment(std::move(assignment), resolution);
}

}  // namespace kgwalk
