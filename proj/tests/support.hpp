#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kgwalk/community.hpp"
#include "kgwalk/rdf_graph.hpp"
#include "kgwalk/util.hpp"

namespace kgwalk::testing {

// "<iri>", "_:name", or "\"lexical\"" shorthand for building triples.
inline Resource res(std::string_view spec) {
  if (spec.starts_with("_:")) return Resource::blank(std::string(spec.substr(2)));
  if (spec.starts_with('"') && spec.ends_with('"') && spec.size() >= 2) {
    return Resource::literal(std::string(spec.substr(1, spec.size() - 2)));
  }
  return Resource::iri(std::string(spec));
}

inline Triple t(std::string_view s, std::string_view p, std::string_view o) {
  return Triple{res(s), std::string(p), res(o)};
}

inline KnowledgeGraph graph_of(const std::vector<Triple>& triples) {
  return build_graph(triples);
}

// Random triple set with unique entity labels E0..; literals and blanks mixed
// in with the given probabilities.
inline std::vector<Triple> random_triples(Rng& rng, std::size_t n_entities,
                                          std::size_t n_predicates, std::size_t n_triples,
                                          double blank_prob = 0.1, double literal_prob = 0.15) {
  std::vector<Triple> triples;
  triples.reserve(n_triples);
  std::size_t blanks = 1 + n_entities / 4;
  for (std::size_t i = 0; i < n_triples; ++i) {
    auto subject = rng.uniform() < blank_prob
                       ? Resource::blank("b" + std::to_string(rng.index(blanks)))
                       : Resource::iri("E" + std::to_string(rng.index(n_entities)));
    std::string predicate = "P" + std::to_string(rng.index(n_predicates));
    Resource object;
    double coin = rng.uniform();
    if (coin < literal_prob) {
      object = Resource::literal("lit" + std::to_string(rng.index(8)));
    } else if (coin < literal_prob + blank_prob) {
      object = Resource::blank("b" + std::to_string(rng.index(blanks)));
    } else {
      object = Resource::iri("E" + std::to_string(rng.index(n_entities)));
    }
    triples.push_back(Triple{std::move(subject), std::move(predicate), std::move(object)});
  }
  return triples;
}

// All partitions of n items as restricted-growth strings.
inline void enumerate_partitions(std::size_t n,
                                 const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
  std::vector<std::uint32_t> assignment(n, 0);
  auto recurse = [&](auto&& self, std::size_t i, std::uint32_t used) -> void {
    if (i == n) {
      fn(assignment);
      return;
    }
    for (std::uint32_t c = 0; c <= used; ++c) {
      assignment[i] = c;
      self(self, i + 1, c == used ? used + 1 : used);
    }
  };
  recurse(recurse, 0, 0);
}

// Exhaustive maximum modularity over all partitions; usable up to ~10 vertices.
inline double brute_force_best_modularity(const UndirectedGraph& g, double resolution) {
  double best = -1e300;
  enumerate_partitions(g.vertex_count(), [&](const std::vector<std::uint32_t>& assignment) {
    auto partition = CommunityPartition::from_assignment(assignment, resolution);
    best = std::max(best, modularity(g, partition, resolution));
  });
  return best;
}

}  // namespace kgwalk::testing
