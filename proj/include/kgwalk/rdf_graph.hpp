#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgwalk/util.hpp"

namespace kgwalk {

using VertexId = std::uint32_t;

enum class VertexKind : std::uint8_t { Entity, BlankNode, Literal, PredicateInstance };

std::string_view kind_name(VertexKind kind);

// Subject or object of a triple, before graph expansion.
struct Resource {
  enum class Kind : std::uint8_t { Iri, Blank, Literal };

  Kind kind = Kind::Iri;
  std::string value;           // IRI, blank-node id, or unescaped lexical form
  std::string literal_suffix;  // "@lang" or "^^<iri>"; literals only

  static Resource iri(std::string v) { return {Kind::Iri, std::move(v), {}}; }
  static Resource blank(std::string v) { return {Kind::Blank, std::move(v), {}}; }
  static Resource literal(std::string lexical, std::string suffix = {}) {
    return {Kind::Literal, std::move(lexical), std::move(suffix)};
  }

  // The labelling-function value: lexical form with any suffix folded in.
  std::string label() const { return value + literal_suffix; }

  friend bool operator==(const Resource&, const Resource&) = default;
};

struct Triple {
  Resource subject;  // never a literal
  std::string predicate;
  Resource object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct Vertex {
  VertexId id = 0;
  std::string label;
  VertexKind kind = VertexKind::Entity;
};

// Triple-expanded directed graph: subject -> predicate instance -> object.
// Entities and blank nodes are shared by label; every triple owns a fresh
// predicate-instance vertex and literal objects own a fresh vertex per
// occurrence, so a literal always has in-degree 1 and out-degree 0.
// Adjacency keeps insertion order. Immutable once built; concurrent reads are
// safe.
class KnowledgeGraph {
 public:
  // Unchecked assembly, used by tests and generators; build_graph() is the
  // checked path from triples.
  class Builder {
   public:
    VertexId add_vertex(std::string label, VertexKind kind);
    void add_edge(VertexId from, VertexId to);
    KnowledgeGraph build() &&;

   private:
    std::vector<Vertex> vertices_;
    std::vector<std::vector<VertexId>> out_;
    std::vector<std::vector<VertexId>> in_;
  };

  KnowledgeGraph() = default;

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const Vertex& vertex(VertexId v) const;
  std::span<const VertexId> out_neighbours(VertexId v) const;
  std::span<const VertexId> in_neighbours(VertexId v) const;

  // Lookup for the deduplicated kinds (Entity, BlankNode).
  std::optional<VertexId> find(VertexKind kind, std::string_view label) const;

  std::vector<VertexId> vertices_of_kind(VertexKind kind) const;
  std::vector<VertexId> entities() const { return vertices_of_kind(VertexKind::Entity); }
  std::size_t count_kind(VertexKind kind) const;

  std::uint64_t structural_hash() const;

 private:
  void check(VertexId v) const;

  std::vector<Vertex> vertices_;
  std::vector<std::vector<VertexId>> out_;
  std::vector<std::vector<VertexId>> in_;
  std::unordered_map<std::string, VertexId> entity_ids_;
  std::unordered_map<std::string, VertexId> blank_ids_;
  std::size_t edge_count_ = 0;
};

// Expands triples per the per-triple rule; exact duplicate triples are
// collapsed first.
KnowledgeGraph build_graph(std::span<const Triple> triples);

// Line-based N-Triples subset: IRIs in <>, blank nodes _:name, literals with
// optional @lang / ^^<datatype> suffix. Comments (#) and blank lines skipped.
std::vector<Triple> parse_ntriples(std::istream& in);
std::vector<Triple> parse_ntriples_text(std::string_view text);
std::string to_ntriples(std::span<const Triple> triples);

// Keeps triples whose predicate is not banned; order preserved.
std::vector<Triple> remove_leak_triples(std::vector<Triple> triples,
                                        std::span<const std::string> banned_predicates);
std::vector<std::string> load_predicate_list(std::istream& in);

// Citation-network record: id, word weights, cited ids.
struct PaperRecord {
  std::string id;
  std::vector<std::pair<std::string, double>> word_weights;
  std::vector<std::string> cited;
};

struct CitationSchema {
  std::string has_word_iri = "hasWord";
  std::string cites_iri = "cites";
};

// (p, hasWord, w) for every strictly positive weight, (p, cites, p') per
// citation.
std::vector<Triple> citation_triples(std::span<const PaperRecord> papers,
                                     const CitationSchema& schema = {});

// One record per line: paper id TAB word:weight,... TAB cited,cited,...
std::vector<PaperRecord> parse_citation_network(std::istream& in);

}  // namespace kgwalk
