#include "kgwalk/rdf_graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>
#include <unordered_set>

namespace kgwalk {

std::string_view kind_name(VertexKind kind) {
  switch (kind) {
    case VertexKind::Entity: return "entity";
    case VertexKind::BlankNode: return "blank";
    case VertexKind::Literal: return "literal";
    case VertexKind::PredicateInstance: return "predicate";
  }
  return "?";
}

VertexId KnowledgeGraph::Builder::add_vertex(std::string label, VertexKind kind) {
  VertexId id = static_cast<VertexId>(vertices_.size());
  vertices_.push_back(Vertex{id, std::move(label), kind});
  out_.emplace_back();
  in_.emplace_back();
  return id;
}

void KnowledgeGraph::Builder::add_edge(VertexId from, VertexId to) {
  if (from >= vertices_.size() || to >= vertices_.size()) {
    throw Error("Builder::add_edge: vertex id out of range");
  }
  out_[from].push_back(to);
  in_[to].push_back(from);
}

KnowledgeGraph KnowledgeGraph::Builder::build() && {
  KnowledgeGraph g;
  g.vertices_ = std::move(vertices_);
  g.out_ = std::move(out_);
  g.in_ = std::move(in_);
  for (const auto& v : g.vertices_) {
    if (v.kind == VertexKind::Entity) {
      g.entity_ids_.emplace(v.label, v.id);
    } else if (v.kind == VertexKind::BlankNode) {
      g.blank_ids_.emplace(v.label, v.id);
    }
  }
  for (const auto& nbrs : g.out_) g.edge_count_ += nbrs.size();
  return g;
}

void KnowledgeGraph::check(VertexId v) const {
  if (v >= vertices_.size()) {
    throw Error("unknown vertex id: " + std::to_string(v));
  }
}

const Vertex& KnowledgeGraph::vertex(VertexId v) const {
  check(v);
  return vertices_[v];
}

std::span<const VertexId> KnowledgeGraph::out_neighbours(VertexId v) const {
  check(v);
  return out_[v];
}

std::span<const VertexId> KnowledgeGraph::in_neighbours(VertexId v) const {
  check(v);
  return in_[v];
}

std::optional<VertexId> KnowledgeGraph::find(VertexKind kind, std::string_view label) const {
  const auto* index = kind == VertexKind::Entity     ? &entity_ids_
                      : kind == VertexKind::BlankNode ? &blank_ids_
                                                      : nullptr;
  if (!index) return std::nullopt;
  auto it = index->find(std::string(label));
  if (it == index->end()) return std::nullopt;
  return it->second;
}

std::vector<VertexId> KnowledgeGraph::vertices_of_kind(VertexKind kind) const {
  std::vector<VertexId> out;
  for (const auto& v : vertices_) {
    if (v.kind == kind) out.push_back(v.id);
  }
  return out;
}

std::size_t KnowledgeGraph::count_kind(VertexKind kind) const {
  std::size_t n = 0;
  for (const auto& v : vertices_) n += v.kind == kind;
  return n;
}

std::uint64_t KnowledgeGraph::structural_hash() const {
  std::uint64_t h = fnv1a64("kgwalk-graph");
  for (const auto& v : vertices_) {
    char kind = static_cast<char>('0' + static_cast<int>(v.kind));
    h = fnv1a64(std::string_view(&kind, 1), h);
    h = fnv1a64(v.label, h);
    h = fnv1a64("\x1f", h);
  }
  for (VertexId u = 0; u < out_.size(); ++u) {
    for (VertexId v : out_[u]) {
      std::uint64_t pair[2] = {u, v};
      h = fnv1a64(std::string_view(reinterpret_cast<const char*>(pair), sizeof(pair)), h);
    }
  }
  return h;
}

namespace {

std::string triple_key(const Triple& t) {
  std::string key;
  key += static_cast<char>('0' + static_cast<int>(t.subject.kind));
  key += t.subject.value;
  key += '\x1f';
  key += t.predicate;
  key += '\x1f';
  key += static_cast<char>('0' + static_cast<int>(t.object.kind));
  key += t.object.value;
  key += '\x1f';
  key += t.object.literal_suffix;
  return key;
}

}  // namespace

KnowledgeGraph build_graph(std::span<const Triple> triples) {
  KnowledgeGraph::Builder b;
  std::unordered_map<std::string, VertexId> entity_ids;
  std::unordered_map<std::string, VertexId> blank_ids;
  std::unordered_set<std::string> seen;

  auto shared_vertex = [&](const Resource& r) -> VertexId {
    auto& index = r.kind == Resource::Kind::Iri ? entity_ids : blank_ids;
    VertexKind kind = r.kind == Resource::Kind::Iri ? VertexKind::Entity : VertexKind::BlankNode;
    auto it = index.find(r.value);
    if (it != index.end()) return it->second;
    VertexId id = b.add_vertex(r.value, kind);
    index.emplace(r.value, id);
    return id;
  };

  for (const Triple& t : triples) {
    if (t.subject.kind == Resource::Kind::Literal) {
      throw Error("literal in subject position: " + t.subject.label());
    }
    if (!seen.insert(triple_key(t)).second) continue;  // exact duplicate triple

    VertexId subject = shared_vertex(t.subject);
    VertexId predicate = b.add_vertex(t.predicate, VertexKind::PredicateInstance);
    VertexId object = t.object.kind == Resource::Kind::Literal
                          ? b.add_vertex(t.object.label(), VertexKind::Literal)
                          : shared_vertex(t.object);
    b.add_edge(subject, predicate);
    b.add_edge(predicate, object);
  }
  return std::move(b).build();
}

namespace {

// Scanner over one N-Triples statement line.
struct LineScanner {
  std::string_view s;
  std::size_t pos = 0;
  std::size_t line_no;

  explicit LineScanner(std::string_view text, std::size_t line) : s(text), line_no(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no, what, s); }

  bool at_end() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }

  void skip_ws() {
    while (!at_end() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  void require_ws() {
    if (at_end() || (s[pos] != ' ' && s[pos] != '\t')) fail("expected whitespace");
    skip_ws();
  }

  std::string parse_iri() {
    if (at_end() || s[pos] != '<') fail("expected IRI");
    ++pos;
    std::size_t start = pos;
    while (!at_end() && s[pos] != '>') ++pos;
    if (at_end()) fail("unterminated IRI");
    std::string iri(s.substr(start, pos - start));
    ++pos;
    if (iri.empty()) fail("empty IRI");
    return iri;
  }

  std::string parse_blank_label() {
    pos += 2;  // "_:"
    std::size_t start = pos;
    while (!at_end() && s[pos] != ' ' && s[pos] != '\t') ++pos;
    if (pos == start) fail("empty blank node label");
    return std::string(s.substr(start, pos - start));
  }

  void append_codepoint(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7f) {
      out += static_cast<char>(cp);
    } else if (cp <= 0x7ff) {
      out += static_cast<char>(0xc0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp <= 0xffff) {
      out += static_cast<char>(0xe0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
      out += static_cast<char>(0xf0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    }
  }

  std::uint32_t parse_hex(std::size_t digits) {
    if (pos + digits > s.size()) fail("truncated \\u escape");
    std::uint32_t value = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = s[pos + i];
      value <<= 4;
      if (c >= '0' && c <= '9') {
        value |= static_cast<std::uint32_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        value |= static_cast<std::uint32_t>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        value |= static_cast<std::uint32_t>(c - 'A' + 10);
      } else {
        fail("bad hex digit in \\u escape");
      }
    }
    pos += digits;
    return value;
  }

  Resource parse_literal() {
    ++pos;  // opening quote
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      char c = s[pos++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (at_end()) fail("dangling escape in literal");
      char e = s[pos++];
      switch (e) {
        case 't': lexical += '\t'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case '"': lexical += '"'; break;
        case '\\': lexical += '\\'; break;
        case 'u': append_codepoint(lexical, parse_hex(4)); break;
        case 'U': append_codepoint(lexical, parse_hex(8)); break;
        default: fail(std::string("bad literal escape \\") + e);
      }
    }
    std::string suffix;
    if (!at_end() && s[pos] == '@') {
      std::size_t start = pos;
      ++pos;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '-')) ++pos;
      if (pos == start + 1) fail("empty language tag");
      suffix = std::string(s.substr(start, pos - start));
    } else if (pos + 1 < s.size() && s[pos] == '^' && s[pos + 1] == '^') {
      pos += 2;
      suffix = "^^<" + parse_iri() + ">";
    }
    return Resource::literal(std::move(lexical), std::move(suffix));
  }

  Resource parse_resource(bool subject_position) {
    if (at_end()) fail("unexpected end of statement");
    char c = peek();
    if (c == '<') return Resource::iri(parse_iri());
    if (c == '_' && pos + 1 < s.size() && s[pos + 1] == ':') {
      return Resource::blank(parse_blank_label());
    }
    if (c == '"') {
      if (subject_position) fail("literal in subject position");
      return parse_literal();
    }
    fail("expected IRI, blank node, or literal");
  }

  std::optional<Triple> parse_statement() {
    skip_ws();
    if (at_end() || peek() == '#') return std::nullopt;
    Triple t;
    t.subject = parse_resource(/*subject_position=*/true);
    require_ws();
    t.predicate = parse_iri();
    require_ws();
    t.object = parse_resource(/*subject_position=*/false);
    skip_ws();
    if (at_end() || peek() != '.') fail("expected terminating '.'");
    ++pos;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing content after '.'");
    return t;
  }
};

}  // namespace

std::vector<Triple> parse_ntriples(std::istream& in) {
  std::vector<Triple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineScanner scanner(line, line_no);
    if (auto t = scanner.parse_statement()) out.push_back(std::move(*t));
  }
  return out;
}

std::vector<Triple> parse_ntriples_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in);
}

namespace {

std::string literal_escape(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size());
  for (char c : lexical) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

void write_resource(std::string& out, const Resource& r) {
  switch (r.kind) {
    case Resource::Kind::Iri:
      out += '<';
      out += r.value;
      out += '>';
      break;
    case Resource::Kind::Blank:
      out += "_:";
      out += r.value;
      break;
    case Resource::Kind::Literal:
      out += '"';
      out += literal_escape(r.value);
      out += '"';
      out += r.literal_suffix;
      break;
  }
}

}  // namespace

std::string to_ntriples(std::span<const Triple> triples) {
  std::string out;
  for (const Triple& t : triples) {
    write_resource(out, t.subject);
    out += ' ';
    out += '<';
    out += t.predicate;
    out += '>';
    out += ' ';
    write_resource(out, t.object);
    out += " .\n";
  }
  return out;
}

std::vector<Triple> remove_leak_triples(std::vector<Triple> triples,
                                        std::span<const std::string> banned_predicates) {
  std::unordered_set<std::string_view> banned(banned_predicates.begin(), banned_predicates.end());
  std::erase_if(triples, [&](const Triple& t) { return banned.contains(t.predicate); });
  return triples;
}

std::vector<std::string> load_predicate_list(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t");
    std::string iri = line.substr(begin, end - begin + 1);
    if (iri.front() == '#') continue;
    if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>') {
      iri = iri.substr(1, iri.size() - 2);
    }
    out.push_back(std::move(iri));
  }
  return out;
}

std::vector<Triple> citation_triples(std::span<const PaperRecord> papers,
                                     const CitationSchema& schema) {
  std::vector<Triple> out;
  for (const PaperRecord& p : papers) {
    for (const auto& [word, weight] : p.word_weights) {
      if (weight > 0.0) {
        out.push_back(Triple{Resource::iri(p.id), schema.has_word_iri, Resource::iri(word)});
      }
    }
    for (const std::string& cited : p.cited) {
      out.push_back(Triple{Resource::iri(p.id), schema.cites_iri, Resource::iri(cited)});
    }
  }
  return out;
}

std::vector<PaperRecord> parse_citation_network(std::istream& in) {
  std::vector<PaperRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 TAB-separated fields", line);
    }
    PaperRecord rec;
    rec.id = fields[0];
    if (rec.id.empty()) throw ParseError(line_no, "empty paper id", line);
    if (!fields[1].empty()) {
      for (const std::string& pair : split(fields[1], ',')) {
        if (pair.empty()) continue;
        std::size_t colon = pair.rfind(':');
        if (colon == std::string::npos || colon == 0) {
          throw ParseError(line_no, "expected word:weight", pair);
        }
        double weight = 0;
        const char* first = pair.data() + colon + 1;
        const char* last = pair.data() + pair.size();
        auto [ptr, ec] = std::from_chars(first, last, weight);
        if (ec != std::errc() || ptr != last) {
          throw ParseError(line_no, "bad weight", pair);
        }
        if (weight < 0) throw ParseError(line_no, "negative weight", pair);
        rec.word_weights.emplace_back(pair.substr(0, colon), weight);
      }
    }
    if (!fields[2].empty()) {
      for (std::string& cited : split(fields[2], ',')) {
        if (!cited.empty()) rec.cited.push_back(std::move(cited));
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace kgwalk
