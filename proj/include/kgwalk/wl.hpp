#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "kgwalk/corpus.hpp"
#include "kgwalk/rdf_graph.hpp"
#include "kgwalk/walks.hpp"

namespace kgwalk {

// Iterative relabelling over in-neighbourhoods. Iteration 0 interns the
// original vertex labels; iteration k interns (label at k-1, sorted set of
// in-neighbour labels at k-1). The interning table is the hash: injective by
// construction, so equal labels imply equal keys.
class WLLabelStore {
 public:
  int iterations() const { return static_cast<int>(labels_.size()) - 1; }
  std::size_t vertex_count() const { return labels_.empty() ? 0 : labels_[0].size(); }
  std::uint32_t label(int iteration, VertexId v) const;
  std::size_t distinct(int iteration) const;

 private:
  friend WLLabelStore wl_relabel(const KnowledgeGraph&, int);
  std::vector<std::vector<std::uint32_t>> labels_;  // [iteration][vertex]
  std::vector<std::size_t> distinct_;
};

WLLabelStore wl_relabel(const KnowledgeGraph& g, int iterations);

struct WlViolation {
  int iteration;
  VertexId first;
  VertexId second;
};

// Pairs of distinct vertices sharing a label at some iteration. Checks entity
// vertices only unless all_kinds is set; with unique entity labels the result
// is empty at every iteration.
std::vector<WlViolation> check_wl_bijection(const KnowledgeGraph& g, const WLLabelStore& store,
                                            bool all_kinds = false);

// One copy of every base walk per iteration k in [0, store.iterations()]:
// the root token stays the original label (unless relabel_roots) and every
// other hop renders as wl<k>_<label>.
WalkCorpus wl_walk_corpus(const KnowledgeGraph& g, std::span<const std::vector<Walk>> per_root,
                          const WLLabelStore& store, const WalkConfig& cfg,
                          bool relabel_roots = false);

// TSV audit dump: vertex_label TAB iteration TAB wl_label.
void write_wl_labels(const KnowledgeGraph& g, const WLLabelStore& store, std::ostream& out);

}  // namespace kgwalk
