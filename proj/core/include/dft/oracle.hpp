#pragma once

// Slow, obviously-correct reference implementations used by property tests
// and differential drivers. None of this shares code with the fast path:
// every answer is produced by direct traversal of plain adjacency
// structures, or by scanning a flattened parenthesis sequence.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dft/error.hpp"
#include "dft/summaries.hpp"

namespace dft::oracle {

enum class Op { plus, max };

int64_t op_identity(Op o);
int64_t op_apply(Op o, int64_t a, int64_t b);

// ----- parenthesis sequence oracles -----

struct SeqItem {
  bool open = true;
  int64_t val = 0;
};

DepthSummary depth_summary_of(const std::vector<SeqItem>& items);
// index of the leftmost item whose depth equals the summary down-value,
// or -1 when every depth is strictly positive
int32_t leftmost_min_index(const std::vector<SeqItem>& items);
RcSummary<int64_t> rc_summary_of(const std::vector<SeqItem>& items, Op oplus);
RcsSummary<int64_t> rcs_summary_of(const std::vector<SeqItem>& items, Op oplus, Op otimes);
// leftmost index i >= start such that the range [start, i] dips to -k, or -1
int32_t search_prefix_depth(const std::vector<SeqItem>& items, size_t start, int32_t k);

// ----- rooted forest oracle -----

// Vertices are dense ints. A vertex carries a base value (feeding all
// aggregate queries) and an effective value (the point-read value moved by
// add_to_path / add_to_subtree); set_value assigns both.
class NaiveForest {
 public:
  int create_vertex(int64_t value = 0);

  void link(int u, int v, double w = 1.0);  // v becomes u's first child
  void cut(int v);
  void condense(int v);
  void erase(int v);
  void evert(int v);

  void set_value(int v, int64_t x);
  void add_to_path(int v, int64_t d);
  void add_to_subtree(int v, int64_t d);
  int64_t effective_value(int v) const;
  int64_t base_value(int v) const;
  double edge_weight(int v) const;

  bool alive(int v) const;
  size_t n_vertices() const { return live_; }
  std::vector<int> live() const;

  std::optional<int> parent(int v) const;
  int root(int v) const;
  int64_t depth(int v) const;
  bool same_tree(int u, int v) const;
  bool is_descendant(int u, int v) const;  // u descendant of v
  int lca(int u, int v) const;
  std::optional<int> ancestor(int v, int64_t k) const;
  int64_t degree(int v) const;
  std::vector<int> children(int v) const;
  int64_t subtree_size(int v) const;

  int64_t reduce_children(int v, Op oplus) const;
  int64_t reduce_child_subtrees(int v, Op oplus, Op otimes) const;
  int64_t subtree_sum(int v) const;
  int64_t subtree_max(int v) const;
  int64_t maxsum_child(int v) const;
  int64_t children_sum(int v) const;
  int64_t children_max(int v) const;
  int64_t combine_sum(int v) const;  // base values along root -> v

  double weighted_depth(int v) const;
  double distance(int u, int v) const;
  int64_t hop_distance(int u, int v) const;

  int64_t betweenness(int v) const;  // all-pairs path enumeration
  double farness(int v) const;       // per-source traversal
  // batched versions over the whole tree containing v
  std::map<int, int64_t> betweenness_all(int v) const;
  std::map<int, double> farness_all(int v) const;

 private:
  struct V {
    bool live = false;
    int parent = -1;
    std::vector<int> kids;
    double weight = 1.0;
    int64_t base = 0;
    int64_t eff = 0;
  };
  std::vector<V> vs_;
  size_t live_ = 0;

  int check(int v) const;
  void collect_subtree(int v, std::vector<int>& out) const;
  int64_t sigma(int v, Op oplus) const;
  std::vector<int> tree_vertices(int v) const;
};

// ----- streaming graph oracle -----

class NaiveGraph {
 public:
  void add_vertex(uint64_t id);
  void add_edge(uint64_t u, uint64_t v);
  bool has_vertex(uint64_t id) const;
  bool has_edge(uint64_t u, uint64_t v) const;

  bool connected(uint64_t u, uint64_t v) const;
  int64_t component_size(uint64_t u) const;

  // one lowpoint pass over the whole graph
  std::set<uint64_t> articulation_points() const;
  std::set<std::pair<uint64_t, uint64_t>> bridges() const;
  std::vector<std::set<uint64_t>> blocks() const;
  std::map<uint64_t, int64_t> impacts() const;

  bool is_articulation(uint64_t u) const;
  bool is_bridge(uint64_t u, uint64_t v) const;
  int64_t impact(uint64_t u) const;  // from impacts()

  // removal + component count, the definitional check
  int64_t impact_remove_and_count(uint64_t u) const;

 private:
  std::map<uint64_t, std::set<uint64_t>> adj_;

  struct LowpointData {
    std::set<uint64_t> articulations;
    std::set<std::pair<uint64_t, uint64_t>> bridges;
    std::vector<std::set<uint64_t>> blocks;
    std::map<uint64_t, int64_t> impacts;
  };
  LowpointData lowpoint() const;
  const std::set<uint64_t>& neighbors(uint64_t u) const;
};

}  // namespace dft::oracle
