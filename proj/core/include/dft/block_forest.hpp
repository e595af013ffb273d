#pragma once

// Incremental biconnectivity over a streaming undirected graph, maintained as
// a Westbrook-Tarjan block forest inside a dynamic forest. Square vertices
// are the graph vertices (value 1), round vertices are blocks (value 0);
// every tree edge joins a square to a round and the square neighbors of a
// round are exactly the members of one biconnected component.
//
// Edge insertions only; deletions are rejected as not supported.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dft/forest.hpp"

namespace dft {

struct BlockForestConfig {
  using Reductions = std::tuple<ReductionSpec<int64_t, Plus<int64_t>, Plus<int64_t>>,
                                ReductionSpec<int64_t, Plus<int64_t>, Max<int64_t>>>;
  using Paths = std::tuple<>;
  using Lazies = std::tuple<>;
};

class BlockForest {
 public:
  using F = Forest<BlockForestConfig>;
  static constexpr size_t kSqSum = 0;  // square count: component/piece sizes
  static constexpr size_t kSqMax = 1;  // square count with max over children

  void add_vertex(uint64_t id) {
    if (squares_.count(id)) raise(Errc::duplicate_vertex, "add_vertex: id already present");
    VertexId v = forest_.create_vertex();
    forest_.set_reduction_value<kSqSum>(v, 1);
    forest_.set_reduction_value<kSqMax>(v, 1);
    squares_.emplace(id, v);
    ids_.emplace(v.idx, id);
  }

  bool has_vertex(uint64_t id) const { return squares_.count(id) != 0; }
  size_t n_graph_vertices() const { return squares_.size(); }

  void insert_edge(uint64_t ua, uint64_t va) {
    if (ua == va) raise(Errc::self_loop, "insert_edge: self loop");
    VertexId u = sq(ua), v = sq(va);
    if (!forest_.same_tree(u, v)) {
      // New bridge block {u, v}. Evert the smaller tree so the whole
      // insertion amortizes, then hang it below v through a fresh round.
      if (component_size_of(u) > component_size_of(v)) std::swap(u, v);
      forest_.evert(u);
      VertexId b = forest_.create_vertex();
      forest_.link(b, u);
      forest_.link(v, b);
      return;
    }
    if (forest_.hop_distance(u, v) == 2) return;  // already share a block
    condense_path(u, v);
  }

  void remove_edge(uint64_t, uint64_t) {
    raise(Errc::not_supported, "remove_edge: deletions are not supported");
  }

  bool connected(uint64_t ua, uint64_t va) { return forest_.same_tree(sq(ua), sq(va)); }

  int64_t component_size(uint64_t ua) { return component_size_of(sq(ua)); }

  // A square is an articulation point iff it touches two or more rounds.
  bool is_articulation(uint64_t ua) {
    VertexId u = sq(ua);
    int64_t rounds = forest_.degree(u) + (forest_.is_root(u) ? 0 : 1);
    return rounds >= 2;
  }

  bool is_bridge(uint64_t ua, uint64_t va) {
    if (ua == va) return false;
    VertexId u = sq(ua), v = sq(va);
    if (!forest_.same_tree(u, v)) return false;
    if (forest_.hop_distance(u, v) != 2) return false;
    VertexId l = forest_.lca(u, v);
    VertexId b = l == u ? *forest_.parent(v) : (l == v ? *forest_.parent(u) : l);
    int64_t members = forest_.degree(b) + (forest_.is_root(b) ? 0 : 1);
    return members == 2;
  }

  // Number of vertices disconnected from the largest surviving piece when
  // the articulation point u is removed; 0 for non-articulation vertices.
  int64_t impact(uint64_t ua) {
    VertexId u = sq(ua);
    int64_t rounds = forest_.degree(u) + (forest_.is_root(u) ? 0 : 1);
    if (rounds < 2) return 0;
    int64_t n = component_size_of(u);
    int64_t above = n - forest_.subtree_reduce<kSqSum>(u);
    int64_t below = forest_.reduce_child_subtrees<kSqMax>(u);
    return n - 1 - std::max(above, below);
  }

  // Vertex sets of the biconnected components, one per live round.
  std::vector<std::vector<uint64_t>> blocks() {
    std::vector<std::vector<uint64_t>> out;
    for (VertexId v : forest_.live_vertices()) {
      if (forest_.reduction_value<kSqSum>(v) != 0) continue;  // square
      std::vector<uint64_t> members;
      if (auto p = forest_.parent(v)) members.push_back(ids_.at(p->idx));
      for (VertexId c : forest_.list_children(v)) members.push_back(ids_.at(c.idx));
      out.push_back(std::move(members));
    }
    return out;
  }

  // Bipartiteness, value tagging and the underlying forest annotations.
  void audit() {
    forest_.audit();
    for (VertexId v : forest_.live_vertices()) {
      bool square = ids_.count(v.idx) != 0;
      int64_t tag = forest_.reduction_value<kSqSum>(v);
      if (tag != (square ? 1 : 0) || forest_.reduction_value<kSqMax>(v) != tag)
        raise(Errc::bad_input, "block audit: value tag mismatch");
      auto p = forest_.parent(v);
      if (square) {
        if (p && forest_.reduction_value<kSqSum>(*p) != 0)
          raise(Errc::bad_input, "block audit: square under square");
      } else {
        if (!p) raise(Errc::bad_input, "block audit: round at a tree root");
        if (forest_.reduction_value<kSqSum>(*p) != 1)
          raise(Errc::bad_input, "block audit: round under round");
      }
    }
  }

 private:
  F forest_;
  std::unordered_map<uint64_t, VertexId> squares_;
  std::unordered_map<uint32_t, uint64_t> ids_;  // square rec index -> graph id

  VertexId sq(uint64_t id) const {
    auto it = squares_.find(id);
    if (it == squares_.end()) raise(Errc::unknown_vertex, "unknown graph vertex");
    return it->second;
  }

  int64_t component_size_of(VertexId u) {
    return forest_.subtree_reduce<kSqSum>(forest_.root(u));
  }

  // Merges every block on the tree path u..v into the round nearest the
  // root (ties broken toward u's side). Each removed round is first cut and
  // relinked below the survivor so that its children end up as the
  // survivor's children after the condense.
  void condense_path(VertexId u, VertexId v) {
    VertexId a = forest_.lca(u, v);
    std::vector<VertexId> rounds;
    auto walk = [&](VertexId from) {
      VertexId z = from;
      while (!(z == a)) {
        if (!ids_.count(z.idx)) rounds.push_back(z);
        z = *forest_.parent(z);
      }
    };
    walk(u);
    walk(v);
    if (!ids_.count(a.idx)) rounds.push_back(a);
    VertexId survivor = rounds[0];
    int64_t best = forest_.depth(rounds[0]);
    // u-side rounds come first, so on equal depth the u-side one survives
    for (size_t i = 1; i < rounds.size(); ++i) {
      int64_t d = forest_.depth(rounds[i]);
      if (d < best) {
        best = d;
        survivor = rounds[i];
      }
    }
    for (VertexId b : rounds) {
      if (b == survivor) continue;
      forest_.cut(b);
      forest_.link(survivor, b);
      forest_.condense(b);
    }
  }
};

}  // namespace dft
