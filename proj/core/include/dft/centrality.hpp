#pragma once

// Betweenness and closeness centrality for vertices of an evolving weighted
// forest.
//
// Betweenness folds (1,1) values with the size/square pair algebra: with
// (S, Q) = reduce_child_subtrees(v) and A the number of vertices above v,
// the number of unordered pairs whose unique path strictly contains v is
// A*S + (S^2 - Q) / 2. Endpoint pairs (s = v or t = v) are excluded.
//
// Closeness is the reciprocal of farness, the sum of distances from a vertex
// to every other vertex of its tree. down-dists (distance sum into the own
// subtree) is a lazily tracked quantity kept pointwise exact across
// cc_link / cc_cut / cc_condense / cc_evert; the structural wrappers add the
// constant part of each update through add_to_path and walk the root path
// once for the distance-scaled remainder, so an update costs O(d log n) for
// a path of depth d. up-dists (distance sum to the rest of the tree) is
// evaluated on demand from subtree sizes and edge weights:
//   farness(x) = down(root) + sum over proper path vertices z of
//                w(z) * (n - 2 * size(z))
// which keeps farness exact (no drift) for arbitrary update sequences.
//
// When closeness tracking is enabled the cc_* wrappers must be the only
// mutation path; CentralityForest enforces that by never exposing the raw
// forest mutations.

#include <cassert>
#include <cstdint>
#include <optional>
#include <vector>

#include "dft/forest.hpp"
#include "dft/ops.hpp"

namespace dft {

// The update/query algebra over any forest that registers a SizeSquare
// reduction (slot IPair) and a double lazy quantity for down-dists (KDown).
template <class F, size_t IPair, size_t KDown>
class ClosenessTracker {
 public:
  explicit ClosenessTracker(F& f) : f_(f) {}

  // Registers a freshly created vertex with the (1,1) pair value.
  void init_vertex(VertexId v) { f_.template set_reduction_value<IPair>(v, SizeSquare{1, 1}); }

  void cc_link(VertexId u, VertexId v, double w = 1.0) {
    if (f_.same_tree(u, v)) raise(Errc::same_tree, "cc_link: u and v are in the same tree");
    if (!f_.is_root(v)) raise(Errc::not_root, "cc_link: v is not the root of its tree");
    double sv = static_cast<double>(f_.subtree_size(v));
    double dv = down_dists(v);
    f_.template add_to_path<KDown>(u, w * sv + dv);
    VertexId z = u;
    double dist = 0;
    while (auto p = f_.parent(z)) {
      dist += f_.edge_weight(z);
      z = *p;
      f_.template increment_val<KDown>(z, sv * dist);
    }
    f_.link(u, v, w);
  }

  void cc_cut(VertexId v) {
    auto p = f_.parent(v);
    if (!p) return;
    double w = f_.edge_weight(v);
    double sv = static_cast<double>(f_.subtree_size(v));
    double dv = down_dists(v);
    f_.template add_to_path<KDown>(*p, -(w * sv + dv));
    VertexId z = *p;
    double dist = 0;
    while (auto q = f_.parent(z)) {
      dist += f_.edge_weight(z);
      z = *q;
      f_.template increment_val<KDown>(z, -sv * dist);
    }
    f_.cut(v);
  }

  void cc_condense(VertexId v) {
    auto p = f_.parent(v);
    if (p) {
      double w = f_.edge_weight(v);
      double sv = static_cast<double>(f_.subtree_size(v));
      // ancestors z lose d(z, v) for the removed vertex and w for each of
      // the s_v - 1 promoted ones: a constant w * s_v plus d(z, parent)
      f_.template add_to_path<KDown>(*p, -w * sv);
      VertexId z = *p;
      double dist = 0;
      while (auto q = f_.parent(z)) {
        dist += f_.edge_weight(z);
        z = *q;
        f_.template increment_val<KDown>(z, -dist);
      }
    }
    f_.condense(v);
  }

  void cc_evert(VertexId v) {
    std::vector<VertexId> chain{v};
    std::vector<double> ws;
    VertexId z = v;
    while (auto p = f_.parent(z)) {
      ws.push_back(f_.edge_weight(z));
      chain.push_back(*p);
      z = *p;
    }
    if (chain.size() == 1) return;
    for (size_t i = 0; i + 1 < chain.size(); ++i) cc_cut(chain[i]);
    for (size_t i = chain.size() - 1; i-- > 0;) cc_link(chain[i], chain[i + 1], ws[i]);
  }

  void cc_erase(VertexId v) {
    cc_cut(v);
    cc_condense(v);
  }

  // Unordered pairs (s, t), s != t != v, whose path passes through v.
  int64_t betweenness(VertexId v) {
    SizeSquare f = f_.template reduce_child_subtrees<IPair>(v);
    int64_t above = f_.subtree_size(f_.root(v)) - f_.subtree_size(v);
    assert((f.s * f.s - f.q) % 2 == 0);
    return above * f.s + (f.s * f.s - f.q) / 2;
  }

  double down_dists(VertexId v) { return f_.template get_effective_val<KDown>(v); }

  double up_dists(VertexId v) { return farness(v) - down_dists(v); }

  double farness(VertexId v) {
    VertexId r = f_.root(v);
    double n = static_cast<double>(f_.subtree_size(r));
    double acc = down_dists(r);
    VertexId z = v;
    while (!(z == r)) {
      acc += f_.edge_weight(z) * (n - 2 * static_cast<double>(f_.subtree_size(z)));
      z = *f_.parent(z);
    }
    return acc;
  }

  double closeness(VertexId v) {
    double f = farness(v);
    if (f == 0) raise(Errc::undefined_value, "closeness: isolated vertex has farness 0");
    return 1.0 / f;
  }

 private:
  F& f_;
};

struct CentralityConfig {
  using Reductions = std::tuple<ReductionSpec<SizeSquare, SizeSquareMerge, SizeSquareAdd>>;
  using Paths = std::tuple<>;
  using Lazies = std::tuple<LazySpec<double>>;
};

// Standalone centrality-tracked forest. All mutations go through the cc_*
// wrappers; the underlying forest is not exposed for writing.
class CentralityForest {
 public:
  using F = Forest<CentralityConfig>;

  VertexId add_vertex() {
    VertexId v = forest_.create_vertex();
    tracker_.init_vertex(v);
    return v;
  }

  void cc_link(VertexId u, VertexId v, double w = 1.0) { tracker_.cc_link(u, v, w); }
  void cc_cut(VertexId v) { tracker_.cc_cut(v); }
  void cc_condense(VertexId v) { tracker_.cc_condense(v); }
  void cc_evert(VertexId v) { tracker_.cc_evert(v); }
  void cc_erase(VertexId v) { tracker_.cc_erase(v); }

  int64_t betweenness(VertexId v) { return tracker_.betweenness(v); }
  double farness(VertexId v) { return tracker_.farness(v); }
  double closeness(VertexId v) { return tracker_.closeness(v); }
  double up_dists(VertexId v) { return tracker_.up_dists(v); }
  double down_dists(VertexId v) { return tracker_.down_dists(v); }

  // read-only structure
  size_t n_vertices() const { return forest_.n_vertices(); }
  VertexId root(VertexId v) { return forest_.root(v); }
  std::optional<VertexId> parent(VertexId v) { return forest_.parent(v); }
  bool same_tree(VertexId u, VertexId v) { return forest_.same_tree(u, v); }
  int64_t subtree_size(VertexId v) { return forest_.subtree_size(v); }
  int64_t depth(VertexId v) { return forest_.depth(v); }
  double distance(VertexId u, VertexId v) { return forest_.distance(u, v); }
  double edge_weight(VertexId v) { return forest_.edge_weight(v); }
  std::vector<VertexId> live_vertices() const { return forest_.live_vertices(); }
  void audit() { forest_.audit(); }

 private:
  F forest_;
  ClosenessTracker<F, 0, 0> tracker_{forest_};
};

}  // namespace dft
