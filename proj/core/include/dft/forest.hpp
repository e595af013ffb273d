#pragma once

// Dynamic rooted forests stored as depth-first tours. Every vertex owns one
// open and one close parenthesis node in a ParenSeq; the tour of a tree is a
// balanced range and the whole subtree of a vertex is contiguous, which is
// what makes the child/subtree reductions cheap.
//
// The annotation set is fixed at construction through the Config type:
//   Config::Reductions  tuple of ReductionSpec<V, PlusOp, TimesOp>
//   Config::Paths       tuple of PathSpec<T, Op>, Op associative + invertible
//   Config::Lazies      tuple of LazySpec<T>, lazily updated point values
//
// Lazily tracked quantities hold a DeltaTriple per vertex: d_self relative to
// the vertex, d_up forwarded to the path towards the root, d_down forwarded
// to the subtree. The effective value is
//   d_self(v) + sum of d_up over subtree(v) + sum of d_down over path(v).
// add_to_path / add_to_subtree are O(log n); structural operations apply
// fixups so effective values never change except where documented.
//
// Single-writer: queries may rebalance the underlying splay trees, so every
// operation needs exclusive access to the forest. A forest may be moved
// between threads; handles are meaningless outside their forest.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dft/error.hpp"
#include "dft/ops.hpp"
#include "dft/parenseq.hpp"
#include "dft/summaries.hpp"

namespace dft {

template <class V, class P, class T>
struct ReductionSpec {
  using Value = V;
  using PlusOp = P;
  using TimesOp = T;
};

template <class T, class Op = Plus<T>>
struct PathSpec {
  using Value = T;
  using OpT = Op;
};

template <class T>
struct LazySpec {
  using Value = T;
};

template <class T>
struct DeltaTriple {
  T self{};
  T up{};
  T down{};
};

struct VertexId {
  uint32_t idx = kNil;
  uint32_t gen = 0;
  friend bool operator==(const VertexId&, const VertexId&) = default;
};

// Adjacency form of one rooted tree: parent[i] == -1 marks the root,
// children of a vertex are ordered by increasing index. `weight` may be
// empty (all edges weight 1) or one entry per vertex (ignored at the root).
struct RootedTree {
  std::vector<int32_t> parent;
  std::vector<double> weight;
  size_t size() const { return parent.size(); }
};

namespace detail {

template <class Spec>
struct RedAnnoOf;
template <class V, class P, class T>
struct RedAnnoOf<ReductionSpec<V, P, T>> {
  using type = ReductionAnno<V, P, T>;
};

template <class Spec>
struct PathAnnoOf;
template <class T, class Op>
struct PathAnnoOf<PathSpec<T, Op>> {
  using type = GroupAnno<T, Op>;
};

template <class Tuple>
struct SeqOf;
template <class... A>
struct SeqOf<std::tuple<A...>> {
  using type = ParenSeq<A...>;
};

template <size_t N, class F>
constexpr void for_each_index(F&& f) {
  [&]<size_t... Is>(std::index_sequence<Is...>) {
    (f(std::integral_constant<size_t, Is>{}), ...);
  }(std::make_index_sequence<N>{});
}

}  // namespace detail

template <class Config>
class Forest {
 public:
  using Reductions = typename Config::Reductions;
  using Paths = typename Config::Paths;
  using Lazies = typename Config::Lazies;

  static constexpr size_t kNumRed = std::tuple_size_v<Reductions>;
  static constexpr size_t kNumPath = std::tuple_size_v<Paths>;
  static constexpr size_t kNumLazy = std::tuple_size_v<Lazies>;

  template <size_t I>
  using RedSpec = std::tuple_element_t<I, Reductions>;
  template <size_t I>
  using RedV = typename RedSpec<I>::Value;
  template <size_t J>
  using PathSpecAt = std::tuple_element_t<J, Paths>;
  template <size_t J>
  using PathV = typename PathSpecAt<J>::Value;
  template <size_t K>
  using LazyT = typename std::tuple_element_t<K, Lazies>::Value;

  // Sequence annotation layout.
  static constexpr size_t kLca = 0;     // depth + leftmost-minimum summaries
  static constexpr size_t kWeight = 1;  // +w on open, -w on close, 0 at roots
  static constexpr size_t kCount = 2;   // unit-valued reduction: degree etc.
  static constexpr size_t kRed0 = 3;
  static constexpr size_t kPath0 = kRed0 + kNumRed;
  static constexpr size_t kLazy0 = kPath0 + kNumPath;
  template <size_t K>
  static constexpr size_t kUpSlot = kLazy0 + 2 * K;
  template <size_t K>
  static constexpr size_t kDownSlot = kLazy0 + 2 * K + 1;

 private:
  using CountAnno = ReductionAnno<int64_t, Plus<int64_t>, Plus<int64_t>>;

  template <class... Rs>
  static auto red_annos(std::tuple<Rs...>*) -> std::tuple<typename detail::RedAnnoOf<Rs>::type...>;
  template <class... Ps>
  static auto path_annos(std::tuple<Ps...>*) -> std::tuple<typename detail::PathAnnoOf<Ps>::type...>;
  template <class... Ls>
  static auto lazy_annos(std::tuple<Ls...>*) -> decltype(std::tuple_cat(
      std::declval<std::tuple<GroupAnno<typename Ls::Value>, GroupAnno<typename Ls::Value>>>()...));

  using AnnoTuple = decltype(std::tuple_cat(
      std::declval<std::tuple<LcaAnno, GroupAnno<double>, CountAnno>>(),
      std::declval<decltype(red_annos((Reductions*)nullptr))>(),
      std::declval<decltype(path_annos((Paths*)nullptr))>(),
      std::declval<decltype(lazy_annos((Lazies*)nullptr))>()));

  template <class... Rs>
  static auto red_vals(std::tuple<Rs...>*) -> std::tuple<typename Rs::Value...>;
  template <class... Ps>
  static auto path_vals(std::tuple<Ps...>*) -> std::tuple<typename Ps::Value...>;
  template <class... Ls>
  static auto lazy_states(std::tuple<Ls...>*) -> std::tuple<DeltaTriple<typename Ls::Value>...>;

  using RedVals = decltype(red_vals((Reductions*)nullptr));
  using PathVals = decltype(path_vals((Paths*)nullptr));
  using LazyStates = decltype(lazy_states((Lazies*)nullptr));

 public:
  using Seq = typename detail::SeqOf<AnnoTuple>::type;

  size_t n_vertices() const { return live_; }

  bool valid(VertexId v) const {
    return v.idx < recs_.size() && recs_[v.idx].live && recs_[v.idx].gen == v.gen;
  }

  std::vector<VertexId> live_vertices() const {
    std::vector<VertexId> out;
    out.reserve(live_);
    for (uint32_t i = 0; i < recs_.size(); ++i)
      if (recs_[i].live) out.push_back(VertexId{i, recs_[i].gen});
    return out;
  }

  VertexId create_vertex() {
    uint32_t i;
    if (!free_.empty()) {
      i = free_.back();
      free_.pop_back();
    } else {
      i = static_cast<uint32_t>(recs_.size());
      recs_.emplace_back();
    }
    Rec& r = recs_[i];
    auto [o, c] = seq_.new_pair(i);
    r.open = o;
    r.close = c;
    r.weight = 1.0;
    r.lazy = LazyStates{};
    r.live = true;
    ++live_;
    seq_.template set_elem<kCount>(o, 1);
    detail::for_each_index<kNumRed>([&](auto I) {
      std::get<I>(r.red) = RedSpec<I>::PlusOp::identity();
      seq_.template set_elem<kRed0 + I>(o, std::get<I>(r.red));
    });
    detail::for_each_index<kNumPath>([&](auto J) {
      std::get<J>(r.path) = PathSpecAt<J>::OpT::identity();
      set_path_elems<J>(i);
    });
    return VertexId{i, r.gen};
  }

  Handle open_node(VertexId v) const { return recs_[vcheck(v)].open; }
  Handle close_node(VertexId v) const { return recs_[vcheck(v)].close; }
  VertexId vertex_of(Handle h) { return id_at(seq_.payload(h)); }

  // ----- structural updates -----

  // Makes root v a child of u; v's tour lands right after open-u, so v
  // becomes u's first child in tour order.
  void link(VertexId u, VertexId v, double w = 1.0) {
    uint32_t ui = vcheck(u), vi = vcheck(v);
    if (same_tree(u, v)) raise(Errc::same_tree, "link: u and v are in the same tree");
    if (!is_root(v)) raise(Errc::not_root, "link: v is not the root of its tree");
    detail::for_each_index<kNumLazy>([&](auto K) {
      auto us = subtree_up_sum_i<K>(vi);
      auto ds = path_down_sum_i<K>(ui);
      if (us != LazyT<K>{}) add_to_path_i<K>(ui, -us);
      if (ds != LazyT<K>{}) add_to_subtree_i<K>(vi, -ds);
    });
    set_weight(vi, w);
    splice_i(vi);
    Handle ou = recs_[ui].open;
    auto rest = seq_.split_after(ou);
    seq_.merge(ou, recs_[vi].open);
    if (rest) seq_.merge(ou, *rest);
  }

  // Detaches the subtree of v into its own tree. No-op on roots.
  void cut(VertexId v) {
    uint32_t vi = vcheck(v);
    auto p = parent(v);
    if (!p) return;
    uint32_t pi = p->idx;
    detail::for_each_index<kNumLazy>([&](auto K) {
      auto us = subtree_up_sum_i<K>(vi);
      auto ds = path_down_sum_i<K>(pi);
      if (us != LazyT<K>{}) add_to_path_i<K>(pi, us);
      if (ds != LazyT<K>{}) add_to_subtree_i<K>(vi, ds);
    });
    Handle ov = recs_[vi].open, cv = recs_[vi].close;
    auto pred = seq_.predecessor(ov);
    seq_.split_after(*pred);
    auto rest = seq_.split_after(cv);
    if (rest) seq_.merge(*pred, *rest);
    clear_weight(vi);
  }

  // Deletes v; its children become children of v's parent (or roots when v
  // was a root). Pending d_down is pushed to the children and pending d_up
  // moves to the parent so every other effective value is unchanged.
  void condense(VertexId v) {
    uint32_t vi = vcheck(v);
    auto p = parent(v);
    bool need_children = !p;
    detail::for_each_index<kNumLazy>([&](auto K) {
      if (std::get<K>(recs_[vi].lazy).down != LazyT<K>{}) need_children = true;
    });
    std::vector<VertexId> kids;
    if (need_children) kids = list_children(v);
    detail::for_each_index<kNumLazy>([&](auto K) {
      if (p) {
        auto up = std::get<K>(recs_[vi].lazy).up;
        if (up != LazyT<K>{}) add_to_path_i<K>(p->idx, up);
      }
      auto dn = std::get<K>(recs_[vi].lazy).down;
      if (dn != LazyT<K>{})
        for (VertexId c : kids) add_to_subtree_i<K>(c.idx, dn);
    });
    if (!p)
      for (VertexId c : kids) clear_weight(c.idx);
    seq_.erase(recs_[vi].open);
    seq_.erase(recs_[vi].close);
    free_rec(vi);
  }

  // Deletes v and all edges adjacent to it.
  void erase(VertexId v) {
    cut(v);
    condense(v);
  }

  // Re-roots v's tree at v by cutting the root path and relinking it in
  // reverse, O(d log n) for a vertex of depth d.
  void evert(VertexId v) {
    vcheck(v);
    std::vector<VertexId> chain{v};
    std::vector<double> ws;
    VertexId z = v;
    while (auto p = parent(z)) {
      ws.push_back(edge_weight(z));
      chain.push_back(*p);
      z = *p;
    }
    if (chain.size() == 1) return;
    for (size_t i = 0; i + 1 < chain.size(); ++i) cut(chain[i]);
    for (size_t i = chain.size() - 1; i-- > 0;) link(chain[i], chain[i + 1], ws[i]);
  }

  // Linear-time eversion: materializes effective lazy values, re-roots the
  // adjacency form and rebuilds the tour in place. Produces the same tree
  // (and the same child order) as evert().
  void evert_linear(VertexId v) {
    uint32_t vi = vcheck(v);
    if (is_root(v)) return;
    splice_i(vi);
    auto tour = seq_.in_order(recs_[vi].open);
    size_t n = tour.size() / 2;
    // local relabeling in tour order
    std::vector<uint32_t> verts;
    verts.reserve(n);
    std::vector<uint32_t> local(recs_.size(), kNil);
    std::vector<int32_t> par(n, -1);
    {
      std::vector<uint32_t> stack;
      for (Handle h : tour) {
        uint32_t w = seq_.payload(h);
        if (seq_.kind(h) == Paren::open) {
          uint32_t li = static_cast<uint32_t>(verts.size());
          local[w] = li;
          verts.push_back(w);
          if (!stack.empty()) par[li] = static_cast<int32_t>(stack.back());
          stack.push_back(li);
        } else {
          stack.pop_back();
        }
      }
    }
    std::vector<std::vector<uint32_t>> kids(n);
    for (uint32_t i = 1; i < n; ++i) kids[par[i]].push_back(i);
    // effective lazy values, two passes over the adjacency
    materialize_lazies(verts, par);
    // re-root at v: reverse the parent chain, moving each edge weight to the
    // former parent, and make each former parent the first child
    uint32_t lv = local[vi];
    std::vector<double> wloc(n, 1.0);
    for (uint32_t i = 0; i < n; ++i) wloc[i] = recs_[verts[i]].weight;
    {
      std::vector<uint32_t> path;
      for (int32_t z = static_cast<int32_t>(lv); z != -1; z = par[z])
        path.push_back(static_cast<uint32_t>(z));
      for (size_t i = 0; i + 1 < path.size(); ++i) {
        uint32_t child = path[i], anc = path[i + 1];
        auto& k = kids[anc];
        k.erase(std::find(k.begin(), k.end(), child));
        kids[child].insert(kids[child].begin(), anc);
        wloc[anc] = wloc[child];
        par[anc] = static_cast<int32_t>(child);
      }
      par[lv] = -1;
      wloc[lv] = 1.0;
    }
    // emit the new tour and rebuild
    std::vector<Handle> order;
    order.reserve(2 * n);
    {
      std::vector<std::pair<uint32_t, bool>> stack{{lv, false}};
      while (!stack.empty()) {
        auto [x, closing] = stack.back();
        stack.pop_back();
        if (closing) {
          order.push_back(recs_[verts[x]].close);
          continue;
        }
        order.push_back(recs_[verts[x]].open);
        stack.push_back({x, true});
        for (size_t i = kids[x].size(); i-- > 0;) stack.push_back({kids[x][i], false});
      }
    }
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t w = verts[i];
      recs_[w].weight = par[i] == -1 ? 1.0 : wloc[i];
      double we = par[i] == -1 ? 0.0 : wloc[i];
      seq_.template poke_elem<kWeight>(recs_[w].open, we);
      seq_.template poke_elem<kWeight>(recs_[w].close, -we);
      detail::for_each_index<kNumLazy>([&](auto K) {
        seq_.template poke_elem<kUpSlot<K>>(recs_[w].open, LazyT<K>{});
        seq_.template poke_elem<kUpSlot<K>>(recs_[w].close, LazyT<K>{});
        seq_.template poke_elem<kDownSlot<K>>(recs_[w].open, LazyT<K>{});
        seq_.template poke_elem<kDownSlot<K>>(recs_[w].close, LazyT<K>{});
      });
    }
    seq_.rebuild(order);
  }

  // Internal: gives the tree containing v a dedicated sequence. The
  // represented forest is unchanged.
  void splice(VertexId v) { splice_i(vcheck(v)); }

  // ----- structural queries -----

  VertexId root(VertexId v) {
    uint32_t vi = vcheck(v);
    // The close node of the root is the leftmost minimal-depth node at or
    // after close-v; close-v itself dips immediately, so the summary's
    // minimum handle is always present.
    LcaSummary f = seq_.template fold_suffix<kLca>(recs_[vi].close);
    return id_at(seq_.payload(handle_of(f.min_node)));
  }

  bool same_tree(VertexId u, VertexId v) {
    uint32_t ui = vcheck(u), vi = vcheck(v);
    if (!seq_.same_sequence(recs_[ui].open, recs_[vi].open)) return false;
    return root(u) == root(v);
  }

  // Whether u is a descendant of v (every vertex descends from itself).
  bool is_descendant(VertexId u, VertexId v) {
    uint32_t ui = vcheck(u), vi = vcheck(v);
    return seq_.precedes(recs_[vi].open, recs_[ui].open) &&
           seq_.precedes(recs_[ui].close, recs_[vi].close);
  }

  bool is_root(VertexId v) { return depth(v) == 1; }

  std::optional<VertexId> parent(VertexId v) { return ancestor(v, 1); }

  // Ancestor k levels up; ancestor(v, 0) is v, absent past the root.
  std::optional<VertexId> ancestor(VertexId v, int64_t k) {
    uint32_t vi = vcheck(v);
    if (k < 0) raise(Errc::bad_input, "ancestor: negative level");
    if (k == 0) return v;
    auto start = seq_.successor(recs_[vi].close);
    if (!start) return std::nullopt;
    auto hit = seq_.search_prefix_depth(*start, static_cast<int32_t>(k));
    if (!hit) return std::nullopt;
    return id_at(seq_.payload(*hit));
  }

  VertexId lca(VertexId u, VertexId v) {
    if (!same_tree(u, v)) raise(Errc::different_trees, "lca: different trees");
    if (u == v) return u;
    if (is_descendant(u, v)) return v;
    if (is_descendant(v, u)) return u;
    Handle cu = recs_[u.idx].close, cv = recs_[v.idx].close;
    if (!seq_.precedes(cu, cv)) std::swap(cu, cv);
    LcaSummary f = seq_.template range_fold_unchecked<kLca>(cu, cv);
    VertexId w = id_at(seq_.payload(handle_of(f.min_node)));
    auto a = parent(w);
    assert(a);
    return *a;
  }

  // Number of vertices in the path from v to its root, so roots have depth 1.
  int64_t depth(VertexId v) {
    uint32_t vi = vcheck(v);
    return seq_.template fold_prefix<kLca>(recs_[vi].open).s.final_depth();
  }

  double weighted_depth(VertexId v) {
    uint32_t vi = vcheck(v);
    return seq_.template fold_prefix<kWeight>(recs_[vi].open);
  }

  int64_t degree(VertexId v) {
    auto f = child_interval_fold<kCount>(vcheck(v));
    return f ? f->rc.body : 0;
  }

  std::vector<VertexId> list_children(VertexId v) {
    uint32_t vi = vcheck(v);
    std::vector<VertexId> out;
    Handle close = recs_[vi].close;
    auto cur = seq_.successor(recs_[vi].open);
    while (*cur != close) {
      out.push_back(id_at(seq_.payload(*cur)));
      cur = seq_.successor(seq_.twin(*cur));
    }
    return out;
  }

  int64_t subtree_size(VertexId v) {
    uint32_t vi = vcheck(v);
    return static_cast<int64_t>(seq_.range_count(recs_[vi].open, recs_[vi].close)) / 2;
  }

  int64_t hop_distance(VertexId u, VertexId v) {
    VertexId l = lca(u, v);
    return depth(u) + depth(v) - 2 * depth(l);
  }

  double distance(VertexId u, VertexId v) {
    VertexId l = lca(u, v);
    return weighted_depth(u) + weighted_depth(v) - 2 * weighted_depth(l);
  }

  // Weight of the edge from v to its parent; 1 by convention at roots.
  double edge_weight(VertexId v) { return recs_[vcheck(v)].weight; }

  // ----- value reductions -----

  template <size_t I>
  RedV<I> reduction_value(VertexId v) const {
    return std::get<I>(recs_[vcheck(v)].red);
  }

  template <size_t I>
  void set_reduction_value(VertexId v, RedV<I> x) {
    uint32_t vi = vcheck(v);
    std::get<I>(recs_[vi].red) = x;
    seq_.template set_elem<kRed0 + I>(recs_[vi].open, x);
  }

  // PlusOp-fold of the values of v's children; identity for leaves.
  template <size_t I>
  RedV<I> reduce_children(VertexId v) {
    auto f = child_interval_fold<kRed0 + I>(vcheck(v));
    return f ? f->rc.body : RedSpec<I>::PlusOp::identity();
  }

  // TimesOp-fold of the per-child-subtree PlusOp-folds; identity for leaves.
  template <size_t I>
  RedV<I> reduce_child_subtrees(VertexId v) {
    auto f = child_interval_fold<kRed0 + I>(vcheck(v));
    return f ? f->rcs.body_times : RedSpec<I>::TimesOp::identity();
  }

  // val(v) combined with reduce_child_subtrees: subtree sum for (+,+),
  // subtree max for (max,max).
  template <size_t I>
  RedV<I> subtree_reduce(VertexId v) {
    return RedSpec<I>::PlusOp::combine(reduction_value<I>(v), reduce_child_subtrees<I>(v));
  }

  // ----- path aggregation -----

  template <size_t J>
  PathV<J> path_value(VertexId v) const {
    return std::get<J>(recs_[vcheck(v)].path);
  }

  template <size_t J>
  void set_path_value(VertexId v, PathV<J> x) {
    uint32_t vi = vcheck(v);
    std::get<J>(recs_[vi].path) = x;
    set_path_elems<J>(vi);
  }

  // Op-fold of the values on the path from the root down to v.
  template <size_t J>
  PathV<J> combine(VertexId v) {
    uint32_t vi = vcheck(v);
    return seq_.template fold_prefix<kPath0 + J>(recs_[vi].open);
  }

  // ----- lazily tracked quantities -----

  template <size_t K>
  LazyT<K> lazy_self(VertexId v) const {
    return std::get<K>(recs_[vcheck(v)].lazy).self;
  }
  template <size_t K>
  LazyT<K> lazy_up(VertexId v) const {
    return std::get<K>(recs_[vcheck(v)].lazy).up;
  }
  template <size_t K>
  LazyT<K> lazy_down(VertexId v) const {
    return std::get<K>(recs_[vcheck(v)].lazy).down;
  }

  template <size_t K>
  void increment_val(VertexId v, LazyT<K> d) {
    std::get<K>(recs_[vcheck(v)].lazy).self += d;
  }

  // Adds d to the effective value of every vertex on the path v -> root.
  template <size_t K>
  void add_to_path(VertexId v, LazyT<K> d) {
    add_to_path_i<K>(vcheck(v), d);
  }

  // Adds d to the effective value of every vertex in v's subtree.
  template <size_t K>
  void add_to_subtree(VertexId v, LazyT<K> d) {
    add_to_subtree_i<K>(vcheck(v), d);
  }

  template <size_t K>
  LazyT<K> subtree_up_sum(VertexId v) {
    return subtree_up_sum_i<K>(vcheck(v));
  }

  template <size_t K>
  LazyT<K> path_down_sum(VertexId v) {
    return path_down_sum_i<K>(vcheck(v));
  }

  template <size_t K>
  LazyT<K> get_effective_val(VertexId v) {
    uint32_t vi = vcheck(v);
    return std::get<K>(recs_[vi].lazy).self + subtree_up_sum_i<K>(vi) + path_down_sum_i<K>(vi);
  }

  template <size_t K>
  void change_val(VertexId v, LazyT<K> x) {
    increment_val<K>(v, x - get_effective_val<K>(v));
  }

  // ----- import / export -----

  std::vector<VertexId> import_tree(const RootedTree& t) {
    size_t n = t.size();
    if (n == 0) raise(Errc::bad_input, "import_tree: empty tree");
    if (!t.weight.empty() && t.weight.size() != n)
      raise(Errc::bad_input, "import_tree: weight size mismatch");
    int32_t root = -1;
    std::vector<std::vector<uint32_t>> kids(n);
    for (size_t i = 0; i < n; ++i) {
      int32_t p = t.parent[i];
      if (p == -1) {
        if (root != -1) raise(Errc::bad_input, "import_tree: multiple roots");
        root = static_cast<int32_t>(i);
      } else if (p < 0 || static_cast<size_t>(p) >= n || static_cast<size_t>(p) == i) {
        raise(Errc::bad_input, "import_tree: parent out of range");
      } else {
        kids[p].push_back(static_cast<uint32_t>(i));
      }
    }
    if (root == -1) raise(Errc::bad_input, "import_tree: no root (cycle)");
    std::vector<VertexId> ids(n);
    for (size_t i = 0; i < n; ++i) ids[i] = create_vertex();
    std::vector<Handle> order;
    order.reserve(2 * n);
    size_t visited = 0;
    {
      std::vector<std::pair<uint32_t, bool>> stack{{static_cast<uint32_t>(root), false}};
      while (!stack.empty()) {
        auto [x, closing] = stack.back();
        stack.pop_back();
        if (closing) {
          order.push_back(recs_[ids[x].idx].close);
          continue;
        }
        ++visited;
        order.push_back(recs_[ids[x].idx].open);
        stack.push_back({x, true});
        for (size_t i = kids[x].size(); i-- > 0;) stack.push_back({kids[x][i], false});
      }
    }
    if (visited != n) raise(Errc::bad_input, "import_tree: disconnected or cyclic input");
    for (size_t i = 0; i < n; ++i) {
      if (static_cast<int32_t>(i) == root) continue;
      double w = t.weight.empty() ? 1.0 : t.weight[i];
      uint32_t vi = ids[i].idx;
      recs_[vi].weight = w;
      seq_.template poke_elem<kWeight>(recs_[vi].open, w);
      seq_.template poke_elem<kWeight>(recs_[vi].close, -w);
    }
    seq_.rebuild(order);
    return ids;
  }

  struct Exported {
    RootedTree tree;
    std::vector<VertexId> ids;  // exported index -> vertex
  };

  // Flattens the tree containing v; exported indices follow tour order, so
  // import_tree(export_tree(v).tree) rebuilds an identically shaped tree.
  Exported export_tree(VertexId v) {
    uint32_t vi = vcheck(v);
    splice_i(vi);
    auto tour = seq_.in_order(recs_[vi].open);
    Exported out;
    size_t n = tour.size() / 2;
    out.tree.parent.reserve(n);
    out.tree.weight.reserve(n);
    out.ids.reserve(n);
    std::vector<int32_t> stack;
    for (Handle h : tour) {
      if (seq_.kind(h) == Paren::open) {
        int32_t me = static_cast<int32_t>(out.ids.size());
        uint32_t w = seq_.payload(h);
        out.ids.push_back(id_at(w));
        out.tree.parent.push_back(stack.empty() ? -1 : stack.back());
        out.tree.weight.push_back(stack.empty() ? 1.0 : recs_[w].weight);
        stack.push_back(me);
      } else {
        stack.pop_back();
      }
    }
    return out;
  }

  // ----- verification -----

  // Full structural and annotation audit; throws on the first violation.
  // Intended for debug verification: integer (+,+) reductions are re-summed
  // with overflow checking.
  void audit() {
    seq_.audit();
    size_t seen_nodes = 0;
    std::vector<char> visited(recs_.size(), 0);
    for (uint32_t i = 0; i < recs_.size(); ++i) {
      if (!recs_[i].live) continue;
      if (visited[i]) continue;
      auto tour = seq_.in_order(recs_[i].open);
      seen_nodes += tour.size();
      audit_sequence(tour, visited);
    }
    if (seen_nodes != 2 * live_) raise(Errc::bad_input, "audit: tour length != 2 * live vertices");
  }

 private:
  struct Rec {
    Handle open, close;
    double weight = 1.0;
    RedVals red{};
    PathVals path{};
    LazyStates lazy{};
    uint32_t gen = 0;
    bool live = false;
  };

  Seq seq_;
  std::vector<Rec> recs_;
  std::vector<uint32_t> free_;
  size_t live_ = 0;

  uint32_t vcheck(VertexId v) const {
    if (!valid(v)) raise(Errc::unknown_vertex, "unknown or deleted vertex");
    return v.idx;
  }

  VertexId id_at(uint32_t idx) const { return VertexId{idx, recs_[idx].gen}; }

  Handle handle_of(uint32_t node_idx) { return seq_.handle_by_index(node_idx); }

  void free_rec(uint32_t i) {
    recs_[i].live = false;
    recs_[i].gen++;
    free_.push_back(i);
    --live_;
  }

  template <size_t J>
  void set_path_elems(uint32_t vi) {
    auto x = std::get<J>(recs_[vi].path);
    seq_.template set_elem<kPath0 + J>(recs_[vi].open, x);
    seq_.template set_elem<kPath0 + J>(recs_[vi].close, PathSpecAt<J>::OpT::invert(x));
  }

  void set_weight(uint32_t vi, double w) {
    recs_[vi].weight = w;
    seq_.template set_elem<kWeight>(recs_[vi].open, w);
    seq_.template set_elem<kWeight>(recs_[vi].close, -w);
  }

  void clear_weight(uint32_t vi) {
    recs_[vi].weight = 1.0;
    seq_.template set_elem<kWeight>(recs_[vi].open, 0.0);
    seq_.template set_elem<kWeight>(recs_[vi].close, 0.0);
  }

  void splice_i(uint32_t vi) {
    VertexId r = root(id_at(vi));
    Handle orr = recs_[r.idx].open, crr = recs_[r.idx].close;
    auto pred = seq_.predecessor(orr);
    if (pred) seq_.split_after(*pred);
    seq_.split_after(crr);
  }

  template <size_t K>
  void add_to_path_i(uint32_t vi, LazyT<K> d) {
    auto& st = std::get<K>(recs_[vi].lazy);
    st.up += d;
    seq_.template set_elem<kUpSlot<K>>(recs_[vi].open, st.up);
  }

  template <size_t K>
  void add_to_subtree_i(uint32_t vi, LazyT<K> d) {
    auto& st = std::get<K>(recs_[vi].lazy);
    st.down += d;
    seq_.template set_elem<kDownSlot<K>>(recs_[vi].open, st.down);
    seq_.template set_elem<kDownSlot<K>>(recs_[vi].close, -st.down);
  }

  template <size_t K>
  LazyT<K> subtree_up_sum_i(uint32_t vi) {
    return seq_.template range_fold_unchecked<kUpSlot<K>>(recs_[vi].open, recs_[vi].close);
  }

  template <size_t K>
  LazyT<K> path_down_sum_i(uint32_t vi) {
    return seq_.template fold_prefix<kDownSlot<K>>(recs_[vi].open);
  }

  // Fold over the open interval (open-v, close-v): the concatenated tours of
  // v's children. nullopt for leaves.
  template <size_t Slot>
  std::optional<typename Seq::template FoldAt<Slot>> child_interval_fold(uint32_t vi) {
    Handle o = recs_[vi].open, c = recs_[vi].close;
    auto s = seq_.successor(o);
    if (*s == c) return std::nullopt;
    auto e = seq_.predecessor(c);
    return seq_.template range_fold_unchecked<Slot>(*s, *e);
  }

  // Folds every pending d_up / d_down into d_self for the vertices of one
  // tree given in tour order (so parents carry smaller indices).
  void materialize_lazies(const std::vector<uint32_t>& verts, const std::vector<int32_t>& par) {
    size_t n = verts.size();
    detail::for_each_index<kNumLazy>([&](auto K) {
      std::vector<LazyT<K>> upsum(n);
      for (size_t i = n; i-- > 0;) {
        upsum[i] += std::get<K>(recs_[verts[i]].lazy).up;
        if (par[i] != -1) upsum[par[i]] += upsum[i];
      }
      std::vector<LazyT<K>> downpre(n);
      for (size_t i = 0; i < n; ++i) {
        downpre[i] = std::get<K>(recs_[verts[i]].lazy).down;
        if (par[i] != -1) downpre[i] += downpre[par[i]];
      }
      for (size_t i = 0; i < n; ++i) {
        auto& st = std::get<K>(recs_[verts[i]].lazy);
        st = {st.self + upsum[i] + downpre[i], LazyT<K>{}, LazyT<K>{}};
      }
    });
  }

  void audit_sequence(const std::vector<Handle>& tour, std::vector<char>& visited) {
    struct Frame {
      uint32_t vert;
      int32_t depth;
    };
    std::vector<Frame> stack;
    int32_t dep = 0;
    for (Handle h : tour) {
      uint32_t w = seq_.payload(h);
      const Rec& r = recs_[w];
      if (!r.live) raise(Errc::bad_input, "audit: tour references dead vertex");
      if (seq_.kind(h) == Paren::open) {
        if (visited[w]) raise(Errc::bad_input, "audit: vertex opened twice");
        visited[w] = 1;
        if (!(h == r.open)) raise(Errc::bad_input, "audit: open handle mismatch");
        if (!(seq_.twin(h) == r.close)) raise(Errc::bad_input, "audit: twin mismatch");
        ++dep;
        stack.push_back({w, dep});
        audit_vertex_elems(w, dep == 1);
      } else {
        if (stack.empty() || stack.back().vert != w)
          raise(Errc::bad_input, "audit: close does not match innermost open");
        --dep;
        stack.pop_back();
      }
    }
    if (!stack.empty() || dep != 0) raise(Errc::bad_input, "audit: unbalanced tour");
    audit_checked_sums(tour);
  }

  void audit_vertex_elems(uint32_t w, bool root) {
    const Rec& r = recs_[w];
    if (seq_.template elem<kCount>(r.open) != 1) raise(Errc::bad_input, "audit: count elem != 1");
    double we = seq_.template elem<kWeight>(r.open);
    double wc = seq_.template elem<kWeight>(r.close);
    if (root) {
      if (we != 0.0 || wc != 0.0) raise(Errc::bad_input, "audit: root weight elems not zero");
    } else {
      if (we != r.weight || wc != -r.weight) raise(Errc::bad_input, "audit: weight elem mismatch");
    }
    detail::for_each_index<kNumRed>([&](auto I) {
      if (!(seq_.template elem<kRed0 + I>(r.open) == std::get<I>(r.red)))
        raise(Errc::bad_input, "audit: reduction elem mismatch");
    });
    detail::for_each_index<kNumPath>([&](auto J) {
      using Op = typename PathSpecAt<J>::OpT;
      if (!(seq_.template elem<kPath0 + J>(r.open) == std::get<J>(r.path)) ||
          !(seq_.template elem<kPath0 + J>(r.close) == Op::invert(std::get<J>(r.path))))
        raise(Errc::bad_input, "audit: path elem mismatch");
    });
    detail::for_each_index<kNumLazy>([&](auto K) {
      const auto& st = std::get<K>(r.lazy);
      if (seq_.template elem<kUpSlot<K>>(r.open) != st.up ||
          seq_.template elem<kUpSlot<K>>(r.close) != LazyT<K>{} ||
          seq_.template elem<kDownSlot<K>>(r.open) != st.down ||
          seq_.template elem<kDownSlot<K>>(r.close) != -st.down)
        raise(Errc::bad_input, "audit: lazy elem mismatch");
    });
  }

  // Overflow-checked subtree sums for int64 (+,+) reductions.
  void audit_checked_sums(const std::vector<Handle>& tour) {
    detail::for_each_index<kNumRed>([&](auto I) {
      if constexpr (std::is_same_v<RedV<I>, int64_t> &&
                    std::is_same_v<typename RedSpec<I>::PlusOp, Plus<int64_t>>) {
        std::vector<int64_t> acc;
        for (Handle h : tour) {
          if (seq_.kind(h) == Paren::open) {
            acc.push_back(std::get<I>(recs_[seq_.payload(h)].red));
          } else {
            int64_t s = acc.back();
            acc.pop_back();
            if (!acc.empty() && __builtin_add_overflow(acc.back(), s, &acc.back()))
              raise(Errc::overflow, "audit: int64 subtree sum overflow");
          }
        }
      }
    });
  }
};

}  // namespace dft
