#pragma once

// Ordered sequences of parenthesis nodes kept in self-adjusting (splay)
// binary trees. Every node carries one element value per registered
// annotation and every splay subtree caches the monoid fold of its range,
// refreshed in constant time per rotation. Handles are stable across
// restructuring and die only on erase; a freed slot bumps its generation
// counter so stale handles are detected rather than dereferenced.
//
// One splay tree may hold the tours of several represented trees
// (a "non-dedicated" sequence); callers that need a dedicated sequence
// split one off themselves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dft/error.hpp"
#include "dft/summaries.hpp"

namespace dft {

inline constexpr uint32_t kNil = 0xffffffffu;

enum class Paren : uint8_t { open = 0, close = 1 };

struct Handle {
  uint32_t idx = kNil;
  uint32_t gen = 0;
  friend bool operator==(const Handle&, const Handle&) = default;
};

// Annotation policies. Each one supplies an element type stored per node,
// a fold type cached per splay subtree, and the monoid structure on folds.

struct LcaAnno {
  struct Elem {
    friend bool operator==(const Elem&, const Elem&) = default;
  };
  using Fold = LcaSummary;
  static Fold identity() { return {}; }
  static Fold lift(const Elem&, Paren kind, uint32_t self) {
    if (kind == Paren::open) return {{0, 1}, kNoNode};
    return {{-1, 0}, self};
  }
  static Fold concat(const Fold& a, const Fold& b) { return dft::concat(a, b); }
};

// Plain group fold of per-node elements. The caller decides what the two
// elements of a vertex hold (value and inverse for path aggregates, value and
// zero for subtree sums).
template <class T, class Op = Plus<T>>
struct GroupAnno {
  using Elem = T;
  using Fold = T;
  static Fold identity() { return Op::identity(); }
  static Fold lift(const Elem& e, Paren, uint32_t) { return e; }
  static Fold concat(const Fold& a, const Fold& b) { return Op::combine(a, b); }
};

// rc- and rcs-summaries over one value type, sharing the element slot.
// Only open nodes carry the value; close nodes lift to the close summaries.
template <class V, class P, class T>
struct ReductionAnno {
  using Elem = V;
  struct Fold {
    RcSummary<V> rc;
    RcsSummary<V> rcs;
    friend bool operator==(const Fold&, const Fold&) = default;
  };
  static Fold identity() { return {rc_identity<V, P>(), rcs_identity<V, P, T>()}; }
  static Fold lift(const Elem& e, Paren kind, uint32_t) {
    if (kind == Paren::open) return {rc_open<V, P>(e), rcs_open<V, P, T>(e)};
    return {rc_close<V, P>(), rcs_close<V, P, T>()};
  }
  static Fold concat(const Fold& a, const Fold& b) {
    return {concat_rc<V, P>(a.rc, b.rc), concat_rcs<V, P, T>(a.rcs, b.rcs)};
  }
};

template <class... Annos>
class ParenSeq {
 public:
  static_assert(sizeof...(Annos) >= 1);
  using ElemTuple = std::tuple<typename Annos::Elem...>;
  using FoldTuple = std::tuple<typename Annos::Fold...>;
  template <size_t I>
  using AnnoAt = std::tuple_element_t<I, std::tuple<Annos...>>;
  template <size_t I>
  using FoldAt = typename AnnoAt<I>::Fold;
  template <size_t I>
  using ElemAt = typename AnnoAt<I>::Elem;

  size_t node_count() const { return live_; }

  bool valid(Handle h) const {
    return h.idx < nodes_.size() && nodes_[h.idx].live && nodes_[h.idx].gen == h.gen;
  }

  Paren kind(Handle h) const { return nodes_[check(h)].kind; }
  uint32_t payload(Handle h) const { return nodes_[check(h)].payload; }
  Handle twin(Handle h) const { return handle_at(nodes_[check(h)].twin); }

  // Creates a fresh two-node sequence "( )" for one represented vertex.
  std::pair<Handle, Handle> new_pair(uint32_t payload) {
    uint32_t o = alloc(Paren::open, payload);
    uint32_t c = alloc(Paren::close, payload);
    nodes_[o].twin = c;
    nodes_[c].twin = o;
    nodes_[o].right = c;
    nodes_[c].parent = o;
    recalc(c);
    recalc(o);
    return {handle_at(o), handle_at(c)};
  }

  template <size_t I>
  const ElemAt<I>& elem(Handle h) const {
    return std::get<I>(nodes_[check(h)].elems);
  }

  template <size_t I>
  void set_elem(Handle h, const ElemAt<I>& e) {
    uint32_t x = check(h);
    splay(x);
    std::get<I>(nodes_[x].elems) = e;
    recalc(x);
  }

  // Writes an element without refreshing any folds. Only valid when followed
  // by rebuild() over the node's whole sequence.
  template <size_t I>
  void poke_elem(Handle h, const ElemAt<I>& e) {
    std::get<I>(nodes_[check(h)].elems) = e;
  }

  // Handle of a live node known by index (e.g. taken from an LcaSummary).
  Handle handle_by_index(uint32_t idx) const {
    if (idx >= nodes_.size() || !nodes_[idx].live)
      raise(Errc::stale_handle, "handle_by_index: dead node");
    return handle_at(idx);
  }

  std::optional<Handle> successor(Handle h) {
    uint32_t x = check(h);
    splay(x);
    uint32_t r = nodes_[x].right;
    if (r == kNil) return std::nullopt;
    while (nodes_[r].left != kNil) r = nodes_[r].left;
    splay(r);
    return handle_at(r);
  }

  std::optional<Handle> predecessor(Handle h) {
    uint32_t x = check(h);
    splay(x);
    uint32_t l = nodes_[x].left;
    if (l == kNil) return std::nullopt;
    while (nodes_[l].right != kNil) l = nodes_[l].right;
    splay(l);
    return handle_at(l);
  }

  Handle seq_first(Handle h) {
    uint32_t x = check(h);
    splay(x);
    while (nodes_[x].left != kNil) x = nodes_[x].left;
    splay(x);
    return handle_at(x);
  }

  Handle seq_last(Handle h) {
    uint32_t x = check(h);
    splay(x);
    while (nodes_[x].right != kNil) x = nodes_[x].right;
    splay(x);
    return handle_at(x);
  }

  // The sequence containing h, identified by its current splay root. The
  // returned handle is only a membership witness; any later operation may
  // rebalance and change which node is the root.
  Handle representative(Handle h) {
    uint32_t x = check(h);
    splay(x);
    return handle_at(x);
  }

  bool same_sequence(Handle a, Handle b) {
    uint32_t x = check(a), y = check(b);
    if (x == y) return true;
    splay(x);
    splay(y);
    return nodes_[x].parent != kNil;
  }

  // 1-based position of h in its sequence.
  size_t rank(Handle h) {
    uint32_t x = check(h);
    splay(x);
    return count(nodes_[x].left) + 1;
  }

  size_t seq_size(Handle h) {
    uint32_t x = check(h);
    splay(x);
    return nodes_[x].count;
  }

  bool precedes(Handle a, Handle b) {
    if (!same_sequence(a, b)) return false;
    size_t ra = rank(a);
    return ra <= rank(b);
  }

  // Splits the sequence containing h into [.., h] and the rest. Returns a
  // handle into the detached right piece, if any.
  std::optional<Handle> split_after(Handle h) {
    uint32_t x = check(h);
    splay(x);
    uint32_t r = nodes_[x].right;
    if (r == kNil) return std::nullopt;
    nodes_[x].right = kNil;
    nodes_[r].parent = kNil;
    recalc(x);
    return handle_at(r);
  }

  std::optional<Handle> split_before(Handle h) {
    uint32_t x = check(h);
    splay(x);
    uint32_t l = nodes_[x].left;
    if (l == kNil) return std::nullopt;
    nodes_[x].left = kNil;
    nodes_[l].parent = kNil;
    recalc(x);
    return handle_at(l);
  }

  // Joins the sequences containing a and b, a's first. No-op when they
  // already share a sequence.
  void merge(Handle a, Handle b) {
    uint32_t x = check(a), y = check(b);
    if (x == y) return;
    splay(x);
    splay(y);
    if (nodes_[x].parent != kNil) return;  // same sequence
    while (nodes_[x].right != kNil) x = nodes_[x].right;
    splay(x);
    nodes_[x].right = y;
    nodes_[y].parent = x;
    recalc(x);
  }

  void erase(Handle h) {
    uint32_t x = check(h);
    splay(x);
    uint32_t l = nodes_[x].left, r = nodes_[x].right;
    if (l != kNil) nodes_[l].parent = kNil;
    if (r != kNil) nodes_[r].parent = kNil;
    nodes_[x].left = nodes_[x].right = kNil;
    if (l != kNil && r != kNil) {
      uint32_t m = l;
      while (nodes_[m].right != kNil) m = nodes_[m].right;
      splay(m);
      nodes_[m].right = r;
      nodes_[r].parent = m;
      recalc(m);
    }
    free_node(x);
  }

  // Fold over [first(h) .. h].
  template <size_t I>
  FoldAt<I> fold_prefix(Handle h) {
    uint32_t x = check(h);
    splay(x);
    FoldAt<I> f = fold_of<I>(nodes_[x].left);
    return AnnoAt<I>::concat(f, lift<I>(x));
  }

  // Fold over [h .. last(h)].
  template <size_t I>
  FoldAt<I> fold_suffix(Handle h) {
    uint32_t x = check(h);
    splay(x);
    return AnnoAt<I>::concat(lift<I>(x), fold_of<I>(nodes_[x].right));
  }

  // Fold over [a .. b]; a must not come after b. The sequence is unchanged as
  // observed by every other operation.
  template <size_t I>
  FoldAt<I> range_fold(Handle a, Handle b) {
    if (!same_sequence(a, b)) raise(Errc::different_sequences, "range_fold: different sequences");
    if (rank(a) > rank(b)) raise(Errc::bad_input, "range_fold: a comes after b");
    return range_fold_unchecked<I>(a, b);
  }

  template <size_t I>
  FoldAt<I> range_fold_unchecked(Handle a, Handle b) {
    if (a == b) return lift<I>(check(a));
    auto pre = predecessor(a);
    auto post = successor(b);
    if (pre) split_after(*pre);
    if (post) split_before(*post);
    uint32_t x = check(a);
    splay(x);
    FoldAt<I> f = std::get<I>(nodes_[x].folds);
    if (pre) merge(*pre, a);
    if (post) merge(a, *post);
    return f;
  }

  size_t range_count(Handle a, Handle b) {
    size_t ra = rank(a), rb = rank(b);
    if (ra > rb) raise(Errc::bad_input, "range_count: a comes after b");
    return rb - ra + 1;
  }

  // Leftmost node n at or after `start` such that the depth summary of
  // [start .. n] has down-value <= -k. Annotation 0 must be LcaAnno.
  std::optional<Handle> search_prefix_depth(Handle start, int32_t k) {
    static_assert(std::is_same_v<AnnoAt<0>, LcaAnno>);
    if (k < 1) raise(Errc::bad_input, "search_prefix_depth: k must be >= 1");
    uint32_t x = check(start);
    splay(x);
    DepthSummary acc = lift<0>(x).s;
    if (acc.down <= -k) return handle_at(x);
    uint32_t cur = nodes_[x].right;
    uint32_t last = x;
    while (cur != kNil) {
      last = cur;
      uint32_t l = nodes_[cur].left;
      if (l != kNil) {
        DepthSummary withl = dft::concat(acc, std::get<0>(nodes_[l].folds).s);
        if (withl.down <= -k) {
          cur = l;
          continue;
        }
        acc = withl;
      }
      DepthSummary withe = dft::concat(acc, lift<0>(cur).s);
      if (withe.down <= -k) {
        splay(cur);
        return handle_at(cur);
      }
      acc = withe;
      cur = nodes_[cur].right;
    }
    splay(last);
    return std::nullopt;
  }

  // Live node handles in no particular order.
  std::vector<Handle> live_handles() const {
    std::vector<Handle> out;
    out.reserve(live_);
    for (uint32_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].live) out.push_back(Handle{i, nodes_[i].gen});
    return out;
  }

  // Recomputes every cached fold bottom-up and compares with the stored
  // values; checks tree pointers and counts. Throws on any mismatch.
  void audit() const {
    std::vector<char> seen(nodes_.size(), 0);
    for (uint32_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].live) continue;
      if (nodes_[i].parent != kNil) continue;
      audit_subtree(i, seen);
    }
    for (uint32_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].live && !seen[i]) raise(Errc::bad_input, "audit: node unreachable from any root");
  }

  // In-order node handles of the sequence containing h (no rebalancing).
  std::vector<Handle> in_order(Handle h) const {
    uint32_t x = check(h);
    while (nodes_[x].parent != kNil) x = nodes_[x].parent;
    std::vector<Handle> out;
    out.reserve(nodes_[x].count);
    // iterative in-order
    std::vector<std::pair<uint32_t, bool>> stack;
    stack.push_back({x, false});
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (n == kNil) continue;
      if (expanded) {
        out.push_back(handle_at(n));
      } else {
        stack.push_back({nodes_[n].right, false});
        stack.push_back({n, true});
        stack.push_back({nodes_[n].left, false});
      }
    }
    return out;
  }

  // Rebuilds the splay tree over `order` as a perfectly balanced tree,
  // detaching the nodes from whatever sequences they were in. All handles
  // stay valid. Used by linear-time import and bulk rebuilds; the caller
  // must pass every node of the affected sequences exactly once.
  void rebuild(const std::vector<Handle>& order) {
    std::vector<uint32_t> idx(order.size());
    for (size_t i = 0; i < order.size(); ++i) idx[i] = check(order[i]);
    for (uint32_t x : idx) {
      nodes_[x].parent = kNil;
      nodes_[x].left = kNil;
      nodes_[x].right = kNil;
    }
    if (!idx.empty()) build_balanced(idx, 0, idx.size());
  }

 private:
  struct Node {
    uint32_t parent = kNil, left = kNil, right = kNil;
    uint32_t twin = kNil;
    uint32_t count = 1;
    uint32_t gen = 0;
    uint32_t payload = 0;
    Paren kind = Paren::open;
    bool live = false;
    ElemTuple elems{};
    FoldTuple folds{};
  };

  std::vector<Node> nodes_;
  std::vector<uint32_t> free_;
  size_t live_ = 0;

  Handle handle_at(uint32_t idx) const { return Handle{idx, nodes_[idx].gen}; }

  uint32_t check(Handle h) const {
    if (!valid(h)) raise(Errc::stale_handle, "stale or invalid sequence handle");
    return h.idx;
  }

  uint32_t alloc(Paren kind, uint32_t payload) {
    uint32_t i;
    if (!free_.empty()) {
      i = free_.back();
      free_.pop_back();
    } else {
      i = static_cast<uint32_t>(nodes_.size());
      nodes_.emplace_back();
    }
    Node& n = nodes_[i];
    n.parent = n.left = n.right = n.twin = kNil;
    n.count = 1;
    n.payload = payload;
    n.kind = kind;
    n.live = true;
    n.elems = ElemTuple{};
    ++live_;
    return i;
  }

  void free_node(uint32_t x) {
    nodes_[x].live = false;
    nodes_[x].gen++;
    free_.push_back(x);
    --live_;
  }

  uint32_t count(uint32_t x) const { return x == kNil ? 0 : nodes_[x].count; }

  template <size_t I>
  FoldAt<I> lift(uint32_t x) const {
    return AnnoAt<I>::lift(std::get<I>(nodes_[x].elems), nodes_[x].kind, x);
  }

  template <size_t I>
  FoldAt<I> fold_of(uint32_t x) const {
    return x == kNil ? AnnoAt<I>::identity() : std::get<I>(nodes_[x].folds);
  }

  void recalc(uint32_t x) {
    Node& n = nodes_[x];
    n.count = 1 + count(n.left) + count(n.right);
    recalc_slots(x, std::make_index_sequence<sizeof...(Annos)>{});
  }

  template <size_t... Is>
  void recalc_slots(uint32_t x, std::index_sequence<Is...>) {
    Node& n = nodes_[x];
    ((std::get<Is>(n.folds) = AnnoAt<Is>::concat(
          AnnoAt<Is>::concat(fold_of<Is>(n.left), lift<Is>(x)), fold_of<Is>(n.right))),
     ...);
  }

  void rotate_up(uint32_t x) {
    uint32_t p = nodes_[x].parent;
    uint32_t g = nodes_[p].parent;
    if (nodes_[p].left == x) {
      nodes_[p].left = nodes_[x].right;
      if (nodes_[x].right != kNil) nodes_[nodes_[x].right].parent = p;
      nodes_[x].right = p;
    } else {
      nodes_[p].right = nodes_[x].left;
      if (nodes_[x].left != kNil) nodes_[nodes_[x].left].parent = p;
      nodes_[x].left = p;
    }
    nodes_[p].parent = x;
    nodes_[x].parent = g;
    if (g != kNil) {
      if (nodes_[g].left == p)
        nodes_[g].left = x;
      else
        nodes_[g].right = x;
    }
    recalc(p);
    recalc(x);
  }

  void splay(uint32_t x) {
    while (nodes_[x].parent != kNil) {
      uint32_t p = nodes_[x].parent;
      uint32_t g = nodes_[p].parent;
      if (g == kNil) {
        rotate_up(x);
      } else if ((nodes_[g].left == p) == (nodes_[p].left == x)) {
        rotate_up(p);
        rotate_up(x);
      } else {
        rotate_up(x);
        rotate_up(x);
      }
    }
  }

  uint32_t build_balanced(const std::vector<uint32_t>& idx, size_t lo, size_t hi) {
    size_t mid = lo + (hi - lo) / 2;
    uint32_t x = idx[mid];
    if (mid > lo) {
      uint32_t l = build_balanced(idx, lo, mid);
      nodes_[x].left = l;
      nodes_[l].parent = x;
    }
    if (mid + 1 < hi) {
      uint32_t r = build_balanced(idx, mid + 1, hi);
      nodes_[x].right = r;
      nodes_[r].parent = x;
    }
    recalc(x);
    return x;
  }

  void audit_subtree(uint32_t root, std::vector<char>& seen) const {
    std::vector<std::pair<uint32_t, bool>> stack;
    stack.push_back({root, false});
    while (!stack.empty()) {
      auto [x, expanded] = stack.back();
      stack.pop_back();
      if (!expanded) {
        if (seen[x]) raise(Errc::bad_input, "audit: node reached twice");
        seen[x] = 1;
        stack.push_back({x, true});
        for (uint32_t c : {nodes_[x].left, nodes_[x].right}) {
          if (c == kNil) continue;
          if (!nodes_[c].live) raise(Errc::bad_input, "audit: dead child");
          if (nodes_[c].parent != x) raise(Errc::bad_input, "audit: bad parent link");
          stack.push_back({c, false});
        }
      } else {
        uint32_t expect = 1 + count(nodes_[x].left) + count(nodes_[x].right);
        if (nodes_[x].count != expect) raise(Errc::bad_input, "audit: stale count");
        audit_folds(x, std::make_index_sequence<sizeof...(Annos)>{});
      }
    }
  }

  template <size_t... Is>
  void audit_folds(uint32_t x, std::index_sequence<Is...>) const {
    const Node& n = nodes_[x];
    (
        [&] {
          auto expect = AnnoAt<Is>::concat(AnnoAt<Is>::concat(fold_of<Is>(n.left), lift<Is>(x)),
                                           fold_of<Is>(n.right));
          if (!fold_close(expect, std::get<Is>(n.folds)))
            raise(Errc::bad_input, "audit: stale fold in slot " + std::to_string(Is));
        }(),
        ...);
  }

  static bool fold_close(double a, double b) {
    double m = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= 1e-9 * std::max(1.0, m);
  }
  template <class F>
  static bool fold_close(const F& a, const F& b) {
    return a == b;
  }
};

}  // namespace dft
