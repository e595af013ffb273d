#pragma once

// Shared helpers for the unit, differential and acceptance suites: a fast
// forest and the naive oracle driven in lockstep, with every outcome
// (value or error code) compared.

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dft/forest.hpp"
#include "dft/oracle.hpp"

namespace testutil {

using namespace dft;

struct TestForestConfig {
  using Reductions = std::tuple<ReductionSpec<int64_t, Plus<int64_t>, Plus<int64_t>>,
                                ReductionSpec<int64_t, Max<int64_t>, Max<int64_t>>,
                                ReductionSpec<int64_t, Plus<int64_t>, Max<int64_t>>,
                                ReductionSpec<int64_t, Max<int64_t>, Plus<int64_t>>>;
  using Paths = std::tuple<PathSpec<int64_t>>;
  using Lazies = std::tuple<LazySpec<int64_t>>;
};
using TForest = Forest<TestForestConfig>;

struct MismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
struct Outcome {
  std::optional<T> val;
  std::optional<Errc> err;
  bool operator==(const Outcome& o) const { return val == o.val && err == o.err; }
};

template <class F>
auto capture(F&& fn) -> Outcome<decltype(fn())> {
  using T = decltype(fn());
  try {
    return Outcome<T>{fn(), std::nullopt};
  } catch (const Error& e) {
    return Outcome<T>{std::nullopt, e.code()};
  }
}

template <class T>
std::string show(const Outcome<T>& o) {
  std::ostringstream os;
  if (o.err) {
    os << "error:" << to_string(*o.err);
  } else if constexpr (requires(std::ostream& s, T v) { s << v; }) {
    os << *o.val;
  } else {
    os << "<value>";
  }
  return os.str();
}

template <class T>
void expect_same(const Outcome<T>& fast, const Outcome<T>& slow, const std::string& what) {
  if (!(fast == slow))
    throw MismatchError(what + ": fast=" + show(fast) + " oracle=" + show(slow));
}

// Fast forest plus oracle forest mutated and queried in lockstep.
class Mirror {
 public:
  explicit Mirror(uint64_t seed) : rng_(seed) {}

  size_t size() const { return verts_.size(); }
  TForest& forest() { return f_; }
  oracle::NaiveForest& naive() { return n_; }
  std::mt19937_64& rng() { return rng_; }

  int add_vertex(int64_t val) {
    VertexId v = f_.create_vertex();
    set_values(v, val);
    int id = n_.create_vertex(val);
    verts_.push_back({v, id});
    fast_of_[id] = v;
    rev_[v.idx] = id;
    return id;
  }

  int add_vertex() { return add_vertex(rand_val()); }

  void set_values(VertexId v, int64_t val) {
    f_.set_reduction_value<0>(v, val);
    f_.set_reduction_value<1>(v, val);
    f_.set_reduction_value<2>(v, val);
    f_.set_reduction_value<3>(v, val);
    f_.set_path_value<0>(v, val);
    f_.change_val<0>(v, val);
  }

  void random_mutation() {
    if (verts_.empty()) {
      add_vertex();
      return;
    }
    uint64_t roll = rng_() % 100;
    if (roll < 30) {
      mutate_link();
    } else if (roll < 45) {
      mutate_cut();
    } else if (roll < 55) {
      mutate_evert();
    } else if (roll < 61) {
      mutate_condense();
    } else if (roll < 67) {
      mutate_erase();
    } else if (roll < 77) {
      auto [v, id] = pick();
      int64_t x = rand_val();
      set_values(v, x);
      n_.set_value(id, x);
    } else if (roll < 87) {
      auto [v, id] = pick();
      int64_t d = rand_val();
      f_.add_to_path<0>(v, d);
      n_.add_to_path(id, d);
    } else if (roll < 97) {
      auto [v, id] = pick();
      int64_t d = rand_val();
      f_.add_to_subtree<0>(v, d);
      n_.add_to_subtree(id, d);
    } else {
      add_vertex();
    }
  }

  void random_query() {
    auto [v, vid] = pick();
    auto [u, uid] = pick();
    switch (rng_() % 18) {
      case 0:
        expect_same(capture([&] { return name(f_.root(v)); }),
                    capture([&] { return n_.root(vid); }), "root");
        break;
      case 1:
        expect_same(capture([&] { return opt_name(f_.parent(v)); }),
                    capture([&] { return to_opt(n_.parent(vid)); }), "parent");
        break;
      case 2:
        expect_same(capture([&] { return f_.depth(v); }), capture([&] { return n_.depth(vid); }),
                    "depth");
        break;
      case 3:
        expect_same(capture([&] { return f_.same_tree(u, v); }),
                    capture([&] { return n_.same_tree(uid, vid); }), "same_tree");
        break;
      case 4:
        expect_same(capture([&] { return f_.is_descendant(u, v); }),
                    capture([&] { return n_.is_descendant(uid, vid); }), "is_descendant");
        break;
      case 5:
        expect_same(capture([&] { return name(f_.lca(u, v)); }),
                    capture([&] { return n_.lca(uid, vid); }), "lca");
        break;
      case 6:
        expect_same(capture([&] { return f_.hop_distance(u, v); }),
                    capture([&] { return n_.hop_distance(uid, vid); }), "hop_distance");
        break;
      case 7:
        expect_same(capture([&] { return f_.distance(u, v); }),
                    capture([&] { return n_.distance(uid, vid); }), "distance");
        break;
      case 8: {
        int64_t k = static_cast<int64_t>(rng_() % 8);
        expect_same(capture([&] { return opt_name(f_.ancestor(v, k)); }),
                    capture([&] { return to_opt(n_.ancestor(vid, k)); }), "ancestor");
        break;
      }
      case 9:
        expect_same(capture([&] { return f_.degree(v); }), capture([&] { return n_.degree(vid); }),
                    "degree");
        break;
      case 10:
        expect_same(capture([&] { return children_names(v); }),
                    capture([&] { return n_.children(vid); }), "children");
        break;
      case 11:
        expect_same(capture([&] { return f_.subtree_size(v); }),
                    capture([&] { return n_.subtree_size(vid); }), "subtree_size");
        break;
      case 12:
        expect_same(capture([&] { return f_.subtree_reduce<0>(v); }),
                    capture([&] { return n_.subtree_sum(vid); }), "subtree_sum");
        break;
      case 13:
        expect_same(capture([&] { return f_.subtree_reduce<1>(v); }),
                    capture([&] { return n_.subtree_max(vid); }), "subtree_max");
        break;
      case 14: {
        expect_same(capture([&] { return f_.reduce_child_subtrees<2>(v); }),
                    capture([&] { return n_.maxsum_child(vid); }), "maxsum_child");
        expect_same(
            capture([&] { return f_.reduce_child_subtrees<3>(v); }),
            capture([&] { return n_.reduce_child_subtrees(vid, oracle::Op::max, oracle::Op::plus); }),
            "reduce_child_subtrees(max,+)");
        break;
      }
      case 15:
        expect_same(capture([&] { return f_.reduce_children<0>(v); }),
                    capture([&] { return n_.children_sum(vid); }), "children_sum");
        expect_same(capture([&] { return f_.reduce_children<1>(v); }),
                    capture([&] { return n_.children_max(vid); }), "children_max");
        break;
      case 16:
        expect_same(capture([&] { return f_.combine<0>(v); }),
                    capture([&] { return n_.combine_sum(vid); }), "combine");
        break;
      case 17:
        expect_same(capture([&] { return f_.get_effective_val<0>(v); }),
                    capture([&] { return n_.effective_value(vid); }), "effective_val");
        break;
    }
  }

  // Every per-vertex query on every vertex plus sampled pair queries.
  void compare_all() {
    for (auto [v, id] : verts_) {
      expect_same(capture([&] { return name(f_.root(v)); }), capture([&] { return n_.root(id); }),
                  "root");
      expect_same(capture([&] { return opt_name(f_.parent(v)); }),
                  capture([&] { return to_opt(n_.parent(id)); }), "parent");
      expect_same(capture([&] { return f_.depth(v); }), capture([&] { return n_.depth(id); }),
                  "depth");
      expect_same(capture([&] { return f_.degree(v); }), capture([&] { return n_.degree(id); }),
                  "degree");
      expect_same(capture([&] { return children_names(v); }),
                  capture([&] { return n_.children(id); }), "children");
      expect_same(capture([&] { return f_.subtree_size(v); }),
                  capture([&] { return n_.subtree_size(id); }), "subtree_size");
      expect_same(capture([&] { return f_.subtree_reduce<0>(v); }),
                  capture([&] { return n_.subtree_sum(id); }), "subtree_sum");
      expect_same(capture([&] { return f_.subtree_reduce<1>(v); }),
                  capture([&] { return n_.subtree_max(id); }), "subtree_max");
      expect_same(capture([&] { return f_.reduce_child_subtrees<2>(v); }),
                  capture([&] { return n_.maxsum_child(id); }), "maxsum_child");
      expect_same(capture([&] { return f_.reduce_children<0>(v); }),
                  capture([&] { return n_.children_sum(id); }), "children_sum");
      expect_same(capture([&] { return f_.reduce_children<1>(v); }),
                  capture([&] { return n_.children_max(id); }), "children_max");
      expect_same(capture([&] { return f_.combine<0>(v); }),
                  capture([&] { return n_.combine_sum(id); }), "combine");
      expect_same(capture([&] { return f_.get_effective_val<0>(v); }),
                  capture([&] { return n_.effective_value(id); }), "effective_val");
    }
    size_t pairs = std::min<size_t>(2 * verts_.size(), 400);
    for (size_t i = 0; i < pairs; ++i) {
      auto [v, vid] = pick();
      auto [u, uid] = pick();
      expect_same(capture([&] { return f_.same_tree(u, v); }),
                  capture([&] { return n_.same_tree(uid, vid); }), "same_tree");
      expect_same(capture([&] { return f_.is_descendant(u, v); }),
                  capture([&] { return n_.is_descendant(uid, vid); }), "is_descendant");
      expect_same(capture([&] { return name(f_.lca(u, v)); }),
                  capture([&] { return n_.lca(uid, vid); }), "lca");
      expect_same(capture([&] { return f_.distance(u, v); }),
                  capture([&] { return n_.distance(uid, vid); }), "distance");
    }
  }

  void audit() { f_.audit(); }

 private:
  TForest f_;
  oracle::NaiveForest n_;
  std::vector<std::pair<VertexId, int>> verts_;
  std::unordered_map<int, VertexId> fast_of_;
  std::unordered_map<uint32_t, int> rev_;
  std::mt19937_64 rng_;

  int64_t rand_val() { return static_cast<int64_t>(rng_() % 41) - 20; }

  std::pair<VertexId, int> pick() { return verts_[rng_() % verts_.size()]; }

  int name(VertexId v) {
    auto it = rev_.find(v.idx);
    if (it == rev_.end() || !(fast_of_.at(it->second) == v))
      throw MismatchError("fast returned a vertex the driver does not know");
    return it->second;
  }

  std::optional<int> opt_name(std::optional<VertexId> v) {
    return v ? std::optional<int>(name(*v)) : std::nullopt;
  }

  static std::optional<int> to_opt(std::optional<int> v) { return v; }

  std::vector<int> children_names(VertexId v) {
    std::vector<int> out;
    for (VertexId c : f_.list_children(v)) out.push_back(name(c));
    return out;
  }

  void drop(int id) {
    for (size_t i = 0; i < verts_.size(); ++i) {
      if (verts_[i].second == id) {
        rev_.erase(verts_[i].first.idx);
        verts_.erase(verts_.begin() + i);
        break;
      }
    }
    fast_of_.erase(id);
  }

  void mutate_link() {
    auto [v, vid] = pick();
    auto [u, uid] = pick();
    // bias towards legal links: often lift v to its root first
    if (rng_() % 2) {
      int rid = n_.root(vid);
      vid = rid;
      v = fast_of_.at(rid);
    }
    double w = static_cast<double>(1 + rng_() % 8);
    auto a = capture([&] {
      f_.link(u, v, w);
      return 0;
    });
    auto b = capture([&] {
      n_.link(uid, vid, w);
      return 0;
    });
    expect_same(a, b, "link");
  }

  void mutate_cut() {
    auto [v, vid] = pick();
    f_.cut(v);
    n_.cut(vid);
  }

  void mutate_evert() {
    auto [v, vid] = pick();
    if (rng_() % 2)
      f_.evert(v);
    else
      f_.evert_linear(v);
    n_.evert(vid);
  }

  void mutate_condense() {
    auto [v, vid] = pick();
    f_.condense(v);
    n_.condense(vid);
    drop(vid);
  }

  void mutate_erase() {
    auto [v, vid] = pick();
    f_.erase(v);
    n_.erase(vid);
    drop(vid);
  }
};

// Deterministic builders -----------------------------------------------------

inline RootedTree random_tree(size_t n, std::mt19937_64& rng, bool weighted = false,
                              int max_weight = 9) {
  RootedTree t;
  t.parent.resize(n, -1);
  for (size_t i = 1; i < n; ++i) t.parent[i] = static_cast<int32_t>(rng() % i);
  if (weighted) {
    t.weight.resize(n, 1.0);
    for (size_t i = 1; i < n; ++i) t.weight[i] = static_cast<double>(1 + rng() % max_weight);
  }
  return t;
}

}  // namespace testutil
