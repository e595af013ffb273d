#include "dft/oracle.hpp"

#include <algorithm>
#include <limits>

namespace dft::oracle {

int64_t op_identity(Op o) {
  return o == Op::plus ? 0 : std::numeric_limits<int64_t>::lowest();
}

int64_t op_apply(Op o, int64_t a, int64_t b) { return o == Op::plus ? a + b : std::max(a, b); }

// ----- sequence oracles -----

DepthSummary depth_summary_of(const std::vector<SeqItem>& items) {
  int32_t depth = 0, mindepth = 0;
  for (const SeqItem& it : items) {
    depth += it.open ? 1 : -1;
    mindepth = std::min(mindepth, depth);
  }
  return {mindepth, depth - mindepth};
}

int32_t leftmost_min_index(const std::vector<SeqItem>& items) {
  int32_t depth = 0, best = 1, at = -1;
  for (size_t i = 0; i < items.size(); ++i) {
    depth += items[i].open ? 1 : -1;
    if (depth <= 0 && depth < best) {
      best = depth;
      at = static_cast<int32_t>(i);
    }
  }
  return at;
}

namespace {

// Match every item; the prefix runs through the last unmatched close, the
// suffix starts at the first unmatched open.
struct Decomposition {
  int32_t prefix_end = -1;          // last index of the prefix
  int32_t suffix_begin = 0;         // first index of the suffix (= size if none)
  std::vector<int32_t> body_roots;  // top-level subtree root indices
  std::vector<std::pair<int32_t, int32_t>> body_spans;
};

Decomposition decompose(const std::vector<SeqItem>& items) {
  Decomposition d;
  d.suffix_begin = static_cast<int32_t>(items.size());
  std::vector<int32_t> stack;
  int32_t last_unmatched_close = -1;
  int32_t first_unmatched_open = static_cast<int32_t>(items.size());
  std::vector<char> matched(items.size(), 0);
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].open) {
      stack.push_back(static_cast<int32_t>(i));
    } else if (!stack.empty()) {
      matched[stack.back()] = 1;
      matched[i] = 1;
      stack.pop_back();
    } else {
      last_unmatched_close = static_cast<int32_t>(i);
    }
  }
  if (!stack.empty()) first_unmatched_open = stack.front();
  d.prefix_end = last_unmatched_close;
  d.suffix_begin = first_unmatched_open;
  // top-level complete subtrees between the two
  int32_t depth = 0;
  int32_t open_at = -1;
  for (int32_t i = d.prefix_end + 1; i < d.suffix_begin; ++i) {
    if (items[i].open) {
      if (depth == 0) open_at = i;
      ++depth;
    } else {
      --depth;
      if (depth == 0) {
        d.body_roots.push_back(open_at);
        d.body_spans.push_back({open_at, i});
      }
    }
  }
  return d;
}

int64_t fold_opens(const std::vector<SeqItem>& items, int32_t lo, int32_t hi, Op o) {
  int64_t acc = op_identity(o);
  for (int32_t i = lo; i <= hi; ++i)
    if (items[i].open) acc = op_apply(o, acc, items[i].val);
  return acc;
}

}  // namespace

RcSummary<int64_t> rc_summary_of(const std::vector<SeqItem>& items, Op oplus) {
  Decomposition d = decompose(items);
  DepthSummary s = depth_summary_of(items);
  RcSummary<int64_t> out;
  out.prefix_depth = s.down;
  out.suffix_depth = s.up;
  out.body = op_identity(oplus);
  for (int32_t r : d.body_roots) out.body = op_apply(oplus, out.body, items[r].val);
  out.has_suffix = d.suffix_begin < static_cast<int32_t>(items.size());
  out.suffix_info = out.has_suffix ? items[d.suffix_begin].val : op_identity(oplus);
  return out;
}

RcsSummary<int64_t> rcs_summary_of(const std::vector<SeqItem>& items, Op oplus, Op otimes) {
  Decomposition d = decompose(items);
  DepthSummary s = depth_summary_of(items);
  int32_t n = static_cast<int32_t>(items.size());
  RcsSummary<int64_t> out;
  out.prefix_depth = s.down;
  out.suffix_depth = s.up;
  out.prefix_plus = fold_opens(items, 0, d.prefix_end, oplus);
  out.body_plus = fold_opens(items, d.prefix_end + 1, d.suffix_begin - 1, oplus);
  out.suffix_plus = fold_opens(items, d.suffix_begin, n - 1, oplus);
  out.body_times = op_identity(otimes);
  for (auto [lo, hi] : d.body_spans)
    out.body_times = op_apply(otimes, out.body_times, fold_opens(items, lo, hi, oplus));
  return out;
}

int32_t search_prefix_depth(const std::vector<SeqItem>& items, size_t start, int32_t k) {
  int32_t depth = 0;
  for (size_t i = start; i < items.size(); ++i) {
    depth += items[i].open ? 1 : -1;
    if (depth <= -k) return static_cast<int32_t>(i);
  }
  return -1;
}

// ----- NaiveForest -----

int NaiveForest::check(int v) const {
  if (v < 0 || static_cast<size_t>(v) >= vs_.size() || !vs_[v].live)
    raise(Errc::unknown_vertex, "oracle: unknown vertex");
  return v;
}

int NaiveForest::create_vertex(int64_t value) {
  vs_.push_back(V{true, -1, {}, 1.0, value, value});
  ++live_;
  return static_cast<int>(vs_.size() - 1);
}

bool NaiveForest::alive(int v) const {
  return v >= 0 && static_cast<size_t>(v) < vs_.size() && vs_[v].live;
}

std::vector<int> NaiveForest::live() const {
  std::vector<int> out;
  for (size_t i = 0; i < vs_.size(); ++i)
    if (vs_[i].live) out.push_back(static_cast<int>(i));
  return out;
}

void NaiveForest::link(int u, int v, double w) {
  check(u);
  check(v);
  if (same_tree(u, v)) raise(Errc::same_tree, "oracle link: same tree");
  if (vs_[v].parent != -1) raise(Errc::not_root, "oracle link: v not a root");
  vs_[v].parent = u;
  vs_[v].weight = w;
  vs_[u].kids.insert(vs_[u].kids.begin(), v);
}

void NaiveForest::cut(int v) {
  check(v);
  int p = vs_[v].parent;
  if (p == -1) return;
  auto& k = vs_[p].kids;
  k.erase(std::find(k.begin(), k.end(), v));
  vs_[v].parent = -1;
  vs_[v].weight = 1.0;
}

void NaiveForest::condense(int v) {
  check(v);
  int p = vs_[v].parent;
  if (p == -1) {
    for (int c : vs_[v].kids) {
      vs_[c].parent = -1;
      vs_[c].weight = 1.0;
    }
  } else {
    auto& k = vs_[p].kids;
    auto it = std::find(k.begin(), k.end(), v);
    size_t pos = static_cast<size_t>(it - k.begin());
    k.erase(it);
    k.insert(k.begin() + pos, vs_[v].kids.begin(), vs_[v].kids.end());
    for (int c : vs_[v].kids) vs_[c].parent = p;
  }
  vs_[v].live = false;
  vs_[v].kids.clear();
  --live_;
}

void NaiveForest::erase(int v) {
  cut(v);
  condense(v);
}

void NaiveForest::evert(int v) {
  check(v);
  std::vector<int> chain{v};
  std::vector<double> ws;
  int z = v;
  while (vs_[z].parent != -1) {
    ws.push_back(vs_[z].weight);
    chain.push_back(vs_[z].parent);
    z = vs_[z].parent;
  }
  if (chain.size() == 1) return;
  for (size_t i = 0; i + 1 < chain.size(); ++i) cut(chain[i]);
  for (size_t i = chain.size() - 1; i-- > 0;) link(chain[i], chain[i + 1], ws[i]);
}

void NaiveForest::set_value(int v, int64_t x) {
  check(v);
  vs_[v].base = x;
  vs_[v].eff = x;
}

void NaiveForest::add_to_path(int v, int64_t d) {
  check(v);
  for (int z = v; z != -1; z = vs_[z].parent) vs_[z].eff += d;
}

void NaiveForest::add_to_subtree(int v, int64_t d) {
  check(v);
  std::vector<int> sub;
  collect_subtree(v, sub);
  for (int z : sub) vs_[z].eff += d;
}

int64_t NaiveForest::effective_value(int v) const { return vs_[check(v)].eff; }
int64_t NaiveForest::base_value(int v) const { return vs_[check(v)].base; }
double NaiveForest::edge_weight(int v) const { return vs_[check(v)].weight; }

std::optional<int> NaiveForest::parent(int v) const {
  int p = vs_[check(v)].parent;
  return p == -1 ? std::nullopt : std::optional<int>(p);
}

int NaiveForest::root(int v) const {
  check(v);
  while (vs_[v].parent != -1) v = vs_[v].parent;
  return v;
}

int64_t NaiveForest::depth(int v) const {
  check(v);
  int64_t d = 0;
  for (int z = v; z != -1; z = vs_[z].parent) ++d;
  return d;
}

bool NaiveForest::same_tree(int u, int v) const { return root(u) == root(v); }

bool NaiveForest::is_descendant(int u, int v) const {
  check(u);
  check(v);
  for (int z = u; z != -1; z = vs_[z].parent)
    if (z == v) return true;
  return false;
}

int NaiveForest::lca(int u, int v) const {
  if (!same_tree(u, v)) raise(Errc::different_trees, "oracle lca: different trees");
  std::set<int> anc;
  for (int z = u; z != -1; z = vs_[z].parent) anc.insert(z);
  for (int z = v; z != -1; z = vs_[z].parent)
    if (anc.count(z)) return z;
  raise(Errc::bad_input, "oracle lca: unreachable");
}

std::optional<int> NaiveForest::ancestor(int v, int64_t k) const {
  check(v);
  if (k < 0) raise(Errc::bad_input, "oracle ancestor: negative level");
  int z = v;
  while (k > 0 && z != -1) {
    z = vs_[z].parent;
    --k;
  }
  return z == -1 ? std::nullopt : std::optional<int>(z);
}

int64_t NaiveForest::degree(int v) const { return static_cast<int64_t>(vs_[check(v)].kids.size()); }

std::vector<int> NaiveForest::children(int v) const { return vs_[check(v)].kids; }

void NaiveForest::collect_subtree(int v, std::vector<int>& out) const {
  out.push_back(v);
  for (size_t i = out.size() - 1; i < out.size(); ++i)
    for (int c : vs_[out[i]].kids) out.push_back(c);
}

int64_t NaiveForest::subtree_size(int v) const {
  check(v);
  std::vector<int> sub;
  collect_subtree(v, sub);
  return static_cast<int64_t>(sub.size());
}

int64_t NaiveForest::sigma(int v, Op oplus) const {
  std::vector<int> sub;
  collect_subtree(v, sub);
  int64_t acc = op_identity(oplus);
  for (int z : sub) acc = op_apply(oplus, acc, vs_[z].base);
  return acc;
}

int64_t NaiveForest::reduce_children(int v, Op oplus) const {
  check(v);
  int64_t acc = op_identity(oplus);
  for (int c : vs_[v].kids) acc = op_apply(oplus, acc, vs_[c].base);
  return acc;
}

int64_t NaiveForest::reduce_child_subtrees(int v, Op oplus, Op otimes) const {
  check(v);
  int64_t acc = op_identity(otimes);
  for (int c : vs_[v].kids) acc = op_apply(otimes, acc, sigma(c, oplus));
  return acc;
}

int64_t NaiveForest::subtree_sum(int v) const { return sigma(check(v), Op::plus); }
int64_t NaiveForest::subtree_max(int v) const { return sigma(check(v), Op::max); }
int64_t NaiveForest::maxsum_child(int v) const {
  return reduce_child_subtrees(v, Op::plus, Op::max);
}
int64_t NaiveForest::children_sum(int v) const { return reduce_children(v, Op::plus); }
int64_t NaiveForest::children_max(int v) const { return reduce_children(v, Op::max); }

int64_t NaiveForest::combine_sum(int v) const {
  check(v);
  int64_t acc = 0;
  for (int z = v; z != -1; z = vs_[z].parent) acc += vs_[z].base;
  return acc;
}

double NaiveForest::weighted_depth(int v) const {
  check(v);
  double acc = 0;
  for (int z = v; vs_[z].parent != -1; z = vs_[z].parent) acc += vs_[z].weight;
  return acc;
}

double NaiveForest::distance(int u, int v) const {
  int l = lca(u, v);
  return weighted_depth(u) + weighted_depth(v) - 2 * weighted_depth(l);
}

int64_t NaiveForest::hop_distance(int u, int v) const {
  int l = lca(u, v);
  return depth(u) + depth(v) - 2 * depth(l);
}

int64_t NaiveForest::betweenness(int v) const {
  check(v);
  std::vector<int> tree = tree_vertices(v);
  int64_t count = 0;
  for (size_t i = 0; i < tree.size(); ++i) {
    for (size_t j = i + 1; j < tree.size(); ++j) {
      int s = tree[i], t = tree[j];
      if (s == v || t == v) continue;
      if (hop_distance(s, v) + hop_distance(v, t) == hop_distance(s, t)) ++count;
    }
  }
  return count;
}

std::vector<int> NaiveForest::tree_vertices(int v) const {
  std::vector<int> out;
  collect_subtree(root(v), out);
  return out;
}

double NaiveForest::farness(int v) const {
  check(v);
  double acc = 0;
  for (int z : tree_vertices(v))
    if (z != v) acc += distance(v, z);
  return acc;
}

std::map<int, int64_t> NaiveForest::betweenness_all(int v) const {
  std::vector<int> tree = tree_vertices(v);
  std::map<int, int64_t> bc;
  for (int z : tree) bc[z] = 0;
  for (size_t i = 0; i < tree.size(); ++i) {
    for (size_t j = i + 1; j < tree.size(); ++j) {
      int s = tree[i], t = tree[j];
      std::map<int, int> anc;
      int idx = 0;
      for (int z = s; z != -1; z = vs_[z].parent) anc[z] = idx++;
      int l = t;
      while (!anc.count(l)) l = vs_[l].parent;
      for (int z = s; z != l; z = vs_[z].parent)
        if (z != s) ++bc[z];
      for (int z = t; z != l; z = vs_[z].parent)
        if (z != t) ++bc[z];
      if (l != s && l != t) ++bc[l];
    }
  }
  return bc;
}

std::map<int, double> NaiveForest::farness_all(int v) const {
  std::vector<int> tree = tree_vertices(v);
  std::map<int, double> out;
  for (int s : tree) {
    // undirected traversal from s accumulating weighted distances
    double acc = 0;
    std::vector<std::pair<int, double>> stack{{s, 0.0}};
    std::set<int> seen{s};
    while (!stack.empty()) {
      auto [z, d] = stack.back();
      stack.pop_back();
      acc += d;
      int p = vs_[z].parent;
      if (p != -1 && seen.insert(p).second) stack.push_back({p, d + vs_[z].weight});
      for (int c : vs_[z].kids)
        if (seen.insert(c).second) stack.push_back({c, d + vs_[c].weight});
    }
    out[s] = acc;
  }
  return out;
}

// ----- NaiveGraph -----

void NaiveGraph::add_vertex(uint64_t id) {
  if (adj_.count(id)) raise(Errc::duplicate_vertex, "oracle graph: duplicate vertex");
  adj_[id];
}

void NaiveGraph::add_edge(uint64_t u, uint64_t v) {
  if (u == v) raise(Errc::self_loop, "oracle graph: self loop");
  neighbors(u);
  neighbors(v);
  adj_[u].insert(v);
  adj_[v].insert(u);
}

bool NaiveGraph::has_vertex(uint64_t id) const { return adj_.count(id) != 0; }

bool NaiveGraph::has_edge(uint64_t u, uint64_t v) const {
  auto it = adj_.find(u);
  return it != adj_.end() && it->second.count(v) != 0;
}

const std::set<uint64_t>& NaiveGraph::neighbors(uint64_t u) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) raise(Errc::unknown_vertex, "oracle graph: unknown vertex");
  return it->second;
}

bool NaiveGraph::connected(uint64_t u, uint64_t v) const {
  neighbors(u);
  neighbors(v);
  std::set<uint64_t> seen{u};
  std::vector<uint64_t> queue{u};
  for (size_t i = 0; i < queue.size(); ++i) {
    if (queue[i] == v) return true;
    for (uint64_t w : adj_.at(queue[i]))
      if (seen.insert(w).second) queue.push_back(w);
  }
  return seen.count(v) != 0;
}

int64_t NaiveGraph::component_size(uint64_t u) const {
  neighbors(u);
  std::set<uint64_t> seen{u};
  std::vector<uint64_t> queue{u};
  for (size_t i = 0; i < queue.size(); ++i)
    for (uint64_t w : adj_.at(queue[i]))
      if (seen.insert(w).second) queue.push_back(w);
  return static_cast<int64_t>(seen.size());
}

NaiveGraph::LowpointData NaiveGraph::lowpoint() const {
  LowpointData out;
  std::map<uint64_t, int> disc, low;
  std::map<uint64_t, int64_t> sz;
  std::vector<std::pair<uint64_t, uint64_t>> edge_stack;
  int timer = 0;

  for (const auto& [start, _] : adj_) {
    if (disc.count(start)) continue;
    // component vertex count for impact
    std::vector<uint64_t> comp;
    {
      std::set<uint64_t> seen{start};
      std::vector<uint64_t> queue{start};
      for (size_t i = 0; i < queue.size(); ++i) {
        comp.push_back(queue[i]);
        for (uint64_t w : adj_.at(queue[i]))
          if (seen.insert(w).second) queue.push_back(w);
      }
    }
    int64_t comp_size = static_cast<int64_t>(comp.size());

    struct Frame {
      uint64_t u;
      uint64_t parent;
      bool has_parent;
      std::set<uint64_t>::const_iterator it;
    };
    std::vector<Frame> stack;
    std::map<uint64_t, std::vector<int64_t>> pieces;  // separated child subtree sizes
    std::map<uint64_t, int> tree_children;

    disc[start] = low[start] = timer++;
    sz[start] = 1;
    stack.push_back({start, 0, false, adj_.at(start).begin()});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.it != adj_.at(f.u).end()) {
        uint64_t w = *f.it;
        ++f.it;
        if (f.has_parent && w == f.parent) continue;
        if (!disc.count(w)) {
          edge_stack.push_back({f.u, w});
          tree_children[f.u]++;
          disc[w] = low[w] = timer++;
          sz[w] = 1;
          stack.push_back({w, f.u, true, adj_.at(w).begin()});
        } else if (disc[w] < disc[f.u]) {
          edge_stack.push_back({f.u, w});
          low[f.u] = std::min(low[f.u], disc[w]);
        }
      } else {
        uint64_t u = f.u;
        bool has_parent = f.has_parent;
        uint64_t parent = f.parent;
        stack.pop_back();
        if (has_parent) {
          sz[parent] += sz[u];
          low[parent] = std::min(low[parent], low[u]);
          if (low[u] >= disc[parent]) {
            // close a biconnected component
            std::set<uint64_t> block;
            while (true) {
              auto [a, b] = edge_stack.back();
              edge_stack.pop_back();
              block.insert(a);
              block.insert(b);
              if (a == parent && b == u) break;
            }
            out.blocks.push_back(std::move(block));
            pieces[parent].push_back(sz[u]);
          }
          if (low[u] > disc[parent]) out.bridges.insert({std::min(parent, u), std::max(parent, u)});
        }
      }
    }
    for (uint64_t u : comp) {
      bool is_root = u == start;
      bool artic = is_root ? tree_children[u] >= 2
                           : !pieces[u].empty();
      if (artic) out.articulations.insert(u);
      int64_t total = 0, biggest = 0;
      for (int64_t p : pieces[u]) {
        total += p;
        biggest = std::max(biggest, p);
      }
      int64_t rest = comp_size - 1 - total;
      biggest = std::max(biggest, rest);
      out.impacts[u] = artic ? comp_size - 1 - biggest : 0;
    }
  }
  return out;
}

std::set<uint64_t> NaiveGraph::articulation_points() const { return lowpoint().articulations; }
std::set<std::pair<uint64_t, uint64_t>> NaiveGraph::bridges() const { return lowpoint().bridges; }
std::vector<std::set<uint64_t>> NaiveGraph::blocks() const { return lowpoint().blocks; }
std::map<uint64_t, int64_t> NaiveGraph::impacts() const { return lowpoint().impacts; }

bool NaiveGraph::is_articulation(uint64_t u) const {
  neighbors(u);
  return lowpoint().articulations.count(u) != 0;
}

bool NaiveGraph::is_bridge(uint64_t u, uint64_t v) const {
  neighbors(u);
  neighbors(v);
  return lowpoint().bridges.count({std::min(u, v), std::max(u, v)}) != 0;
}

int64_t NaiveGraph::impact(uint64_t u) const {
  neighbors(u);
  return lowpoint().impacts.at(u);
}

int64_t NaiveGraph::impact_remove_and_count(uint64_t u) const {
  neighbors(u);
  int64_t before = component_size(u);
  // BFS over the component with u removed, piece by piece
  std::set<uint64_t> seen{u};
  int64_t biggest = 0;
  for (uint64_t s : adj_.at(u)) {
    if (seen.count(s)) continue;
    int64_t piece = 0;
    std::vector<uint64_t> queue{s};
    seen.insert(s);
    for (size_t i = 0; i < queue.size(); ++i) {
      ++piece;
      for (uint64_t w : adj_.at(queue[i]))
        if (w != u && seen.insert(w).second) queue.push_back(w);
    }
    biggest = std::max(biggest, piece);
  }
  return before - 1 - biggest;
}

}  // namespace dft::oracle
