#include "dft/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace dft::bench {

Profile profile_from_name(std::string_view name) {
  if (name == "query" || name == "query-heavy") return Profile::query_heavy;
  if (name == "evert" || name == "evert-heavy") return Profile::evert_heavy;
  if (name == "mixed") return Profile::mixed;
  raise(Errc::bad_input, "unknown benchmark profile: " + std::string(name));
}

std::string_view profile_name(Profile p) {
  switch (p) {
    case Profile::query_heavy: return "query-heavy";
    case Profile::evert_heavy: return "evert-heavy";
    case Profile::mixed: return "mixed";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<VertexId> build_random_tree(WorkloadForest& f, size_t n, std::mt19937_64& rng) {
  RootedTree t;
  t.parent.resize(n, -1);
  for (size_t i = 1; i < n; ++i)
    t.parent[i] = static_cast<int32_t>(rng() % i);
  auto ids = f.import_tree(t);
  for (VertexId v : ids) {
    int64_t x = static_cast<int64_t>(rng() % 64);
    f.set_reduction_value<0>(v, x);
    f.set_reduction_value<1>(v, x);
  }
  return ids;
}

std::vector<VertexId> build_chain(WorkloadForest& f, size_t n) {
  RootedTree t;
  t.parent.resize(n, -1);
  for (size_t i = 1; i < n; ++i) t.parent[i] = static_cast<int32_t>(i - 1);
  return f.import_tree(t);
}

int64_t run_queries(WorkloadForest& f, const std::vector<VertexId>& ids, size_t ops,
                    std::mt19937_64& rng) {
  int64_t sink = 0;
  size_t n = ids.size();
  for (size_t i = 0; i < ops; ++i) {
    VertexId v = ids[rng() % n];
    VertexId u = ids[rng() % n];
    switch (rng() % 10) {
      case 0: sink += f.root(v).idx; break;
      case 1: sink += f.parent(v) ? 1 : 0; break;
      case 2: sink += f.depth(v); break;
      case 3: sink += f.subtree_size(v); break;
      case 4: sink += f.subtree_reduce<0>(v); break;
      case 5: sink += f.reduce_child_subtrees<1>(v) & 0xff; break;
      case 6: sink += f.degree(v); break;
      case 7: sink += f.lca(u, v).idx; break;
      case 8: sink += f.hop_distance(u, v); break;
      case 9: sink += f.is_descendant(u, v) ? 1 : 0; break;
    }
  }
  return sink;
}

volatile int64_t g_sink;

}  // namespace

Measurement run_once(Profile p, size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * n));
  Measurement m;
  m.n = n;
  switch (p) {
    case Profile::query_heavy: {
      WorkloadForest f;
      auto ids = build_random_tree(f, n, rng);
      run_queries(f, ids, 2048, rng);  // warmup
      m.ops = 100000;
      auto t0 = Clock::now();
      g_sink = run_queries(f, ids, m.ops, rng);
      auto t1 = Clock::now();
      m.ns_per_op = std::chrono::duration<double, std::nano>(t1 - t0).count() / m.ops;
      break;
    }
    case Profile::evert_heavy: {
      WorkloadForest f;
      auto ids = build_chain(f, n);
      m.ops = std::max<size_t>(4, (1u << 21) / n);
      auto t0 = Clock::now();
      for (size_t i = 0; i < m.ops; ++i) f.evert(ids[rng() % n]);
      auto t1 = Clock::now();
      m.ns_per_op = std::chrono::duration<double, std::nano>(t1 - t0).count() / m.ops;
      break;
    }
    case Profile::mixed: {
      WorkloadForest f;
      auto ids = build_random_tree(f, n, rng);
      m.ops = 50000;
      auto t0 = Clock::now();
      int64_t sink = 0;
      for (size_t i = 0; i < m.ops; ++i) {
        VertexId v = ids[rng() % n];
        VertexId u = ids[rng() % n];
        switch (rng() % 8) {
          case 0:
            if (!f.same_tree(u, v) && f.is_root(v)) f.link(u, v);
            break;
          case 1: f.cut(v); break;
          case 2: f.add_to_path<0>(v, 1); break;
          case 3: f.add_to_subtree<0>(v, 1); break;
          case 4: sink += f.get_effective_val<0>(v); break;
          case 5: sink += f.subtree_reduce<0>(v); break;
          case 6: sink += f.root(v).idx; break;
          case 7: sink += f.depth(v); break;
        }
      }
      g_sink = sink;
      auto t1 = Clock::now();
      m.ns_per_op = std::chrono::duration<double, std::nano>(t1 - t0).count() / m.ops;
      break;
    }
  }
  return m;
}

std::vector<Measurement> run_profile(Profile p, uint64_t seed, unsigned min_exp, unsigned max_exp,
                                     unsigned repeats) {
  std::vector<Measurement> out;
  for (unsigned e = min_exp; e <= max_exp; ++e) {
    size_t n = size_t{1} << e;
    std::vector<double> times;
    Measurement m;
    for (unsigned r = 0; r < repeats; ++r) {
      m = run_once(p, n, seed);
      times.push_back(m.ns_per_op);
    }
    std::sort(times.begin(), times.end());
    m.ns_per_op = times[times.size() / 2];
    out.push_back(m);
  }
  return out;
}

double mean_doubling_ratio(const std::vector<Measurement>& ms) {
  if (ms.size() < 2) return 1.0;
  double logsum = 0;
  for (size_t i = 1; i < ms.size(); ++i) logsum += std::log(ms[i].ns_per_op / ms[i - 1].ns_per_op);
  return std::exp(logsum / static_cast<double>(ms.size() - 1));
}

std::string render_report(Profile p, const std::vector<Measurement>& ms) {
  std::ostringstream os;
  os << "profile " << profile_name(p) << "\n";
  os << "        n        ops      ns/op    ratio\n";
  for (size_t i = 0; i < ms.size(); ++i) {
    char line[128];
    double ratio = i == 0 ? 0.0 : ms[i].ns_per_op / ms[i - 1].ns_per_op;
    if (i == 0)
      snprintf(line, sizeof line, "%9zu %10zu %10.1f        -\n", ms[i].n, ms[i].ops,
               ms[i].ns_per_op);
    else
      snprintf(line, sizeof line, "%9zu %10zu %10.1f %8.3f\n", ms[i].n, ms[i].ops, ms[i].ns_per_op,
               ratio);
    os << line;
  }
  char tail[64];
  snprintf(tail, sizeof tail, "mean doubling ratio %.3f\n", mean_doubling_ratio(ms));
  os << tail;
  return os.str();
}

}  // namespace dft::bench
