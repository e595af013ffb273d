// Line-oriented driver for forest and streaming-graph sessions, plus the
// benchmark harness. One command per line, '#' starts a comment, ids are
// opaque whitespace-free tokens. Every query emits exactly one line: the
// value, "none" for absent optionals, or "error: <code>" for per-line domain
// errors. Parse errors abort with the offending line number (exit 1);
// --verify runs the reference implementation in lockstep and exits 2 on the
// first divergence.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "dft/block_forest.hpp"
#include "dft/centrality.hpp"
#include "dft/forest.hpp"
#include "dft/oracle.hpp"
#include "dft/workload.hpp"

namespace {

using namespace dft;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_num(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) {
    char buf[32];
    snprintf(buf, sizeof buf, "%lld", static_cast<long long>(x));
    return buf;
  }
  char buf[40];
  snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

int64_t parse_i64(const std::string& s) {
  size_t pos = 0;
  int64_t v;
  try {
    v = std::stoll(s, &pos);
  } catch (...) {
    throw ParseError("expected integer, got '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("expected integer, got '" + s + "'");
  return v;
}

double parse_f64(const std::string& s) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    throw ParseError("expected number, got '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("expected number, got '" + s + "'");
  return v;
}

bool answers_match(const std::string& a, const std::string& b) {
  if (a == b) return true;
  char* e1 = nullptr;
  char* e2 = nullptr;
  double x = strtod(a.c_str(), &e1);
  double y = strtod(b.c_str(), &e2);
  if (e1 == a.c_str() || *e1 != '\0' || e2 == b.c_str() || *e2 != '\0') return false;
  double m = std::max({1.0, std::abs(x), std::abs(y)});
  return std::abs(x - y) <= 1e-9 * m;
}

struct CliConfig {
  using Reductions = std::tuple<ReductionSpec<int64_t, Plus<int64_t>, Plus<int64_t>>,
                                ReductionSpec<int64_t, Max<int64_t>, Max<int64_t>>,
                                ReductionSpec<int64_t, Plus<int64_t>, Max<int64_t>>,
                                ReductionSpec<SizeSquare, SizeSquareMerge, SizeSquareAdd>>;
  using Paths = std::tuple<PathSpec<int64_t>>;
  using Lazies = std::tuple<LazySpec<int64_t>, LazySpec<double>>;
};

class ForestSession {
 public:
  static constexpr size_t kRSum = 0, kRMax = 1, kRMaxSum = 2, kRPair = 3;
  static constexpr size_t kLVal = 0, kLDown = 1;
  using F = Forest<CliConfig>;

  explicit ForestSession(bool verify) : verify_(verify) {}

  // Returns the answer line for queries, nullopt for quiet mutations.
  std::optional<std::string> execute(const std::vector<std::string>& t) {
    std::optional<std::string> fast;
    try {
      fast = run(t);
    } catch (const Error& e) {
      fast = std::string("error: ") + to_string(e.code());
    }
    if (verify_) {
      std::optional<std::string> slow;
      try {
        slow = run_naive(t);
      } catch (const Error& e) {
        slow = std::string("error: ") + to_string(e.code());
      }
      bool ok = fast.has_value() == slow.has_value() &&
                (!fast || answers_match(*fast, *slow));
      if (!ok)
        throw VerifyError("fast='" + (fast ? *fast : "<none>") + "' oracle='" +
                          (slow ? *slow : "<none>") + "'");
    }
    return fast;
  }

 private:
  F forest_;
  ClosenessTracker<F, kRPair, kLDown> cc_{forest_};
  std::unordered_map<std::string, VertexId> ids_;
  std::unordered_map<uint32_t, std::string> names_;
  oracle::NaiveForest naive_;
  std::unordered_map<std::string, int> nids_;
  std::unordered_map<int, std::string> nnames_;
  bool verify_;

  VertexId get(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) raise(Errc::unknown_vertex, "unknown vertex " + name);
    return it->second;
  }

  int nget(const std::string& name) const {
    auto it = nids_.find(name);
    if (it == nids_.end()) raise(Errc::unknown_vertex, "unknown vertex " + name);
    return it->second;
  }

  const std::string& name_of(VertexId v) const { return names_.at(v.idx); }

  static void want(const std::vector<std::string>& t, size_t lo, size_t hi) {
    if (t.size() < lo || t.size() > hi)
      throw ParseError("wrong number of arguments for '" + t[0] + "'");
  }

  void set_all_values(VertexId v, int64_t x) {
    forest_.set_reduction_value<kRSum>(v, x);
    forest_.set_reduction_value<kRMax>(v, x);
    forest_.set_reduction_value<kRMaxSum>(v, x);
    forest_.set_path_value<0>(v, x);
    forest_.change_val<kLVal>(v, x);
  }

  std::optional<std::string> run(const std::vector<std::string>& t) {
    const std::string& c = t[0];
    if (c == "vertex") {
      want(t, 2, 3);
      int64_t val = t.size() == 3 ? parse_i64(t[2]) : 0;
      if (ids_.count(t[1])) raise(Errc::duplicate_vertex, "duplicate vertex " + t[1]);
      VertexId v = forest_.create_vertex();
      cc_.init_vertex(v);
      set_all_values(v, val);
      ids_.emplace(t[1], v);
      names_.emplace(v.idx, t[1]);
      return std::nullopt;
    }
    if (c == "link") {
      want(t, 3, 4);
      double w = t.size() == 4 ? parse_f64(t[3]) : 1.0;
      cc_.cc_link(get(t[1]), get(t[2]), w);
      return std::nullopt;
    }
    if (c == "cut") {
      want(t, 2, 2);
      cc_.cc_cut(get(t[1]));
      return std::nullopt;
    }
    if (c == "condense" || c == "erase") {
      want(t, 2, 2);
      VertexId v = get(t[1]);
      if (c == "erase")
        cc_.cc_erase(v);
      else
        cc_.cc_condense(v);
      names_.erase(v.idx);
      ids_.erase(t[1]);
      return std::nullopt;
    }
    if (c == "evert") {
      want(t, 2, 2);
      cc_.cc_evert(get(t[1]));
      return std::nullopt;
    }
    if (c == "setval") {
      want(t, 3, 3);
      set_all_values(get(t[1]), parse_i64(t[2]));
      return std::nullopt;
    }
    if (c == "addpath") {
      want(t, 3, 3);
      forest_.add_to_path<kLVal>(get(t[1]), parse_i64(t[2]));
      return std::nullopt;
    }
    if (c == "addsub") {
      want(t, 3, 3);
      forest_.add_to_subtree<kLVal>(get(t[1]), parse_i64(t[2]));
      return std::nullopt;
    }
    if (c == "root") {
      want(t, 2, 2);
      return name_of(forest_.root(get(t[1])));
    }
    if (c == "parent") {
      want(t, 2, 2);
      auto p = forest_.parent(get(t[1]));
      return p ? name_of(*p) : "none";
    }
    if (c == "depth") {
      want(t, 2, 2);
      return std::to_string(forest_.depth(get(t[1])));
    }
    if (c == "size") {
      want(t, 2, 2);
      return std::to_string(forest_.subtree_size(get(t[1])));
    }
    if (c == "subsum") {
      want(t, 2, 2);
      return std::to_string(forest_.subtree_reduce<kRSum>(get(t[1])));
    }
    if (c == "submax") {
      want(t, 2, 2);
      return std::to_string(forest_.subtree_reduce<kRMax>(get(t[1])));
    }
    if (c == "maxchild") {
      want(t, 2, 2);
      return std::to_string(forest_.reduce_child_subtrees<kRMaxSum>(get(t[1])));
    }
    if (c == "degree") {
      want(t, 2, 2);
      return std::to_string(forest_.degree(get(t[1])));
    }
    if (c == "children") {
      want(t, 2, 2);
      std::string out;
      for (VertexId ch : forest_.list_children(get(t[1]))) {
        if (!out.empty()) out += ' ';
        out += name_of(ch);
      }
      return out;
    }
    if (c == "val") {
      want(t, 2, 2);
      return std::to_string(forest_.get_effective_val<kLVal>(get(t[1])));
    }
    if (c == "lca") {
      want(t, 3, 3);
      return name_of(forest_.lca(get(t[1]), get(t[2])));
    }
    if (c == "dist") {
      want(t, 3, 3);
      return fmt_num(forest_.distance(get(t[1]), get(t[2])));
    }
    if (c == "desc") {
      want(t, 3, 3);
      return forest_.is_descendant(get(t[1]), get(t[2])) ? "true" : "false";
    }
    if (c == "same") {
      want(t, 3, 3);
      return forest_.same_tree(get(t[1]), get(t[2])) ? "true" : "false";
    }
    if (c == "anc") {
      want(t, 3, 3);
      auto a = forest_.ancestor(get(t[1]), parse_i64(t[2]));
      return a ? name_of(*a) : "none";
    }
    if (c == "bc") {
      want(t, 2, 2);
      return std::to_string(cc_.betweenness(get(t[1])));
    }
    if (c == "farness") {
      want(t, 2, 2);
      return fmt_num(cc_.farness(get(t[1])));
    }
    throw ParseError("unknown forest command '" + c + "'");
  }

  std::optional<std::string> run_naive(const std::vector<std::string>& t) {
    const std::string& c = t[0];
    auto num = [](int64_t v) { return std::to_string(v); };
    if (c == "vertex") {
      int64_t val = t.size() == 3 ? parse_i64(t[2]) : 0;
      if (nids_.count(t[1])) raise(Errc::duplicate_vertex, "duplicate");
      int id = naive_.create_vertex(val);
      nids_.emplace(t[1], id);
      nnames_.emplace(id, t[1]);
      return std::nullopt;
    }
    if (c == "link") {
      naive_.link(nget(t[1]), nget(t[2]), t.size() == 4 ? parse_f64(t[3]) : 1.0);
      return std::nullopt;
    }
    if (c == "cut") {
      naive_.cut(nget(t[1]));
      return std::nullopt;
    }
    if (c == "condense" || c == "erase") {
      int v = nget(t[1]);
      if (c == "erase")
        naive_.erase(v);
      else
        naive_.condense(v);
      nids_.erase(t[1]);
      nnames_.erase(v);
      return std::nullopt;
    }
    if (c == "evert") {
      naive_.evert(nget(t[1]));
      return std::nullopt;
    }
    if (c == "setval") {
      naive_.set_value(nget(t[1]), parse_i64(t[2]));
      return std::nullopt;
    }
    if (c == "addpath") {
      naive_.add_to_path(nget(t[1]), parse_i64(t[2]));
      return std::nullopt;
    }
    if (c == "addsub") {
      naive_.add_to_subtree(nget(t[1]), parse_i64(t[2]));
      return std::nullopt;
    }
    if (c == "root") return nname(naive_.root(nget(t[1])));
    if (c == "parent") {
      auto p = naive_.parent(nget(t[1]));
      return p ? nname(*p) : "none";
    }
    if (c == "depth") return num(naive_.depth(nget(t[1])));
    if (c == "size") return num(naive_.subtree_size(nget(t[1])));
    if (c == "subsum") return num(naive_.subtree_sum(nget(t[1])));
    if (c == "submax") return num(naive_.subtree_max(nget(t[1])));
    if (c == "maxchild") return num(naive_.maxsum_child(nget(t[1])));
    if (c == "degree") return num(naive_.degree(nget(t[1])));
    if (c == "children") {
      std::string out;
      for (int ch : naive_.children(nget(t[1]))) {
        if (!out.empty()) out += ' ';
        out += nname(ch);
      }
      return out;
    }
    if (c == "val") return num(naive_.effective_value(nget(t[1])));
    if (c == "lca") return nname(naive_.lca(nget(t[1]), nget(t[2])));
    if (c == "dist") return fmt_num(naive_.distance(nget(t[1]), nget(t[2])));
    if (c == "desc") return naive_.is_descendant(nget(t[1]), nget(t[2])) ? "true" : "false";
    if (c == "same") return naive_.same_tree(nget(t[1]), nget(t[2])) ? "true" : "false";
    if (c == "anc") {
      auto a = naive_.ancestor(nget(t[1]), parse_i64(t[2]));
      return a ? nname(*a) : "none";
    }
    if (c == "bc") return num(naive_.betweenness(nget(t[1])));
    if (c == "farness") return fmt_num(naive_.farness(nget(t[1])));
    throw ParseError("unknown forest command '" + c + "'");
  }

  std::string nname(int v) const {
    auto it = nnames_.find(v);
    return it == nnames_.end() ? "?" : it->second;
  }
};

class GraphSession {
 public:
  explicit GraphSession(bool verify) : verify_(verify) {}

  std::optional<std::string> execute(const std::vector<std::string>& t) {
    std::optional<std::string> fast;
    try {
      fast = run(t);
    } catch (const Error& e) {
      fast = std::string("error: ") + to_string(e.code());
    }
    if (verify_) {
      std::optional<std::string> slow;
      try {
        slow = run_naive(t);
      } catch (const Error& e) {
        slow = std::string("error: ") + to_string(e.code());
      }
      bool ok = fast.has_value() == slow.has_value() && (!fast || *fast == *slow);
      if (!ok)
        throw VerifyError("fast='" + (fast ? *fast : "<none>") + "' oracle='" +
                          (slow ? *slow : "<none>") + "'");
    }
    return fast;
  }

 private:
  BlockForest bf_;
  oracle::NaiveGraph ng_;
  std::unordered_map<std::string, uint64_t> ids_;
  uint64_t next_ = 0;
  bool verify_;

  uint64_t get(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) raise(Errc::unknown_vertex, "unknown vertex " + name);
    return it->second;
  }

  static void want(const std::vector<std::string>& t, size_t n) {
    if (t.size() != n) throw ParseError("wrong number of arguments for '" + t[0] + "'");
  }

  std::optional<std::string> run(const std::vector<std::string>& t) {
    const std::string& c = t[0];
    if (c == "vertex") {
      want(t, 2);
      if (ids_.count(t[1])) raise(Errc::duplicate_vertex, "duplicate vertex " + t[1]);
      uint64_t id = next_++;
      bf_.add_vertex(id);
      ids_.emplace(t[1], id);
      return std::nullopt;
    }
    if (c == "edge") {
      want(t, 3);
      bf_.insert_edge(get(t[1]), get(t[2]));
      return std::nullopt;
    }
    if (c == "conn") {
      want(t, 3);
      return bf_.connected(get(t[1]), get(t[2])) ? "true" : "false";
    }
    if (c == "artic") {
      want(t, 2);
      return bf_.is_articulation(get(t[1])) ? "true" : "false";
    }
    if (c == "bridge") {
      want(t, 3);
      return bf_.is_bridge(get(t[1]), get(t[2])) ? "true" : "false";
    }
    if (c == "impact") {
      want(t, 2);
      return std::to_string(bf_.impact(get(t[1])));
    }
    if (c == "compsize") {
      want(t, 2);
      return std::to_string(bf_.component_size(get(t[1])));
    }
    throw ParseError("unknown graph command '" + c + "'");
  }

  std::optional<std::string> run_naive(const std::vector<std::string>& t) {
    const std::string& c = t[0];
    if (c == "vertex") {
      // ids_ is shared with the fast side, which ran first; on a duplicate
      // token the old id is still mapped and the oracle rejects it too.
      ng_.add_vertex(ids_.at(t[1]));
      return std::nullopt;
    }
    if (c == "edge") {
      ng_.add_edge(get(t[1]), get(t[2]));
      return std::nullopt;
    }
    if (c == "conn") return ng_.connected(get(t[1]), get(t[2])) ? "true" : "false";
    if (c == "artic") return ng_.is_articulation(get(t[1])) ? "true" : "false";
    if (c == "bridge") return ng_.is_bridge(get(t[1]), get(t[2])) ? "true" : "false";
    if (c == "impact") return std::to_string(ng_.impact(get(t[1])));
    if (c == "compsize") return std::to_string(ng_.component_size(get(t[1])));
    throw ParseError("unknown graph command '" + c + "'");
  }
};

std::vector<std::string> tokenize(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream is(body);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

int run_script(std::istream& in, std::ostream& out, const std::string& mode, bool verify) {
  std::optional<ForestSession> fs;
  std::optional<GraphSession> gs;
  if (mode == "forest")
    fs.emplace(verify);
  else
    gs.emplace(verify);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;
    try {
      auto ans = fs ? fs->execute(toks) : gs->execute(toks);
      if (ans) out << *ans << '\n';
    } catch (const ParseError& e) {
      std::cerr << "parse error at line " << lineno << ": " << e.what() << '\n';
      return 1;
    } catch (const VerifyError& e) {
      std::cerr << "verification divergence at line " << lineno << " ('" << line
                << "'): " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dfttree: dynamic forest scripts, streaming biconnectivity, benchmarks"};
  std::string mode = "forest";
  std::string bench_profile;
  std::string out_path;
  std::string script_path;
  uint64_t seed = 1;
  bool verify = false;
  app.add_option("script", script_path, "script file (default: standard input)");
  app.add_option("--mode", mode, "session mode")->check(CLI::IsMember({"forest", "graph"}));
  app.add_flag("--verify", verify, "run the reference oracle in lockstep");
  app.add_option("--seed", seed, "random seed for --bench");
  app.add_option("--bench", bench_profile, "run a benchmark profile: query|evert|mixed");
  app.add_option("--out", out_path, "write answers/report to this file");
  CLI11_PARSE(app, argc, argv);

  std::ofstream ofs;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    ofs.open(out_path);
    if (!ofs) {
      std::cerr << "cannot open " << out_path << '\n';
      return 1;
    }
    out = &ofs;
  }

  if (!bench_profile.empty()) {
    try {
      auto p = dft::bench::profile_from_name(bench_profile);
      unsigned max_exp = p == dft::bench::Profile::evert_heavy ? 14 : 17;
      auto ms = dft::bench::run_profile(p, seed, 10, max_exp);
      *out << dft::bench::render_report(p, ms);
    } catch (const dft::Error& e) {
      std::cerr << e.what() << '\n';
      return 1;
    }
    return 0;
  }

  if (!script_path.empty()) {
    std::ifstream ifs(script_path);
    if (!ifs) {
      std::cerr << "cannot open " << script_path << '\n';
      return 1;
    }
    return run_script(ifs, *out, mode, verify);
  }
  return run_script(std::cin, *out, mode, verify);
}
