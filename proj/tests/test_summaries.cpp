#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dft/oracle.hpp"
#include "dft/summaries.hpp"

using namespace dft;
using oracle::Op;
using oracle::SeqItem;

namespace {

DepthSummary dep_elem(bool open) { return open ? DepthSummary{0, 1} : DepthSummary{-1, 0}; }

LcaSummary lca_elem(bool open, uint32_t pos) {
  return open ? LcaSummary{{0, 1}, kNoNode} : LcaSummary{{-1, 0}, pos};
}

DepthSummary dep_fold(const std::vector<SeqItem>& it, size_t lo, size_t hi) {
  DepthSummary acc{};
  for (size_t i = lo; i < hi; ++i) acc = concat(acc, dep_elem(it[i].open));
  return acc;
}

LcaSummary lca_fold(const std::vector<SeqItem>& it, size_t lo, size_t hi) {
  LcaSummary acc{};
  for (size_t i = lo; i < hi; ++i)
    acc = concat(acc, lca_elem(it[i].open, static_cast<uint32_t>(i)));
  return acc;
}

template <class P>
RcSummary<int64_t> rc_fold(const std::vector<SeqItem>& it, size_t lo, size_t hi) {
  auto acc = rc_identity<int64_t, P>();
  for (size_t i = lo; i < hi; ++i) {
    auto e = it[i].open ? rc_open<int64_t, P>(it[i].val) : rc_close<int64_t, P>();
    acc = concat_rc<int64_t, P>(acc, e);
  }
  return acc;
}

template <class P, class T>
RcsSummary<int64_t> rcs_fold(const std::vector<SeqItem>& it, size_t lo, size_t hi) {
  auto acc = rcs_identity<int64_t, P, T>();
  for (size_t i = lo; i < hi; ++i) {
    auto e = it[i].open ? rcs_open<int64_t, P, T>(it[i].val) : rcs_close<int64_t, P, T>();
    acc = concat_rcs<int64_t, P, T>(acc, e);
  }
  return acc;
}

std::vector<SeqItem> items_from_mask(unsigned len, unsigned mask) {
  std::vector<SeqItem> out(len);
  for (unsigned i = 0; i < len; ++i) {
    out[i].open = (mask >> i) & 1;
    out[i].val = static_cast<int64_t>((i * 5) % 11) - 3;
  }
  return out;
}

std::vector<SeqItem> parse_seq(const char* s) {
  std::vector<SeqItem> out;
  int64_t v = 1;
  for (const char* p = s; *p; ++p) out.push_back({*p == '(', v++});
  return out;
}

std::vector<SeqItem> random_items(std::mt19937_64& rng, size_t len) {
  std::vector<SeqItem> out(len);
  for (auto& it : out) {
    it.open = rng() % 2;
    it.val = static_cast<int64_t>(rng() % 19) - 9;
  }
  return out;
}

}  // namespace

TEST_CASE("depth summary concatenation") {
  CHECK(concat(DepthSummary{0, 2}, DepthSummary{-1, 0}) == DepthSummary{0, 1});
  CHECK(concat(DepthSummary{0, 1}, DepthSummary{-1, 0}) == DepthSummary{0, 0});
  CHECK(concat(DepthSummary{-1, 0}, DepthSummary{-1, 0}) == DepthSummary{-2, 0});
  // a sequence whose first four parentheses summarize to (0,2) and whose
  // whole fold is (-1,3)
  auto it = parse_seq("(()()))(((");
  CHECK(dep_fold(it, 0, 4) == DepthSummary{0, 2});
  CHECK(dep_fold(it, 0, it.size()) == DepthSummary{-1, 3});
  CHECK(dep_fold(it, 0, it.size()) == oracle::depth_summary_of(it));
}

TEST_CASE("balanced iff summary is (0,0)") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 2000; ++round) {
    auto it = random_items(rng, 1 + rng() % 12);
    DepthSummary s = dep_fold(it, 0, it.size());
    int32_t depth = 0;
    bool balanced = true;
    for (auto& x : it) {
      depth += x.open ? 1 : -1;
      if (depth < 0) balanced = false;
    }
    balanced = balanced && depth == 0;
    CHECK(balanced == (s == DepthSummary{0, 0}));
  }
}

TEST_CASE("prefix down-values decrease monotonically") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    auto it = random_items(rng, 1 + rng() % 16);
    int32_t prev = 0;
    for (size_t i = 1; i <= it.size(); ++i) {
      int32_t down = dep_fold(it, 0, i).down;
      CHECK(down <= prev);
      prev = down;
    }
  }
}

TEST_CASE("lca summary elements and small cases") {
  // a close-node singleton wins the minimum immediately
  auto a = lca_elem(false, 5);
  auto b = lca_elem(true, 6);
  CHECK(concat(a, b).min_node == 5);
  // all-open ranges have no minimum handle
  CHECK(concat(b, lca_elem(true, 7)).min_node == kNoNode);
  // ")(": the close reaches -1, the open only returns towards 0
  CHECK(concat(lca_elem(false, 0), lca_elem(true, 1)).min_node == 0);
}

TEST_CASE("lca summary fold matches leftmost-minimum scan") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 4000; ++round) {
    auto it = random_items(rng, 1 + rng() % 14);
    LcaSummary s = lca_fold(it, 0, it.size());
    int32_t want = oracle::leftmost_min_index(it);
    CHECK(s.s == oracle::depth_summary_of(it));
    CHECK((s.min_node == kNoNode ? -1 : static_cast<int32_t>(s.min_node)) == want);
  }
}

TEST_CASE("rc summary: spec cases") {
  using P = Plus<int64_t>;
  // "(x" then ")" closes one subtree, body gains val(x)
  auto a = rc_fold<P>(parse_seq("("), 0, 1);
  auto b = rc_fold<P>(parse_seq(")"), 0, 1);
  auto ab = concat_rc<int64_t, P>(a, b);
  CHECK(ab.body == 1);
  CHECK(ab.suffix_depth == 0);
  // identity element
  auto any = rc_fold<P>(parse_seq(")()(("), 0, 5);
  CHECK(concat_rc<int64_t, P>(rc_identity<int64_t, P>(), any) == any);
  CHECK(concat_rc<int64_t, P>(any, rc_identity<int64_t, P>()) == any);
}

TEST_CASE("rcs summary: spec cases") {
  using P = Plus<int64_t>;
  using T = Plus<int64_t>;
  // "(())" with unit values, plus/plus: one subtree of sigma 2
  std::vector<SeqItem> it = {{true, 1}, {true, 1}, {false, 1}, {false, 1}};
  CHECK(rcs_fold<P, T>(it, 0, 4).body_times == 2);
  // "()" # "()" with times = max over unit values
  std::vector<SeqItem> two = {{true, 1}, {false, 1}, {true, 1}, {false, 1}};
  CHECK(rcs_fold<P, Max<int64_t>>(two, 0, 4).body_times == 1);
}

TEST_CASE("paper decomposition examples") {
  // ")()((" style examples: prefix/body/suffix pieces as documented
  auto s1 = oracle::rc_summary_of(parse_seq(")()(()"), Op::plus);
  CHECK(s1.prefix_depth == -1);
  CHECK(s1.body == 2);          // the "()" root is item 2
  CHECK(s1.suffix_depth == 1);  // "(()" ends one above the minimum
  CHECK(s1.has_suffix);
  CHECK(s1.suffix_info == 4);

  auto s2 = oracle::rc_summary_of(parse_seq(")())"), Op::plus);
  CHECK(s2.prefix_depth == -2);
  CHECK(s2.body == 0);
  CHECK_FALSE(s2.has_suffix);

  auto s3 = oracle::rc_summary_of(parse_seq("))("), Op::plus);
  CHECK(s3.prefix_depth == -2);
  CHECK(s3.body == 0);
  CHECK(s3.has_suffix);
  CHECK(s3.suffix_info == 3);

  auto s4 = oracle::rc_summary_of(parse_seq("(()"), Op::plus);
  CHECK(s4.prefix_depth == 0);
  CHECK(s4.body == 0);
  CHECK(s4.suffix_info == 1);

  auto s5 = oracle::rc_summary_of(parse_seq("(()())"), Op::plus);
  CHECK(s5.prefix_depth == 0);
  CHECK(s5.body == 1);
  CHECK_FALSE(s5.has_suffix);
}

template <class P>
void check_rc_exhaustive(Op op) {
  for (unsigned len = 1; len <= 8; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      auto it = items_from_mask(len, mask);
      auto whole = rc_fold<P>(it, 0, len);
      auto want = oracle::rc_summary_of(it, op);
      REQUIRE(whole == want);
      // every split point: concatenating the two directly recomputed halves
      // reproduces the whole
      for (unsigned cut = 0; cut <= len; ++cut) {
        std::vector<SeqItem> l(it.begin(), it.begin() + cut), r(it.begin() + cut, it.end());
        auto got = concat_rc<int64_t, P>(oracle::rc_summary_of(l, op), oracle::rc_summary_of(r, op));
        REQUIRE(got == want);
      }
    }
  }
}

template <class P, class T>
void check_rcs_exhaustive(Op op, Op ot) {
  for (unsigned len = 1; len <= 8; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      auto it = items_from_mask(len, mask);
      auto whole = rcs_fold<P, T>(it, 0, len);
      auto want = oracle::rcs_summary_of(it, op, ot);
      REQUIRE(whole == want);
      for (unsigned cut = 0; cut <= len; ++cut) {
        std::vector<SeqItem> l(it.begin(), it.begin() + cut), r(it.begin() + cut, it.end());
        auto got = concat_rcs<int64_t, P, T>(oracle::rcs_summary_of(l, op, ot),
                                             oracle::rcs_summary_of(r, op, ot));
        REQUIRE(got == want);
      }
    }
  }
}

TEST_CASE("rc fold equals decomposition oracle, all sequences of length <= 8") {
  check_rc_exhaustive<Plus<int64_t>>(Op::plus);
  check_rc_exhaustive<Max<int64_t>>(Op::max);
}

TEST_CASE("rcs fold equals decomposition oracle, all sequences of length <= 8") {
  check_rcs_exhaustive<Plus<int64_t>, Plus<int64_t>>(Op::plus, Op::plus);
  check_rcs_exhaustive<Plus<int64_t>, Max<int64_t>>(Op::plus, Op::max);
  check_rcs_exhaustive<Max<int64_t>, Plus<int64_t>>(Op::max, Op::plus);
  check_rcs_exhaustive<Max<int64_t>, Max<int64_t>>(Op::max, Op::max);
}

TEST_CASE("summary concatenation is associative on sequence-derived triples") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 3000; ++round) {
    auto it = random_items(rng, 3 + rng() % 12);
    size_t c1 = 1 + rng() % (it.size() - 2);
    size_t c2 = c1 + 1 + rng() % (it.size() - c1 - 1);

    auto dl = dep_fold(it, 0, c1), dm = dep_fold(it, c1, c2), dr = dep_fold(it, c2, it.size());
    CHECK(concat(concat(dl, dm), dr) == concat(dl, concat(dm, dr)));

    auto ll = lca_fold(it, 0, c1), lm = lca_fold(it, c1, c2), lr = lca_fold(it, c2, it.size());
    CHECK(concat(concat(ll, lm), lr) == concat(ll, concat(lm, lr)));

    using P = Plus<int64_t>;
    using M = Max<int64_t>;
    auto rl = rc_fold<P>(it, 0, c1), rm = rc_fold<P>(it, c1, c2), rr = rc_fold<P>(it, c2, it.size());
    CHECK(concat_rc<int64_t, P>(concat_rc<int64_t, P>(rl, rm), rr) ==
          concat_rc<int64_t, P>(rl, concat_rc<int64_t, P>(rm, rr)));

    auto sl = rcs_fold<P, M>(it, 0, c1), sm = rcs_fold<P, M>(it, c1, c2),
         sr = rcs_fold<P, M>(it, c2, it.size());
    CHECK(concat_rcs<int64_t, P, M>(concat_rcs<int64_t, P, M>(sl, sm), sr) ==
          concat_rcs<int64_t, P, M>(sl, concat_rcs<int64_t, P, M>(sm, sr)));
  }
}
