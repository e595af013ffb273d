#pragma once

#include <cstdint>

#include "dft/ops.hpp"

namespace dft {

inline constexpr uint32_t kNoNode = 0xffffffffu;

// Summary of a parenthesis range: `down` is min(0, minimum depth reached by
// any element of the range), `up` is the final depth minus `down`.
// A single '(' is (0, 1), a single ')' is (-1, 0); a balanced range is (0, 0).
struct DepthSummary {
  int32_t down = 0;  // <= 0
  int32_t up = 0;    // >= 0
  constexpr int32_t final_depth() const { return down + up; }
  friend bool operator==(const DepthSummary&, const DepthSummary&) = default;
};

inline constexpr DepthSummary concat(DepthSummary a, DepthSummary b) {
  if (a.up + b.down >= 0) return {a.down, a.up + b.down + b.up};
  return {a.down + a.up + b.down, b.up};
}

// DepthSummary plus the leftmost node of the range whose depth equals the
// summary's down-value. Absent (kNoNode) exactly when every depth in the
// range is strictly positive.
struct LcaSummary {
  DepthSummary s;
  uint32_t min_node = kNoNode;
  friend bool operator==(const LcaSummary&, const LcaSummary&) = default;
};

inline constexpr LcaSummary concat(LcaSummary a, LcaSummary b) {
  LcaSummary r{concat(a.s, b.s), a.min_node};
  if (a.s.up + b.s.down >= 0) {
    // Combined minimum is a's down-value. If a never dips to it (all of a is
    // strictly positive) the minimum can only be realized inside b, and only
    // when b's deepest element lands exactly on depth zero.
    if (r.min_node == kNoNode && a.s.up + b.s.down == 0) r.min_node = b.min_node;
  } else {
    r.min_node = b.min_node;
  }
  return r;
}

// Range annotation for reduce-children. The unique prefix/body/suffix
// decomposition of a parenthesis range puts every complete top-level subtree
// in the body; `body` is the P-fold of the values of those subtree roots.
// `suffix_info` is the value of the first suffix node (the first open
// parenthesis of the range that is never closed inside it).
template <class V>
struct RcSummary {
  int32_t prefix_depth = 0;  // <= 0, the down-value of the range
  V body{};
  int32_t suffix_depth = 0;  // >= 0, the up-value of the range
  bool has_suffix = false;
  V suffix_info{};
  friend bool operator==(const RcSummary&, const RcSummary&) = default;
};

template <class V, class P>
constexpr RcSummary<V> rc_identity() {
  return {0, P::identity(), 0, false, P::identity()};
}

template <class V, class P>
constexpr RcSummary<V> rc_open(V val) {
  return {0, P::identity(), 1, true, val};
}

template <class V, class P>
constexpr RcSummary<V> rc_close() {
  return {-1, P::identity(), 0, false, P::identity()};
}

template <class V, class P>
constexpr RcSummary<V> concat_rc(const RcSummary<V>& a, const RcSummary<V>& b) {
  int32_t d = a.suffix_depth + b.prefix_depth;
  if (d > 0) {
    // b closes part of a's suffix but the first suffix subtree stays open.
    return {a.prefix_depth, a.body, d + b.suffix_depth, a.has_suffix, a.suffix_info};
  }
  if (d < 0) {
    // b's prefix dips below a's minimum; a's body and suffix fold into the
    // combined prefix.
    return {a.prefix_depth + d, b.body, b.suffix_depth, b.has_suffix, b.suffix_info};
  }
  // b's prefix closes a's suffix exactly: the first suffix node becomes a new
  // complete top-level subtree whose root value joins the body.
  V body = P::combine(P::combine(b.body, a.body), a.has_suffix ? a.suffix_info : P::identity());
  return {a.prefix_depth, body, b.suffix_depth, b.has_suffix, b.suffix_info};
}

// Range annotation for reduce-child-subtrees. Region P-folds run over open
// parentheses only, so the fold of a complete subtree's range sees each
// vertex exactly once; `body_times` is the T-fold of those per-subtree
// P-folds (the Sigma values) across the body's top-level subtrees.
template <class V>
struct RcsSummary {
  int32_t prefix_depth = 0;
  V prefix_plus{};
  V body_plus{};
  V body_times{};
  V suffix_plus{};
  int32_t suffix_depth = 0;
  friend bool operator==(const RcsSummary&, const RcsSummary&) = default;
};

template <class V, class P, class T>
constexpr RcsSummary<V> rcs_identity() {
  return {0, P::identity(), P::identity(), T::identity(), P::identity(), 0};
}

template <class V, class P, class T>
constexpr RcsSummary<V> rcs_open(V val) {
  return {0, P::identity(), P::identity(), T::identity(), val, 1};
}

template <class V, class P, class T>
constexpr RcsSummary<V> rcs_close() {
  return {-1, P::identity(), P::identity(), T::identity(), P::identity(), 0};
}

template <class V, class P, class T>
constexpr RcsSummary<V> concat_rcs(const RcsSummary<V>& a, const RcsSummary<V>& b) {
  int32_t d = a.suffix_depth + b.prefix_depth;
  if (d > 0) {
    V suffix = P::combine(P::combine(a.suffix_plus, b.prefix_plus),
                          P::combine(b.body_plus, b.suffix_plus));
    return {a.prefix_depth, a.prefix_plus, a.body_plus, a.body_times, suffix, d + b.suffix_depth};
  }
  if (d < 0) {
    V prefix = P::combine(P::combine(a.prefix_plus, a.body_plus),
                          P::combine(a.suffix_plus, b.prefix_plus));
    return {a.prefix_depth + d, prefix, b.body_plus, b.body_times, b.suffix_plus, b.suffix_depth};
  }
  // a's suffix is closed exactly by b's prefix. Their union is one complete
  // subtree whose Sigma is the P-fold of both regions; it joins body_times
  // only when the suffix was non-empty.
  V sigma = P::combine(a.suffix_plus, b.prefix_plus);
  V body_plus = P::combine(P::combine(a.body_plus, sigma), b.body_plus);
  V body_times = a.suffix_depth > 0
                     ? T::combine(T::combine(a.body_times, sigma), b.body_times)
                     : T::combine(a.body_times, b.body_times);
  return {a.prefix_depth, a.prefix_plus, body_plus, body_times, b.suffix_plus, b.suffix_depth};
}

}  // namespace dft
