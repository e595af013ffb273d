#pragma once

#include <cstdint>
#include <limits>

namespace dft {

template <class T>
struct Plus {
  using Value = T;
  static constexpr T identity() { return T{}; }
  static constexpr T combine(T a, T b) { return a + b; }
  static constexpr T invert(T a) { return -a; }
};

template <class T>
struct Max {
  using Value = T;
  static constexpr T identity() { return std::numeric_limits<T>::lowest(); }
  static constexpr T combine(T a, T b) { return a < b ? b : a; }
};

// Pair (s, q) where q tracks the square of s for values merged within one
// subtree. Used by betweenness centrality: folding unit values (1, 1) over a
// subtree yields (size, size^2).
struct SizeSquare {
  int64_t s = 0;
  int64_t q = 0;
  friend bool operator==(const SizeSquare&, const SizeSquare&) = default;
};

// (a, a^2) # (b, b^2) = (a + b, (a + b)^2). Associative; the q components of
// the operands are discarded, which keeps the (x, x^2) invariant on any fold
// of well-formed values.
struct SizeSquareMerge {
  using Value = SizeSquare;
  static constexpr SizeSquare identity() { return {0, 0}; }
  static constexpr SizeSquare combine(SizeSquare a, SizeSquare b) {
    int64_t s = a.s + b.s;
    return {s, s * s};
  }
};

// Componentwise vector sum, used to accumulate per-subtree (size, size^2)
// values across siblings.
struct SizeSquareAdd {
  using Value = SizeSquare;
  static constexpr SizeSquare identity() { return {0, 0}; }
  static constexpr SizeSquare combine(SizeSquare a, SizeSquare b) { return {a.s + b.s, a.q + b.q}; }
};

}  // namespace dft
