#pragma once

#include <stdexcept>
#include <string>

namespace dft {

enum class Errc {
  unknown_vertex,
  duplicate_vertex,
  stale_handle,
  same_tree,
  not_root,
  different_trees,
  different_sequences,
  self_loop,
  not_supported,
  undefined_value,
  overflow,
  bad_input,
};

inline const char* to_string(Errc c) noexcept {
  switch (c) {
    case Errc::unknown_vertex: return "unknown-vertex";
    case Errc::duplicate_vertex: return "duplicate-vertex";
    case Errc::stale_handle: return "stale-handle";
    case Errc::same_tree: return "same-tree";
    case Errc::not_root: return "not-root";
    case Errc::different_trees: return "different-trees";
    case Errc::different_sequences: return "different-sequences";
    case Errc::self_loop: return "self-loop";
    case Errc::not_supported: return "not-supported";
    case Errc::undefined_value: return "undefined-value";
    case Errc::overflow: return "overflow";
    case Errc::bad_input: return "bad-input";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace dft
