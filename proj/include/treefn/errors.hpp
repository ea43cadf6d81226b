#pragma once

#include <stdexcept>
#include <string>

namespace treefn {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed textual input; `position` is a 0-based offset into the input.
struct parse_error : error {
  parse_error(const std::string& what, size_t position)
      : error(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  size_t position;
};

/// A precondition on arguments does not hold (arity mismatch, bad index, ...).
struct domain_error : error {
  using error::error;
};

/// An operation was asked to exceed its configured size limit.
struct limit_error : error {
  using error::error;
};

/// The function is provably not implementable on the given tree.
struct not_representable : error {
  using error::error;
};

/// A claimed function space fails the structural checks of reconstruction.
struct inconsistent_space : error {
  using error::error;
};

}  // namespace treefn
