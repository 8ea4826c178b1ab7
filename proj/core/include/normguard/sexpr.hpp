#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "normguard/errors.hpp"

namespace normguard {

/// Minimal s-expression node: either a bare symbol or a list of nodes.
/// `pos` is the byte offset of the node's first character in the source,
/// kept so loaders can report where a malformed form came from.
struct SExpr {
  bool list = false;
  std::string symbol;
  std::vector<SExpr> items;
  std::size_t pos = 0;

  bool is_symbol() const { return !list; }
  bool is_list() const { return list; }

  /// Head symbol of a list, or empty when not applicable.
  std::string_view head() const {
    if (!list || items.empty() || !items.front().is_symbol()) return {};
    return items.front().symbol;
  }

  static SExpr make_symbol(std::string s, std::size_t pos = 0);
  static SExpr make_list(std::vector<SExpr> items, std::size_t pos = 0);
};

/// Parses a whole document into top-level forms.  `;` starts a comment that
/// runs to end of line.  Throws ParseError on unbalanced or empty input forms.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Parses exactly one form (trailing whitespace/comments allowed).
SExpr parse_sexpr(std::string_view text);

std::string to_string(const SExpr& e);

}  // namespace normguard
