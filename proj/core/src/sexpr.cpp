#include "normguard/sexpr.hpp"

#include <cctype>

namespace normguard {
namespace {

bool is_symbol_char(char c) {
  return c != '(' && c != ')' && c != ';' && !std::isspace(static_cast<unsigned char>(c));
}

struct Reader {
  std::string_view text;
  std::size_t at = 0;

  void skip_blanks() {
    while (at < text.size()) {
      char c = text[at];
      if (c == ';') {
        while (at < text.size() && text[at] != '\n') ++at;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++at;
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_blanks();
    return at >= text.size();
  }

  SExpr read() {
    skip_blanks();
    if (at >= text.size()) throw ParseError("unexpected end of input", at);
    const std::size_t start = at;
    char c = text[at];
    if (c == ')') throw ParseError("unbalanced ')'", at);
    if (c == '(') {
      ++at;
      std::vector<SExpr> items;
      while (true) {
        skip_blanks();
        if (at >= text.size()) throw ParseError("unterminated list", start);
        if (text[at] == ')') {
          ++at;
          break;
        }
        items.push_back(read());
      }
      if (items.empty()) throw ParseError("empty list", start);
      return SExpr::make_list(std::move(items), start);
    }
    std::size_t end = at;
    while (end < text.size() && is_symbol_char(text[end])) ++end;
    SExpr s = SExpr::make_symbol(std::string(text.substr(at, end - at)), start);
    at = end;
    return s;
  }
};

}  // namespace

SExpr SExpr::make_symbol(std::string s, std::size_t pos) {
  SExpr e;
  e.list = false;
  e.symbol = std::move(s);
  e.pos = pos;
  return e;
}

SExpr SExpr::make_list(std::vector<SExpr> items, std::size_t pos) {
  SExpr e;
  e.list = true;
  e.items = std::move(items);
  e.pos = pos;
  return e;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Reader r{text};
  std::vector<SExpr> out;
  while (!r.done()) out.push_back(r.read());
  return out;
}

SExpr parse_sexpr(std::string_view text) {
  Reader r{text};
  SExpr e = r.read();
  if (!r.done()) throw ParseError("trailing content after form", r.at);
  return e;
}

std::string to_string(const SExpr& e) {
  if (e.is_symbol()) return e.symbol;
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(e.items[i]);
  }
  out += ')';
  return out;
}

}  // namespace normguard
