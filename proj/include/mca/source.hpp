#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mca {

struct SourceLoc {
  int line = 0;  // 1-based; 0 = unknown
  int col = 0;

  bool valid() const { return line > 0; }
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
  friend bool operator==(const SourceLoc &, const SourceLoc &) = default;
};

inline bool loc_less(const SourceLoc &a, const SourceLoc &b) {
  if (a.line != b.line) return a.line < b.line;
  return a.col < b.col;
}

// User-input failures (lexing, parsing, resolution, hardware spec files).
// Internal invariant violations use assert instead.
class Diag : public std::runtime_error {
 public:
  Diag(std::string kind, SourceLoc loc, const std::string &msg)
      : std::runtime_error(loc.valid() ? loc.str() + ": " + kind + ": " + msg
                                       : kind + ": " + msg),
        kind_(std::move(kind)), loc_(loc) {}

  const std::string &kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  std::string kind_;
  SourceLoc loc_;
};

inline Diag lex_error(SourceLoc loc, const std::string &msg) {
  return Diag("LexError", loc, msg);
}
inline Diag parse_error(SourceLoc loc, const std::string &msg) {
  return Diag("ParseError", loc, msg);
}
inline Diag resolve_error(const std::string &kind, SourceLoc loc,
                          const std::string &msg) {
  return Diag(kind, loc, msg);
}
inline Diag spec_error(const std::string &msg) {
  return Diag("SpecError", SourceLoc{}, msg);
}

}  // namespace mca
