#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mca/source.hpp"

namespace mca {

enum class Tok : uint8_t {
  End,
  Ident,
  IntLit,
  // punctuation / operators
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Semi, Comma, At,
  Assign,          // =
  PlusAssign, MinusAssign, StarAssign, SlashAssign, PercentAssign,
  ShlAssign, ShrAssign, AndAssign, OrAssign, XorAssign,
  PlusPlus, MinusMinus,
  Plus, Minus, Star, Slash, Percent,
  Shl, Shr,
  Lt, Le, Gt, Ge, EqEq, NotEq,
  Amp, Pipe, Caret, Tilde, Not,
  AndAnd, OrOr,
  // keywords
  KwUint8, KwInt8, KwUint16, KwInt16, KwVoid, KwVolatile,
  KwIf, KwElse, KwWhile, KwDo, KwFor, KwReturn, KwBreak, KwContinue,
  KwIsr,
  KwVu8, KwVi8, KwVu16, KwVi16,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;     // identifier spelling
  int64_t value = 0;    // integer literal value
  SourceLoc loc;
};

const char *tok_name(Tok t);

}  // namespace mca
