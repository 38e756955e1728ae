#include "mca/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace mca {

const char *tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "<eof>";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::LParen: return "(";
    case Tok::RParen: return ")";
    case Tok::LBrace: return "{";
    case Tok::RBrace: return "}";
    case Tok::LBracket: return "[";
    case Tok::RBracket: return "]";
    case Tok::Semi: return ";";
    case Tok::Comma: return ",";
    case Tok::At: return "@";
    case Tok::Assign: return "=";
    case Tok::PlusAssign: return "+=";
    case Tok::MinusAssign: return "-=";
    case Tok::StarAssign: return "*=";
    case Tok::SlashAssign: return "/=";
    case Tok::PercentAssign: return "%=";
    case Tok::ShlAssign: return "<<=";
    case Tok::ShrAssign: return ">>=";
    case Tok::AndAssign: return "&=";
    case Tok::OrAssign: return "|=";
    case Tok::XorAssign: return "^=";
    case Tok::PlusPlus: return "++";
    case Tok::MinusMinus: return "--";
    case Tok::Plus: return "+";
    case Tok::Minus: return "-";
    case Tok::Star: return "*";
    case Tok::Slash: return "/";
    case Tok::Percent: return "%";
    case Tok::Shl: return "<<";
    case Tok::Shr: return ">>";
    case Tok::Lt: return "<";
    case Tok::Le: return "<=";
    case Tok::Gt: return ">";
    case Tok::Ge: return ">=";
    case Tok::EqEq: return "==";
    case Tok::NotEq: return "!=";
    case Tok::Amp: return "&";
    case Tok::Pipe: return "|";
    case Tok::Caret: return "^";
    case Tok::Tilde: return "~";
    case Tok::Not: return "!";
    case Tok::AndAnd: return "&&";
    case Tok::OrOr: return "||";
    case Tok::KwUint8: return "uint8";
    case Tok::KwInt8: return "int8";
    case Tok::KwUint16: return "uint16";
    case Tok::KwInt16: return "int16";
    case Tok::KwVoid: return "void";
    case Tok::KwVolatile: return "volatile";
    case Tok::KwIf: return "if";
    case Tok::KwElse: return "else";
    case Tok::KwWhile: return "while";
    case Tok::KwDo: return "do";
    case Tok::KwFor: return "for";
    case Tok::KwReturn: return "return";
    case Tok::KwBreak: return "break";
    case Tok::KwContinue: return "continue";
    case Tok::KwIsr: return "ISR";
    case Tok::KwVu8: return "vu8";
    case Tok::KwVi8: return "vi8";
    case Tok::KwVu16: return "vu16";
    case Tok::KwVi16: return "vi16";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string, Tok> kKeywords = {
    {"uint8", Tok::KwUint8},   {"int8", Tok::KwInt8},
    {"uint16", Tok::KwUint16}, {"int16", Tok::KwInt16},
    {"void", Tok::KwVoid},     {"volatile", Tok::KwVolatile},
    {"if", Tok::KwIf},         {"else", Tok::KwElse},
    {"while", Tok::KwWhile},   {"do", Tok::KwDo},
    {"for", Tok::KwFor},       {"return", Tok::KwReturn},
    {"break", Tok::KwBreak},   {"continue", Tok::KwContinue},
    {"ISR", Tok::KwIsr},       {"vu8", Tok::KwVu8},
    {"vi8", Tok::KwVi8},       {"vu16", Tok::KwVu16},
    {"vi16", Tok::KwVi16},
};

class Lexer {
 public:
  explicit Lexer(const std::string &src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLoc loc{line_, col_};
      if (at_end()) break;
      char c = peek();
      Token t;
      t.loc = loc;
      if (std::isalpha((unsigned char)c) || c == '_') {
        std::string id;
        while (!at_end() &&
               (std::isalnum((unsigned char)peek()) || peek() == '_'))
          id += advance();
        auto it = kKeywords.find(id);
        t.kind = it != kKeywords.end() ? it->second : Tok::Ident;
        t.text = std::move(id);
      } else if (std::isdigit((unsigned char)c)) {
        t.kind = Tok::IntLit;
        t.value = lex_int(loc);
      } else if (c == '\'') {
        t.kind = Tok::IntLit;
        t.value = lex_char(loc);
      } else {
        t.kind = lex_op(loc);
      }
      out.push_back(std::move(t));
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  bool match(char c) {
    if (peek() != c) return false;
    advance();
    return true;
  }

  void skip_space() {
    for (;;) {
      while (!at_end() && std::isspace((unsigned char)peek())) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
        continue;
      }
      if (peek() == '/' && peek(1) == '*') {
        SourceLoc loc{line_, col_};
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (at_end()) throw lex_error(loc, "unterminated block comment");
          advance();
        }
        advance();
        advance();
        continue;
      }
      break;
    }
  }

  int64_t lex_int(SourceLoc loc) {
    int64_t v = 0;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      if (!std::isxdigit((unsigned char)peek()))
        throw lex_error(loc, "expected hex digits after 0x");
      while (std::isxdigit((unsigned char)peek())) {
        char c = advance();
        int d = std::isdigit((unsigned char)c) ? c - '0'
                                               : std::tolower(c) - 'a' + 10;
        v = v * 16 + d;
        if (v > INT64_MAX / 32) throw lex_error(loc, "integer literal too large");
      }
    } else {
      while (std::isdigit((unsigned char)peek())) {
        v = v * 10 + (advance() - '0');
        if (v > INT64_MAX / 32) throw lex_error(loc, "integer literal too large");
      }
    }
    if (std::isalpha((unsigned char)peek()) || peek() == '_')
      throw lex_error(loc, "malformed integer literal");
    return v;
  }

  int64_t lex_char(SourceLoc loc) {
    advance();  // opening quote
    if (at_end()) throw lex_error(loc, "unterminated character literal");
    char c = advance();
    if (c == '\\') {
      if (at_end()) throw lex_error(loc, "unterminated character literal");
      char e = advance();
      switch (e) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case 'r': c = '\r'; break;
        case '0': c = '\0'; break;
        case '\\': c = '\\'; break;
        case '\'': c = '\''; break;
        default:
          throw lex_error(loc, std::string("unknown escape '\\") + e + "'");
      }
    }
    if (!match('\''))
      throw lex_error(loc, "unterminated character literal");
    return (unsigned char)c;
  }

  Tok lex_op(SourceLoc loc) {
    char c = advance();
    switch (c) {
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case '{': return Tok::LBrace;
      case '}': return Tok::RBrace;
      case '[': return Tok::LBracket;
      case ']': return Tok::RBracket;
      case ';': return Tok::Semi;
      case ',': return Tok::Comma;
      case '@': return Tok::At;
      case '~': return Tok::Tilde;
      case '+':
        if (match('+')) return Tok::PlusPlus;
        if (match('=')) return Tok::PlusAssign;
        return Tok::Plus;
      case '-':
        if (match('-')) return Tok::MinusMinus;
        if (match('=')) return Tok::MinusAssign;
        return Tok::Minus;
      case '*': return match('=') ? Tok::StarAssign : Tok::Star;
      case '/': return match('=') ? Tok::SlashAssign : Tok::Slash;
      case '%': return match('=') ? Tok::PercentAssign : Tok::Percent;
      case '=': return match('=') ? Tok::EqEq : Tok::Assign;
      case '!': return match('=') ? Tok::NotEq : Tok::Not;
      case '^': return match('=') ? Tok::XorAssign : Tok::Caret;
      case '&':
        if (match('&')) return Tok::AndAnd;
        if (match('=')) return Tok::AndAssign;
        return Tok::Amp;
      case '|':
        if (match('|')) return Tok::OrOr;
        if (match('=')) return Tok::OrAssign;
        return Tok::Pipe;
      case '<':
        if (match('<')) return match('=') ? Tok::ShlAssign : Tok::Shl;
        if (match('=')) return Tok::Le;
        return Tok::Lt;
      case '>':
        if (match('>')) return match('=') ? Tok::ShrAssign : Tok::Shr;
        if (match('=')) return Tok::Ge;
        return Tok::Gt;
      default:
        throw lex_error(loc, std::string("illegal character '") + c + "'");
    }
  }

  const std::string &src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(const std::string &source) {
  return Lexer(source).run();
}

}  // namespace mca
