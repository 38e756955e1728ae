#include "mca/parser.hpp"

#include <cassert>

#include "mca/lexer.hpp"

namespace mca {

const char *un_op_str(UnOp op) {
  switch (op) {
    case UnOp::Neg: return "-";
    case UnOp::Not: return "!";
    case UnOp::BitNot: return "~";
  }
  return "?";
}

const char *bin_op_str(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::BitOr: return "|";
    case BinOp::BitAnd: return "&";
    case BinOp::BitXor: return "^";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
  }
  return "?";
}

ExprPtr clone_expr(const Expr &e) {
  auto out = std::make_unique<Expr>(e.kind, e.loc);
  out->type = e.type;
  out->value = e.value;
  out->name = e.name;
  out->un_op = e.un_op;
  out->bin_op = e.bin_op;
  out->logic_op = e.logic_op;
  out->sugar = e.sugar;
  out->cast_base = e.cast_base;
  out->decl = e.decl;
  out->callee = e.callee;
  for (auto &k : e.kids) out->kids.push_back(clone_expr(*k));
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program prog;
    while (!at(Tok::End)) {
      if (at(Tok::KwIsr)) {
        prog.isrs.push_back(parse_isr());
      } else {
        parse_global_or_function(prog);
      }
    }
    return prog;
  }

 private:
  const Token &cur() const {
    static Token eof;
    return pos_ < toks_.size() ? toks_[pos_] : eof;
  }
  const Token &peek(size_t ahead) const {
    static Token eof;
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof;
  }
  bool at(Tok k) const { return cur().kind == k; }
  Token advance() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok k, const char *what) {
    if (!at(k))
      throw parse_error(cur().loc, std::string("expected ") + tok_name(k) +
                                       " (" + what + "), got '" +
                                       tok_name(cur().kind) + "'");
    return advance();
  }

  bool at_base_type() const {
    switch (cur().kind) {
      case Tok::KwUint8:
      case Tok::KwInt8:
      case Tok::KwUint16:
      case Tok::KwInt16:
        return true;
      default:
        return false;
    }
  }

  Base parse_base_type() {
    switch (cur().kind) {
      case Tok::KwUint8: advance(); return Base::U8;
      case Tok::KwInt8: advance(); return Base::I8;
      case Tok::KwUint16: advance(); return Base::U16;
      case Tok::KwInt16: advance(); return Base::I16;
      default:
        throw parse_error(cur().loc, "expected a type name");
    }
  }

  int64_t parse_const_int() {
    bool neg = accept(Tok::Minus);
    Token t = expect(Tok::IntLit, "constant");
    return neg ? -t.value : t.value;
  }

  std::unique_ptr<FunctionDef> parse_isr() {
    SourceLoc loc = cur().loc;
    expect(Tok::KwIsr, "ISR");
    expect(Tok::LParen, "ISR vector");
    Token vec = expect(Tok::Ident, "ISR vector name");
    expect(Tok::RParen, "ISR vector");
    auto fn = std::make_unique<FunctionDef>();
    fn->name = vec.text;
    fn->return_type = CType::void_type();
    fn->is_isr = true;
    fn->loc = loc;
    fn->body = parse_block();
    return fn;
  }

  void parse_global_or_function(Program &prog) {
    SourceLoc loc = cur().loc;
    bool vol = accept(Tok::KwVolatile);
    if (at(Tok::KwVoid)) {
      advance();
      if (vol) throw parse_error(loc, "volatile void is not a type");
      prog.functions.push_back(parse_function(CType::void_type(), loc));
      return;
    }
    Base base = parse_base_type();
    bool ptr = accept(Tok::Star);
    Token name = expect(Tok::Ident, "declaration name");
    if (!ptr && at(Tok::LParen)) {
      if (vol)
        throw parse_error(loc, "volatile is not valid on a function");
      auto fn = parse_function(CType::scalar(base), loc);
      fn->name = name.text;
      prog.functions.push_back(std::move(fn));
      return;
    }
    // global variable
    auto d = std::make_unique<VarDecl>();
    d->loc = loc;
    d->name = name.text;
    d->is_volatile = vol;
    d->storage = Storage::Global;
    if (ptr) {
      d->ctype = CType::pointer(base);
    } else if (accept(Tok::LBracket)) {
      Token len = expect(Tok::IntLit, "array length");
      if (len.value <= 0)
        throw parse_error(len.loc, "array length must be positive");
      expect(Tok::RBracket, "array length");
      d->ctype = CType::array(base, len.value);
    } else {
      d->ctype = CType::scalar(base);
    }
    if (accept(Tok::At)) {
      Token addr = expect(Tok::IntLit, "absolute address");
      d->absolute_address = addr.value;
    }
    if (accept(Tok::Assign)) {
      if (d->ctype.is_array)
        throw parse_error(cur().loc, "array initializers are not supported");
      d->init_value = parse_const_int();
    }
    expect(Tok::Semi, "global declaration");
    prog.globals.push_back(std::move(d));
  }

  std::unique_ptr<FunctionDef> parse_function(CType ret, SourceLoc loc) {
    // Caller consumed the return type; for non-void the name too.
    auto fn = std::make_unique<FunctionDef>();
    fn->return_type = ret;
    fn->loc = loc;
    if (ret.is_void()) {
      Token name = expect(Tok::Ident, "function name");
      fn->name = name.text;
    }
    expect(Tok::LParen, "parameter list");
    if (!at(Tok::RParen)) {
      do {
        Base base = parse_base_type();
        bool ptr = accept(Tok::Star);
        Token pname = expect(Tok::Ident, "parameter name");
        auto p = std::make_unique<VarDecl>();
        p->loc = pname.loc;
        p->name = pname.text;
        p->ctype = ptr ? CType::pointer(base) : CType::scalar(base);
        p->storage = Storage::Param;
        fn->params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "parameter list");
    fn->body = parse_block();
    return fn;
  }

  StmtPtr parse_block() {
    SourceLoc loc = cur().loc;
    expect(Tok::LBrace, "block");
    auto blk = std::make_unique<Stmt>(StmtKind::Block, loc);
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) throw parse_error(loc, "unterminated block");
      blk->body.push_back(parse_stmt());
    }
    expect(Tok::RBrace, "block");
    return blk;
  }

  StmtPtr parse_stmt() {
    SourceLoc loc = cur().loc;
    switch (cur().kind) {
      case Tok::LBrace:
        return parse_block();
      case Tok::Semi: {
        advance();
        return std::make_unique<Stmt>(StmtKind::Expr, loc);  // empty stmt
      }
      case Tok::KwIf: {
        advance();
        expect(Tok::LParen, "if condition");
        auto s = std::make_unique<Stmt>(StmtKind::If, loc);
        s->expr = parse_expr();
        expect(Tok::RParen, "if condition");
        s->body.push_back(parse_stmt());
        if (accept(Tok::KwElse)) s->body2.push_back(parse_stmt());
        return s;
      }
      case Tok::KwWhile: {
        advance();
        expect(Tok::LParen, "while condition");
        auto s = std::make_unique<Stmt>(StmtKind::While, loc);
        s->expr = parse_expr();
        expect(Tok::RParen, "while condition");
        s->body.push_back(parse_stmt());
        return s;
      }
      case Tok::KwDo: {
        advance();
        auto s = std::make_unique<Stmt>(StmtKind::DoWhile, loc);
        s->body.push_back(parse_stmt());
        expect(Tok::KwWhile, "do-while");
        expect(Tok::LParen, "do-while condition");
        s->expr = parse_expr();
        expect(Tok::RParen, "do-while condition");
        expect(Tok::Semi, "do-while");
        return s;
      }
      case Tok::KwFor: {
        advance();
        expect(Tok::LParen, "for header");
        auto s = std::make_unique<Stmt>(StmtKind::For, loc);
        if (!at(Tok::Semi)) s->expr2 = parse_expr();
        expect(Tok::Semi, "for header");
        if (!at(Tok::Semi)) s->expr = parse_expr();
        expect(Tok::Semi, "for header");
        if (!at(Tok::RParen)) s->expr3 = parse_expr();
        expect(Tok::RParen, "for header");
        s->body.push_back(parse_stmt());
        return s;
      }
      case Tok::KwReturn: {
        advance();
        auto s = std::make_unique<Stmt>(StmtKind::Return, loc);
        if (!at(Tok::Semi)) s->expr = parse_expr();
        expect(Tok::Semi, "return");
        return s;
      }
      case Tok::KwBreak: {
        advance();
        expect(Tok::Semi, "break");
        return std::make_unique<Stmt>(StmtKind::Break, loc);
      }
      case Tok::KwContinue: {
        advance();
        expect(Tok::Semi, "continue");
        return std::make_unique<Stmt>(StmtKind::Continue, loc);
      }
      case Tok::KwVolatile:
      case Tok::KwUint8:
      case Tok::KwInt8:
      case Tok::KwUint16:
      case Tok::KwInt16:
        return parse_local_decl();
      default: {
        auto s = std::make_unique<Stmt>(StmtKind::Expr, loc);
        s->expr = parse_expr();
        expect(Tok::Semi, "statement");
        return s;
      }
    }
  }

  StmtPtr parse_local_decl() {
    SourceLoc loc = cur().loc;
    bool vol = accept(Tok::KwVolatile);
    Base base = parse_base_type();
    bool ptr = accept(Tok::Star);
    Token name = expect(Tok::Ident, "local name");
    auto s = std::make_unique<Stmt>(StmtKind::LocalDecl, loc);
    auto d = std::make_unique<VarDecl>();
    d->loc = loc;
    d->name = name.text;
    d->is_volatile = vol;
    d->storage = Storage::Local;
    if (ptr) {
      d->ctype = CType::pointer(base);
    } else if (accept(Tok::LBracket)) {
      Token len = expect(Tok::IntLit, "array length");
      if (len.value <= 0)
        throw parse_error(len.loc, "array length must be positive");
      expect(Tok::RBracket, "array length");
      d->ctype = CType::array(base, len.value);
    } else {
      d->ctype = CType::scalar(base);
    }
    if (accept(Tok::Assign)) {
      if (d->ctype.is_array)
        throw parse_error(cur().loc, "array initializers are not supported");
      s->init = parse_assign_expr();
    }
    expect(Tok::Semi, "declaration");
    s->decl = std::move(d);
    return s;
  }

  // ---- expressions ----

  ExprPtr parse_expr() {  // comma
    ExprPtr e = parse_assign_expr();
    while (at(Tok::Comma)) {
      SourceLoc loc = advance().loc;
      auto n = std::make_unique<Expr>(ExprKind::Comma, loc);
      n->kids.push_back(std::move(e));
      n->kids.push_back(parse_assign_expr());
      e = std::move(n);
    }
    return e;
  }

  static Sugar compound_sugar(Tok t) {
    switch (t) {
      case Tok::PlusAssign: return Sugar::AddA;
      case Tok::MinusAssign: return Sugar::SubA;
      case Tok::StarAssign: return Sugar::MulA;
      case Tok::SlashAssign: return Sugar::DivA;
      case Tok::PercentAssign: return Sugar::ModA;
      case Tok::ShlAssign: return Sugar::ShlA;
      case Tok::ShrAssign: return Sugar::ShrA;
      case Tok::AndAssign: return Sugar::AndA;
      case Tok::OrAssign: return Sugar::OrA;
      case Tok::XorAssign: return Sugar::XorA;
      default: return Sugar::None;
    }
  }

  static BinOp compound_op(Sugar s) {
    switch (s) {
      case Sugar::AddA: return BinOp::Add;
      case Sugar::SubA: return BinOp::Sub;
      case Sugar::MulA: return BinOp::Mul;
      case Sugar::DivA: return BinOp::Div;
      case Sugar::ModA: return BinOp::Mod;
      case Sugar::ShlA: return BinOp::Shl;
      case Sugar::ShrA: return BinOp::Shr;
      case Sugar::AndA: return BinOp::BitAnd;
      case Sugar::OrA: return BinOp::BitOr;
      case Sugar::XorA: return BinOp::BitXor;
      default: assert(false); return BinOp::Add;
    }
  }

  ExprPtr parse_assign_expr() {
    ExprPtr lhs = parse_logic_or();
    if (at(Tok::Assign)) {
      SourceLoc loc = advance().loc;
      require_lvalue(*lhs, loc);
      auto n = std::make_unique<Expr>(ExprKind::Assign, loc);
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(parse_assign_expr());  // right-associative
      return n;
    }
    Sugar sg = compound_sugar(cur().kind);
    if (sg != Sugar::None) {
      SourceLoc loc = advance().loc;
      require_lvalue(*lhs, loc);
      auto read = clone_expr(*lhs);
      auto bin = std::make_unique<Expr>(ExprKind::Binary, loc);
      bin->bin_op = compound_op(sg);
      bin->kids.push_back(std::move(read));
      bin->kids.push_back(parse_assign_expr());
      auto n = std::make_unique<Expr>(ExprKind::Assign, loc);
      n->sugar = sg;
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(std::move(bin));
      return n;
    }
    return lhs;
  }

  void require_lvalue(const Expr &e, SourceLoc loc) {
    if (!e.is_lvalue())
      throw parse_error(loc, "left side of assignment is not an lvalue");
  }

  template <typename NextFn>
  ExprPtr parse_logic_chain(LogicOp op, Tok tok, NextFn next) {
    ExprPtr e = next();
    while (at(tok)) {
      SourceLoc loc = advance().loc;
      auto n = std::make_unique<Expr>(ExprKind::Logic, loc);
      n->logic_op = op;
      n->kids.push_back(std::move(e));
      n->kids.push_back(next());
      e = std::move(n);
    }
    return e;
  }

  ExprPtr parse_logic_or() {
    return parse_logic_chain(LogicOp::Or, Tok::OrOr,
                             [this] { return parse_logic_and(); });
  }
  ExprPtr parse_logic_and() {
    return parse_logic_chain(LogicOp::And, Tok::AndAnd,
                             [this] { return parse_bit_or(); });
  }

  struct BinLevel {
    Tok tok;
    BinOp op;
  };

  template <typename NextFn>
  ExprPtr parse_bin_chain(std::initializer_list<BinLevel> lv, NextFn next) {
    ExprPtr e = next();
    for (;;) {
      bool matched = false;
      for (const auto &l : lv) {
        if (at(l.tok)) {
          SourceLoc loc = advance().loc;
          auto n = std::make_unique<Expr>(ExprKind::Binary, loc);
          n->bin_op = l.op;
          n->kids.push_back(std::move(e));
          n->kids.push_back(next());
          e = std::move(n);
          matched = true;
          break;
        }
      }
      if (!matched) return e;
    }
  }

  ExprPtr parse_bit_or() {
    return parse_bin_chain({{Tok::Pipe, BinOp::BitOr}},
                           [this] { return parse_bit_xor(); });
  }
  ExprPtr parse_bit_xor() {
    return parse_bin_chain({{Tok::Caret, BinOp::BitXor}},
                           [this] { return parse_bit_and(); });
  }
  ExprPtr parse_bit_and() {
    return parse_bin_chain({{Tok::Amp, BinOp::BitAnd}},
                           [this] { return parse_equality(); });
  }
  ExprPtr parse_equality() {
    return parse_bin_chain({{Tok::EqEq, BinOp::Eq}, {Tok::NotEq, BinOp::Ne}},
                           [this] { return parse_relational(); });
  }
  ExprPtr parse_relational() {
    return parse_bin_chain({{Tok::Lt, BinOp::Lt},
                            {Tok::Le, BinOp::Le},
                            {Tok::Gt, BinOp::Gt},
                            {Tok::Ge, BinOp::Ge}},
                           [this] { return parse_shift(); });
  }
  ExprPtr parse_shift() {
    return parse_bin_chain({{Tok::Shl, BinOp::Shl}, {Tok::Shr, BinOp::Shr}},
                           [this] { return parse_additive(); });
  }
  ExprPtr parse_additive() {
    return parse_bin_chain({{Tok::Plus, BinOp::Add}, {Tok::Minus, BinOp::Sub}},
                           [this] { return parse_multiplicative(); });
  }
  ExprPtr parse_multiplicative() {
    return parse_bin_chain({{Tok::Star, BinOp::Mul},
                            {Tok::Slash, BinOp::Div},
                            {Tok::Percent, BinOp::Mod}},
                           [this] { return parse_unary(); });
  }

  // ++lv  ->  lv = lv + 1 (Sugar::PreInc); value is the new value
  ExprPtr make_incdec(ExprPtr lv, bool inc, Sugar sg, SourceLoc loc) {
    require_lvalue(*lv, loc);
    auto read = clone_expr(*lv);
    auto one = std::make_unique<Expr>(ExprKind::Const, loc);
    one->value = 1;
    auto bin = std::make_unique<Expr>(ExprKind::Binary, loc);
    bin->bin_op = inc ? BinOp::Add : BinOp::Sub;
    bin->kids.push_back(std::move(read));
    bin->kids.push_back(std::move(one));
    auto n = std::make_unique<Expr>(ExprKind::Assign, loc);
    n->sugar = sg;
    n->kids.push_back(std::move(lv));
    n->kids.push_back(std::move(bin));
    return n;
  }

  ExprPtr parse_unary() {
    SourceLoc loc = cur().loc;
    switch (cur().kind) {
      case Tok::Minus: {
        advance();
        auto n = std::make_unique<Expr>(ExprKind::Unary, loc);
        n->un_op = UnOp::Neg;
        n->kids.push_back(parse_unary());
        return n;
      }
      case Tok::Not: {
        advance();
        auto n = std::make_unique<Expr>(ExprKind::Unary, loc);
        n->un_op = UnOp::Not;
        n->kids.push_back(parse_unary());
        return n;
      }
      case Tok::Tilde: {
        advance();
        auto n = std::make_unique<Expr>(ExprKind::Unary, loc);
        n->un_op = UnOp::BitNot;
        n->kids.push_back(parse_unary());
        return n;
      }
      case Tok::Amp: {
        advance();
        auto n = std::make_unique<Expr>(ExprKind::AddrOf, loc);
        n->kids.push_back(parse_unary());
        return n;
      }
      case Tok::Star: {
        advance();
        auto n = std::make_unique<Expr>(ExprKind::Deref, loc);
        n->kids.push_back(parse_unary());
        return n;
      }
      case Tok::PlusPlus: {
        advance();
        return make_incdec(parse_unary(), true, Sugar::PreInc, loc);
      }
      case Tok::MinusMinus: {
        advance();
        return make_incdec(parse_unary(), false, Sugar::PreDec, loc);
      }
      default:
        return parse_postfix();
    }
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    for (;;) {
      SourceLoc loc = cur().loc;
      if (accept(Tok::LBracket)) {
        auto n = std::make_unique<Expr>(ExprKind::Index, loc);
        n->kids.push_back(std::move(e));
        n->kids.push_back(parse_expr());
        expect(Tok::RBracket, "array index");
        e = std::move(n);
      } else if (at(Tok::LParen) && e->kind == ExprKind::Var) {
        advance();
        auto n = std::make_unique<Expr>(ExprKind::Call, loc);
        n->name = e->name;
        if (!at(Tok::RParen)) {
          do {
            n->kids.push_back(parse_assign_expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "call arguments");
        e = std::move(n);
      } else if (at(Tok::PlusPlus)) {
        advance();
        e = make_incdec(std::move(e), true, Sugar::PostInc, loc);
      } else if (at(Tok::MinusMinus)) {
        advance();
        e = make_incdec(std::move(e), false, Sugar::PostDec, loc);
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_primary() {
    SourceLoc loc = cur().loc;
    switch (cur().kind) {
      case Tok::IntLit: {
        Token t = advance();
        auto n = std::make_unique<Expr>(ExprKind::Const, loc);
        n->value = t.value;
        return n;
      }
      case Tok::Ident: {
        Token t = advance();
        auto n = std::make_unique<Expr>(ExprKind::Var, loc);
        n->name = t.text;
        return n;
      }
      case Tok::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "parenthesized expression");
        return e;
      }
      case Tok::KwVu8:
      case Tok::KwVi8:
      case Tok::KwVu16:
      case Tok::KwVi16: {
        Tok k = advance().kind;
        auto n = std::make_unique<Expr>(ExprKind::VolatileCast, loc);
        n->cast_base = k == Tok::KwVu8    ? Base::U8
                       : k == Tok::KwVi8  ? Base::I8
                       : k == Tok::KwVu16 ? Base::U16
                                          : Base::I16;
        expect(Tok::LParen, "volatile cast");
        n->kids.push_back(parse_expr());
        expect(Tok::RParen, "volatile cast");
        return n;
      }
      default:
        throw parse_error(loc, std::string("expected an expression, got '") +
                                   tok_name(cur().kind) + "'");
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::vector<Token> tokens) {
  return Parser(std::move(tokens)).run();
}

Program parse_source(const std::string &source) {
  return parse_program(tokenize(source));
}

}  // namespace mca
