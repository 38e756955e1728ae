#include "mca/printer.hpp"

#include <cassert>

namespace mca {

namespace {

// Precedence levels, high binds tight. Mirrors the parser.
int prec_of(const Expr &e) {
  switch (e.kind) {
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::VolatileCast:
      return 100;
    case ExprKind::Index:
    case ExprKind::Call:
      return 90;
    case ExprKind::Unary:
    case ExprKind::AddrOf:
    case ExprKind::Deref:
      return 80;
    case ExprKind::Binary:
      switch (e.bin_op) {
        case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 70;
        case BinOp::Add: case BinOp::Sub: return 60;
        case BinOp::Shl: case BinOp::Shr: return 55;
        case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
          return 50;
        case BinOp::Eq: case BinOp::Ne: return 45;
        case BinOp::BitAnd: return 40;
        case BinOp::BitXor: return 38;
        case BinOp::BitOr: return 36;
      }
      return 36;
    case ExprKind::Logic:
      return e.logic_op == LogicOp::And ? 30 : 28;
    case ExprKind::Assign:
      return 20;
    case ExprKind::Comma:
      return 10;
  }
  return 0;
}

std::string wrap(const Expr &child, int parent_prec, bool strict = false) {
  std::string s = print_expr(child);
  int cp = prec_of(child);
  if (cp < parent_prec || (strict && cp == parent_prec)) return "(" + s + ")";
  return s;
}

const char *cast_name(Base b) {
  switch (b) {
    case Base::U8: return "vu8";
    case Base::I8: return "vi8";
    case Base::U16: return "vu16";
    case Base::I16: return "vi16";
    default: return "vu8";
  }
}

const char *compound_str(Sugar s) {
  switch (s) {
    case Sugar::AddA: return "+=";
    case Sugar::SubA: return "-=";
    case Sugar::MulA: return "*=";
    case Sugar::DivA: return "/=";
    case Sugar::ModA: return "%=";
    case Sugar::ShlA: return "<<=";
    case Sugar::ShrA: return ">>=";
    case Sugar::AndA: return "&=";
    case Sugar::OrA: return "|=";
    case Sugar::XorA: return "^=";
    default: return "=";
  }
}

std::string ind(int n) { return std::string(n * 2, ' '); }

}  // namespace

std::string print_expr(const Expr &e) {
  int p = prec_of(e);
  switch (e.kind) {
    case ExprKind::Const:
      return std::to_string(e.value);
    case ExprKind::Var:
      return e.name;
    case ExprKind::Unary:
      return std::string(un_op_str(e.un_op)) + wrap(*e.kid(0), p);
    case ExprKind::Binary:
      return wrap(*e.kid(0), p) + " " + bin_op_str(e.bin_op) + " " +
             wrap(*e.kid(1), p, true);
    case ExprKind::Logic:
      return wrap(*e.kid(0), p) + (e.logic_op == LogicOp::And ? " && " : " || ") +
             wrap(*e.kid(1), p, true);
    case ExprKind::Comma:
      return wrap(*e.kid(0), p) + ", " + wrap(*e.kid(1), p, true);
    case ExprKind::Call: {
      std::string s = e.name + "(";
      for (size_t i = 0; i < e.kids.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(*e.kid(i));
      }
      return s + ")";
    }
    case ExprKind::Assign: {
      switch (e.sugar) {
        case Sugar::None:
          return wrap(*e.lhs(), p, true) + " = " + wrap(*e.rhs(), p);
        case Sugar::PreInc:
          return "++" + wrap(*e.lhs(), 80);
        case Sugar::PreDec:
          return "--" + wrap(*e.lhs(), 80);
        case Sugar::PostInc:
          return wrap(*e.lhs(), 90) + "++";
        case Sugar::PostDec:
          return wrap(*e.lhs(), 90) + "--";
        default:
          // compound: rhs is Binary(op, lvalue-read, value)
          return wrap(*e.lhs(), p, true) + " " + compound_str(e.sugar) + " " +
                 wrap(*e.rhs()->kid(1), p);
      }
    }
    case ExprKind::Index:
      return wrap(*e.kid(0), p) + "[" + print_expr(*e.kid(1)) + "]";
    case ExprKind::AddrOf:
      return "&" + wrap(*e.kid(0), p);
    case ExprKind::Deref:
      return "*" + wrap(*e.kid(0), p);
    case ExprKind::VolatileCast:
      return std::string(cast_name(e.cast_base)) + "(" +
             print_expr(*e.kid(0)) + ")";
  }
  return "?";
}

static std::string decl_str(const VarDecl &d) {
  std::string s;
  if (d.is_volatile) s += "volatile ";
  switch (d.ctype.base) {
    case Base::U8: s += "uint8"; break;
    case Base::I8: s += "int8"; break;
    case Base::U16: s += "uint16"; break;
    case Base::I16: s += "int16"; break;
    case Base::Void: s += "void"; break;
  }
  s += d.ctype.is_pointer ? " *" : " ";
  s += d.name;
  if (d.ctype.is_array) s += "[" + std::to_string(d.ctype.array_len) + "]";
  return s;
}

std::string print_stmt(const Stmt &s, int indent) {
  std::string out = ind(indent);
  switch (s.kind) {
    case StmtKind::Expr:
      if (s.expr) out += print_expr(*s.expr);
      out += ";\n";
      return out;
    case StmtKind::Block: {
      out += "{\n";
      for (auto &c : s.body) out += print_stmt(*c, indent + 1);
      out += ind(indent) + "}\n";
      return out;
    }
    case StmtKind::If: {
      out += "if (" + print_expr(*s.expr) + ")\n";
      out += print_stmt(*s.body[0], indent + 1);
      if (!s.body2.empty()) {
        out += ind(indent) + "else\n";
        out += print_stmt(*s.body2[0], indent + 1);
      }
      return out;
    }
    case StmtKind::While:
      out += "while (" + print_expr(*s.expr) + ")\n";
      out += print_stmt(*s.body[0], indent + 1);
      return out;
    case StmtKind::DoWhile:
      out += "do\n" + print_stmt(*s.body[0], indent + 1);
      out += ind(indent) + "while (" + print_expr(*s.expr) + ");\n";
      return out;
    case StmtKind::For:
      out += "for (";
      if (s.expr2) out += print_expr(*s.expr2);
      out += "; ";
      if (s.expr) out += print_expr(*s.expr);
      out += "; ";
      if (s.expr3) out += print_expr(*s.expr3);
      out += ")\n" + print_stmt(*s.body[0], indent + 1);
      return out;
    case StmtKind::Return:
      out += "return";
      if (s.expr) out += " " + print_expr(*s.expr);
      out += ";\n";
      return out;
    case StmtKind::Break:
      return out + "break;\n";
    case StmtKind::Continue:
      return out + "continue;\n";
    case StmtKind::LocalDecl:
      out += decl_str(*s.decl);
      if (s.init) out += " = " + print_expr(*s.init);
      out += ";\n";
      return out;
  }
  return out;
}

std::string print_program(const Program &p) {
  std::string out;
  for (auto &g : p.globals) {
    out += decl_str(*g);
    if (g->absolute_address)
      out += " @ " + std::to_string(*g->absolute_address);
    if (g->init_value) out += " = " + std::to_string(*g->init_value);
    out += ";\n";
  }
  out += "\n";
  for (auto &f : p.functions) {
    out += type_name(f->return_type) + " " + f->name + "(";
    for (size_t i = 0; i < f->params.size(); ++i) {
      if (i) out += ", ";
      out += decl_str(*f->params[i]);
    }
    out += ")\n" + print_stmt(*f->body, 0) + "\n";
  }
  for (auto &f : p.isrs) {
    out += "ISR(" + f->name + ")\n" + print_stmt(*f->body, 0) + "\n";
  }
  return out;
}

bool same_shape(const Expr &a, const Expr &b) {
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  switch (a.kind) {
    case ExprKind::Const:
      if (a.value != b.value) return false;
      break;
    case ExprKind::Var:
    case ExprKind::Call:
      if (a.name != b.name) return false;
      break;
    case ExprKind::Unary:
      if (a.un_op != b.un_op) return false;
      break;
    case ExprKind::Binary:
      if (a.bin_op != b.bin_op) return false;
      break;
    case ExprKind::Logic:
      if (a.logic_op != b.logic_op) return false;
      break;
    case ExprKind::Assign:
      if (a.sugar != b.sugar) return false;
      break;
    case ExprKind::VolatileCast:
      if (a.cast_base != b.cast_base) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!same_shape(*a.kid(i), *b.kid(i))) return false;
  return true;
}

static bool same_shape(const Stmt &a, const Stmt &b) {
  if (a.kind != b.kind) return false;
  auto opt_same = [](const ExprPtr &x, const ExprPtr &y) {
    if (!x != !y) return false;
    return !x || same_shape(*x, *y);
  };
  if (!opt_same(a.expr, b.expr) || !opt_same(a.expr2, b.expr2) ||
      !opt_same(a.expr3, b.expr3) || !opt_same(a.init, b.init))
    return false;
  if (a.kind == StmtKind::LocalDecl) {
    if (a.decl->name != b.decl->name || !(a.decl->ctype == b.decl->ctype) ||
        a.decl->is_volatile != b.decl->is_volatile)
      return false;
  }
  if (a.body.size() != b.body.size() || a.body2.size() != b.body2.size())
    return false;
  for (size_t i = 0; i < a.body.size(); ++i)
    if (!same_shape(*a.body[i], *b.body[i])) return false;
  for (size_t i = 0; i < a.body2.size(); ++i)
    if (!same_shape(*a.body2[i], *b.body2[i])) return false;
  return true;
}

bool same_shape(const Program &a, const Program &b) {
  if (a.globals.size() != b.globals.size() ||
      a.functions.size() != b.functions.size() || a.isrs.size() != b.isrs.size())
    return false;
  for (size_t i = 0; i < a.globals.size(); ++i) {
    const auto &x = *a.globals[i], &y = *b.globals[i];
    if (x.name != y.name || !(x.ctype == y.ctype) ||
        x.is_volatile != y.is_volatile ||
        x.absolute_address != y.absolute_address || x.init_value != y.init_value)
      return false;
  }
  auto same_fn = [&](const FunctionDef &x, const FunctionDef &y) {
    if (x.name != y.name || !(x.return_type == y.return_type) ||
        x.params.size() != y.params.size())
      return false;
    for (size_t i = 0; i < x.params.size(); ++i)
      if (x.params[i]->name != y.params[i]->name ||
          !(x.params[i]->ctype == y.params[i]->ctype))
        return false;
    return same_shape(*x.body, *y.body);
  };
  for (size_t i = 0; i < a.functions.size(); ++i)
    if (!same_fn(*a.functions[i], *b.functions[i])) return false;
  for (size_t i = 0; i < a.isrs.size(); ++i)
    if (!same_fn(*a.isrs[i], *b.isrs[i])) return false;
  return true;
}

}  // namespace mca
