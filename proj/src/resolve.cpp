#include "mca/resolve.hpp"

#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace mca {

bool is_sei_call(const Expr &e) {
  return e.kind == ExprKind::Call && e.name == "sei";
}
bool is_cli_call(const Expr &e) {
  return e.kind == ExprKind::Call && e.name == "cli";
}

bool is_volatile_access(const Expr &e) {
  switch (e.kind) {
    case ExprKind::VolatileCast:
      return true;
    case ExprKind::Var:
      return e.decl && e.decl->is_volatile;
    case ExprKind::Index: {
      const Expr *base = e.kid(0);
      return base->decl && base->decl->is_volatile;
    }
    case ExprKind::Deref:
      // Deref of a pointer-to-volatile is not expressible in Mini-C; the
      // pointee declaration decides.
      return false;
    default:
      return false;
  }
}

namespace {

class Resolver {
 public:
  explicit Resolver(Program &prog) : prog_(prog) {}

  void run() {
    declare_globals();
    declare_functions();
    for (auto &f : prog_.functions) resolve_function(*f);
    for (auto &f : prog_.isrs) resolve_function(*f);
    check_recursion();
    check_isr_restrictions();
  }

 private:
  void declare_globals() {
    std::set<std::string> seen;
    std::set<int64_t> addrs;
    for (auto &g : prog_.globals) {
      if (!seen.insert(g->name).second)
        throw resolve_error("DuplicateDefinition", g->loc,
                            "global '" + g->name + "' redeclared");
      if (g->absolute_address && !addrs.insert(*g->absolute_address).second)
        throw resolve_error("DuplicateDefinition", g->loc,
                            "address binding of '" + g->name +
                                "' collides with another declaration");
      if (g->init_value) {
        Base b = g->ctype.base;
        if (g->ctype.is_pointer || g->ctype.is_array)
          throw resolve_error("TypeMismatch", g->loc,
                              "initializer on non-scalar global");
        if (*g->init_value < type_min(b) || *g->init_value > type_max(b))
          throw resolve_error("TypeMismatch", g->loc,
                              "initializer does not fit " +
                                  type_name(g->ctype));
      }
      g->uid = next_uid_++;
    }
  }

  void declare_functions() {
    std::set<std::string> seen;
    for (auto &f : prog_.functions) {
      if (f->name == "sei" || f->name == "cli")
        throw resolve_error("DuplicateDefinition", f->loc,
                            "'" + f->name + "' is a built-in");
      if (!seen.insert(f->name).second)
        throw resolve_error("DuplicateDefinition", f->loc,
                            "function '" + f->name + "' redefined");
    }
    std::set<std::string> vecs;
    for (auto &f : prog_.isrs) {
      if (!vecs.insert(f->name).second)
        throw resolve_error("DuplicateDefinition", f->loc,
                            "ISR vector '" + f->name + "' redefined");
    }
  }

  void resolve_function(FunctionDef &fn) {
    current_ = &fn;
    scopes_.clear();
    scopes_.emplace_back();
    for (auto &p : fn.params) {
      p->owner = &fn;
      p->uid = next_uid_++;
      if (!declare_local(p.get()))
        throw resolve_error("DuplicateDefinition", p->loc,
                            "parameter '" + p->name + "' redeclared");
    }
    resolve_stmt(*fn.body);
    scopes_.clear();
    current_ = nullptr;
  }

  bool declare_local(VarDecl *d) {
    return scopes_.back().emplace(d->name, d).second;
  }

  const VarDecl *lookup(const std::string &name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return prog_.find_global(name);
  }

  void resolve_stmt(Stmt &s) {
    switch (s.kind) {
      case StmtKind::Block:
        scopes_.emplace_back();
        for (auto &c : s.body) resolve_stmt(*c);
        scopes_.pop_back();
        return;
      case StmtKind::Expr:
        if (s.expr) resolve_expr(*s.expr);
        return;
      case StmtKind::If:
        resolve_cond(*s.expr);
        resolve_stmt(*s.body[0]);
        if (!s.body2.empty()) resolve_stmt(*s.body2[0]);
        return;
      case StmtKind::While:
      case StmtKind::DoWhile:
        resolve_cond(*s.expr);
        resolve_stmt(*s.body[0]);
        return;
      case StmtKind::For:
        if (s.expr2) resolve_expr(*s.expr2);
        if (s.expr) resolve_cond(*s.expr);
        if (s.expr3) resolve_expr(*s.expr3);
        resolve_stmt(*s.body[0]);
        return;
      case StmtKind::Return:
        if (s.expr) {
          resolve_expr(*s.expr);
          if (current_->return_type.is_void())
            throw resolve_error("TypeMismatch", s.loc,
                                "returning a value from a void function");
          require_scalar(*s.expr, s.loc);
        } else if (!current_->return_type.is_void()) {
          throw resolve_error("TypeMismatch", s.loc,
                              "missing return value");
        }
        return;
      case StmtKind::Break:
      case StmtKind::Continue:
        return;
      case StmtKind::LocalDecl: {
        VarDecl *d = s.decl.get();
        d->owner = current_;
        d->uid = next_uid_++;
        if (s.init) {
          resolve_expr(*s.init);
          check_assignable(d->ctype, *s.init, s.loc);
        }
        if (!declare_local(d))
          throw resolve_error("DuplicateDefinition", d->loc,
                              "'" + d->name + "' redeclared in this scope");
        current_->locals.push_back(d);
        return;
      }
    }
  }

  void resolve_cond(Expr &e) {
    resolve_expr(e);
    require_scalar(e, e.loc);
  }

  void require_scalar(const Expr &e, SourceLoc loc) {
    if (!e.type.is_scalar())
      throw resolve_error("TypeMismatch", loc,
                          "expected a scalar value, got " + type_name(e.type));
  }

  void check_assignable(const CType &dst, const Expr &src, SourceLoc loc) {
    if (dst.is_array)
      throw resolve_error("TypeMismatch", loc, "cannot assign to an array");
    if (dst.is_pointer) {
      if (!(src.type.is_pointer && src.type.base == dst.base))
        throw resolve_error("TypeMismatch", loc,
                            "pointer assignment from " + type_name(src.type));
      return;
    }
    if (!src.type.is_scalar())
      throw resolve_error("TypeMismatch", loc,
                          "cannot assign " + type_name(src.type) +
                              " to a scalar");
  }

  void resolve_expr(Expr &e) {
    switch (e.kind) {
      case ExprKind::Const:
        e.type = CType::scalar(e.value >= 0 && e.value <= 255 ? Base::U8
                                                              : Base::U16);
        if (e.value < -32768 || e.value > 65535)
          throw resolve_error("TypeMismatch", e.loc,
                              "constant out of 16-bit range");
        if (e.value < 0) e.type = CType::scalar(Base::I16);
        return;
      case ExprKind::Var: {
        const VarDecl *d = lookup(e.name);
        if (!d)
          throw resolve_error("UndeclaredIdentifier", e.loc,
                              "'" + e.name + "' is not declared");
        e.decl = d;
        e.type = d->ctype;
        return;
      }
      case ExprKind::Unary: {
        resolve_expr(*e.kid(0));
        require_scalar(*e.kid(0), e.loc);
        e.type = e.kid(0)->type;
        if (e.un_op == UnOp::Not) e.type = CType::scalar(Base::U8);
        return;
      }
      case ExprKind::Binary: {
        resolve_expr(*e.kid(0));
        resolve_expr(*e.kid(1));
        require_scalar(*e.kid(0), e.loc);
        require_scalar(*e.kid(1), e.loc);
        switch (e.bin_op) {
          case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
          case BinOp::Eq: case BinOp::Ne:
            e.type = CType::scalar(Base::U8);  // 0/1
            return;
          case BinOp::Shl: case BinOp::Shr:
            e.type = e.kid(0)->type;
            return;
          default:
            e.type = CType::scalar(
                promote(e.kid(0)->type.base, e.kid(1)->type.base));
            return;
        }
      }
      case ExprKind::Logic:
        resolve_expr(*e.kid(0));
        resolve_expr(*e.kid(1));
        require_scalar(*e.kid(0), e.loc);
        require_scalar(*e.kid(1), e.loc);
        e.type = CType::scalar(Base::U8);
        return;
      case ExprKind::Comma:
        resolve_expr(*e.kid(0));
        resolve_expr(*e.kid(1));
        e.type = e.kid(1)->type;
        return;
      case ExprKind::Call: {
        for (auto &a : e.kids) resolve_expr(*a);
        if (e.name == "sei" || e.name == "cli") {
          if (!e.kids.empty())
            throw resolve_error("TypeMismatch", e.loc,
                                e.name + "() takes no arguments");
          e.type = CType::void_type();
          return;
        }
        const FunctionDef *fn = prog_.find_function(e.name);
        if (!fn)
          throw resolve_error("UndeclaredIdentifier", e.loc,
                              "function '" + e.name + "' is not defined");
        if (fn->params.size() != e.kids.size())
          throw resolve_error("TypeMismatch", e.loc,
                              "'" + e.name + "' expects " +
                                  std::to_string(fn->params.size()) +
                                  " arguments");
        for (size_t i = 0; i < e.kids.size(); ++i)
          check_assignable(fn->params[i]->ctype, *e.kid(i), e.kid(i)->loc);
        e.callee = fn;
        e.type = fn->return_type;
        calls_[current_].insert(fn);
        return;
      }
      case ExprKind::Assign: {
        resolve_expr(*e.lhs());
        resolve_expr(*e.rhs());
        require_lvalue_shape(*e.lhs());
        check_assignable(e.lhs()->type, *e.rhs(), e.loc);
        e.type = e.lhs()->type;
        return;
      }
      case ExprKind::Index: {
        resolve_expr(*e.kid(0));
        resolve_expr(*e.kid(1));
        if (e.kid(0)->kind != ExprKind::Var || !e.kid(0)->type.is_array)
          throw resolve_error("TypeMismatch", e.loc,
                              "indexing requires an array variable");
        require_scalar(*e.kid(1), e.loc);
        e.type = CType::scalar(e.kid(0)->type.base);
        return;
      }
      case ExprKind::AddrOf: {
        resolve_expr(*e.kid(0));
        const Expr &t = *e.kid(0);
        if (t.kind == ExprKind::Var) {
          if (t.type.is_pointer)
            throw resolve_error("TypeMismatch", e.loc,
                                "address of a pointer is not supported");
          e.type = CType::pointer(t.type.base);
        } else if (t.kind == ExprKind::Index) {
          e.type = CType::pointer(t.type.base);
        } else {
          throw resolve_error("TypeMismatch", e.loc,
                              "cannot take the address of this expression");
        }
        return;
      }
      case ExprKind::Deref: {
        resolve_expr(*e.kid(0));
        if (!e.kid(0)->type.is_pointer)
          throw resolve_error("TypeMismatch", e.loc,
                              "dereferencing a non-pointer");
        e.type = CType::scalar(e.kid(0)->type.base);
        return;
      }
      case ExprKind::VolatileCast: {
        resolve_expr(*e.kid(0));
        const Expr &t = *e.kid(0);
        if (!t.is_lvalue() || t.kind == ExprKind::VolatileCast)
          throw resolve_error("TypeMismatch", e.loc,
                              "volatile cast requires an lvalue");
        if (!t.type.is_scalar() || t.type.base != e.cast_base)
          throw resolve_error("TypeMismatch", e.loc,
                              "volatile cast width does not match " +
                                  type_name(t.type));
        e.type = t.type;
        return;
      }
    }
  }

  void require_lvalue_shape(const Expr &e) {
    if (!e.is_lvalue())
      throw resolve_error("TypeMismatch", e.loc, "not an assignable lvalue");
    if (e.kind == ExprKind::Var && (e.type.is_array))
      throw resolve_error("TypeMismatch", e.loc, "cannot assign to an array");
  }

  void check_recursion() {
    // Call graph is small; DFS for a cycle.
    std::map<const FunctionDef *, int> state;  // 0 new, 1 open, 2 done
    std::vector<const FunctionDef *> order;
    for (auto &kv : calls_) order.push_back(kv.first);
    std::function<void(const FunctionDef *)> visit =
        [&](const FunctionDef *f) {
          int &st = state[f];
          if (st == 1)
            throw resolve_error("RecursionUnsupported", f->loc,
                                "recursive call cycle through '" + f->name +
                                    "'");
          if (st == 2) return;
          st = 1;
          auto it = calls_.find(f);
          if (it != calls_.end())
            for (const FunctionDef *g : it->second) visit(g);
          st = 2;
        };
    for (const FunctionDef *f : order) visit(f);
  }

  void check_isr_restrictions() {
    // sei() anywhere in ISR-reachable code would re-enable interrupts
    // inside a handler; Mini-C excludes nested interrupts.
    std::set<const FunctionDef *> enables;
    for (auto &f : prog_.functions)
      if (contains_sei(*f->body)) enables.insert(f.get());
    for (auto &f : prog_.isrs) {
      if (contains_sei(*f->body))
        throw resolve_error("UnsupportedConstruct", f->loc,
                            "sei() inside ISR '" + f->name +
                                "' (nested interrupts are not supported)");
      std::set<const FunctionDef *> seen;
      if (reaches_enable(f.get(), enables, seen))
        throw resolve_error("UnsupportedConstruct", f->loc,
                            "ISR '" + f->name +
                                "' calls a function that enables interrupts");
    }
  }

  bool reaches_enable(const FunctionDef *f,
                      const std::set<const FunctionDef *> &enables,
                      std::set<const FunctionDef *> &seen) {
    if (!seen.insert(f).second) return false;
    auto it = calls_.find(f);
    if (it == calls_.end()) return false;
    for (const FunctionDef *g : it->second) {
      if (enables.count(g)) return true;
      if (reaches_enable(g, enables, seen)) return true;
    }
    return false;
  }

  bool contains_sei(const Stmt &s) {
    auto expr_has = [&](const Expr *e) { return e && expr_contains_sei(*e); };
    if (expr_has(s.expr.get()) || expr_has(s.expr2.get()) ||
        expr_has(s.expr3.get()) || expr_has(s.init.get()))
      return true;
    for (auto &c : s.body)
      if (contains_sei(*c)) return true;
    for (auto &c : s.body2)
      if (contains_sei(*c)) return true;
    return false;
  }

  bool expr_contains_sei(const Expr &e) {
    if (is_sei_call(e)) return true;
    for (auto &k : e.kids)
      if (expr_contains_sei(*k)) return true;
    return false;
  }

  Program &prog_;
  FunctionDef *current_ = nullptr;
  std::vector<std::map<std::string, const VarDecl *>> scopes_;
  std::map<const FunctionDef *, std::set<const FunctionDef *>> calls_;
  int next_uid_ = 0;
};

}  // namespace

void resolve_symbols(Program &prog) { Resolver(prog).run(); }

void check_entry(const Program &prog) {
  const FunctionDef *m = prog.entry_function();
  if (!m)
    throw resolve_error("UndeclaredIdentifier", SourceLoc{},
                        "no '" + prog.entry + "' function");
  if (!m->params.empty())
    throw resolve_error("TypeMismatch", m->loc,
                        "'" + prog.entry + "' must take no parameters");
}

}  // namespace mca
