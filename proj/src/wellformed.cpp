#include "mca/wellformed.hpp"

#include <cassert>

#include "mca/printer.hpp"
#include "mca/resolve.hpp"

namespace mca {

namespace {

bool deref_may_hit_shared(const Expr &e, const SharedInfo &info) {
  assert(e.kind == ExprKind::Deref);
  const Expr *p = e.kid(0);
  return p->kind == ExprKind::Var && p->decl && info.ptrs_to_shared.count(p->decl);
}

// Number of stores to shared data performed by this expression itself;
// calls that write shared data count once.
int count_shared_writes(const Expr &e, const SharedInfo &info) {
  int n = 0;
  if (e.kind == ExprKind::Assign) {
    const Expr *lv = e.lhs();
    if (lv->kind == ExprKind::VolatileCast) lv = lv->kid(0);
    switch (lv->kind) {
      case ExprKind::Var:
        if (lv->decl && info.is_shared(lv->decl)) n = 1;
        break;
      case ExprKind::Index:
        if (lv->kid(0)->decl && info.is_shared(lv->kid(0)->decl)) n = 1;
        break;
      case ExprKind::Deref:
        if (deref_may_hit_shared(*lv, info)) n = 1;
        break;
      default:
        break;
    }
  }
  if (e.kind == ExprKind::Call && e.callee &&
      info.shared_writing_fns.count(e.callee))
    n += 1;
  for (auto &k : e.kids) n += count_shared_writes(*k, info);
  return n;
}

}  // namespace

bool classify_competing(const Expr &e, const SharedInfo &info) {
  if (is_volatile_access(e)) return true;
  if (e.kind == ExprKind::Call) {
    if (is_sei_call(e) || is_cli_call(e)) return true;  // enable-bit writes
    if (e.callee && info.competing_fns.count(e.callee)) return true;
  }
  if (e.kind == ExprKind::Deref && deref_may_hit_shared(e, info)) return true;
  for (auto &k : e.kids)
    if (classify_competing(*k, info)) return true;
  return false;
}

namespace {

struct Checker {
  const SharedInfo &info;
  WfVerdict v;

  void fail(const std::string &rule, const Expr &at) {
    if (!v.well_formed) return;  // keep the first violation
    v.well_formed = false;
    v.rule = rule;
    v.offender = at.loc;
  }

  bool competing(const Expr &e) const { return classify_competing(e, info); }

  // Checks one expression; returns nothing, accumulates into v.
  void check(const Expr &e) {
    switch (e.kind) {
      case ExprKind::Const:
      case ExprKind::Var:
        return;  // rule 1
      case ExprKind::VolatileCast: {
        const Expr &inner = *e.kid(0);
        if (inner.kind == ExprKind::Index) {
          check(*inner.kid(1));
          // the cast makes the element access volatile
          if (competing(*inner.kid(1))) fail("3b", e);
        } else if (inner.kind == ExprKind::Deref) {
          check(*inner.kid(0));
        }
        return;
      }
      case ExprKind::Index:
        // element read; the index is an operand like in a binary expression
        check(*e.kid(1));
        if (is_volatile_access(e) && competing(*e.kid(1)))
          fail("3b", e);  // volatile element with a competing index
        return;
      case ExprKind::Deref:
        check(*e.kid(0));
        return;
      case ExprKind::AddrOf:
        return;
      case ExprKind::Unary:
        check(*e.kid(0));  // rule 2
        return;
      case ExprKind::Binary:
        check(*e.kid(0));
        check(*e.kid(1));
        if (competing(*e.kid(0)) && competing(*e.kid(1))) fail("3b", e);
        return;
      case ExprKind::Logic:
      case ExprKind::Comma:
        check(*e.kid(0));  // rule 4: the operator is a sequence point
        check(*e.kid(1));
        return;
      case ExprKind::Call: {
        int ncomp = 0;
        for (auto &a : e.kids) {
          check(*a);
          if (competing(*a)) ++ncomp;
        }
        if (ncomp > 1) fail("5", e);  // argument order is unspecified
        return;
      }
      case ExprKind::Assign: {
        const Expr &lv = *e.lhs();
        const Expr &rhs = *e.rhs();
        check_lvalue_parts(lv);
        check(rhs);
        bool a_ok = !competing(lv);
        bool rhs_writes = count_shared_writes(rhs, info) > 0;
        bool b_ok = !rhs_writes;
        if (b_ok && lv.kind != ExprKind::Var &&
            lvalue_index_competing(lv) && competing(rhs)) {
          // the address computation and the right side both compete and
          // are unsequenced; rule 3 applied to the implicit address math
          b_ok = false;
        }
        if (!a_ok && !b_ok) fail("6", e);
        return;
      }
    }
  }

  bool lvalue_index_competing(const Expr &lv) const {
    const Expr *l = &lv;
    if (l->kind == ExprKind::VolatileCast) l = l->kid(0);
    if (l->kind == ExprKind::Index) return competing(*l->kid(1));
    return false;
  }

  // The lvalue itself is not evaluated for its value, but an index or a
  // pointer operand is.
  void check_lvalue_parts(const Expr &lv) {
    const Expr *l = &lv;
    if (l->kind == ExprKind::VolatileCast) l = l->kid(0);
    if (l->kind == ExprKind::Index) check(*l->kid(1));
    if (l->kind == ExprKind::Deref) check(*l->kid(0));
  }

};

}  // namespace

WfVerdict is_well_formed(const Expr &full_expr, const SharedInfo &info) {
  Checker c{info, {}};
  c.check(full_expr);
  c.v.competing = classify_competing(full_expr, info);
  c.v.writes_shared = count_shared_writes(full_expr, info);
  if (c.v.well_formed && c.v.writes_shared >= 2) {
    // at most one write to shared data per full expression
    c.v.well_formed = false;
    c.v.rule = "two-writes";
    c.v.offender = full_expr.loc;
  }
  return c.v;
}

namespace {

void explain_rec(const Expr &e, const SharedInfo &info, int depth,
                 std::string &out) {
  WfVerdict v = is_well_formed(e, info);
  out += std::string(depth * 2, ' ');
  out += print_expr(e);
  out += v.well_formed ? "  [well-formed" : "  [NOT well-formed";
  out += classify_competing(e, info) ? ", competing" : "";
  int w = count_shared_writes(e, info);
  if (w) out += ", shared writes: " + std::to_string(w);
  if (!v.well_formed) out += ", violates rule " + v.rule;
  out += "]\n";
  for (auto &k : e.kids) explain_rec(*k, info, depth + 1, out);
}

}  // namespace

std::string explain_wf(const Expr &full_expr, const SharedInfo &info) {
  std::string out;
  explain_rec(full_expr, info, 0, out);
  return out;
}

}  // namespace mca
