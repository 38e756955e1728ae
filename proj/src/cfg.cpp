#include "mca/cfg.hpp"

#include <cassert>
#include <set>

#include "mca/printer.hpp"
#include "mca/resolve.hpp"

namespace mca {

RExprPtr RExpr::constant(int64_t v, Base t, SourceLoc l) {
  auto e = std::make_unique<RExpr>();
  e->kind = Const;
  e->value = v;
  e->type = t;
  e->loc = l;
  return e;
}

RExprPtr RExpr::load(MemLocId id, Base t, bool vol, SourceLoc l) {
  auto e = std::make_unique<RExpr>();
  e->kind = Load;
  e->id = id;
  e->type = t;
  e->is_volatile = vol;
  e->loc = l;
  return e;
}

RExprPtr clone_rexpr(const RExpr &e) {
  auto out = std::make_unique<RExpr>();
  out->kind = e.kind;
  out->type = e.type;
  out->loc = e.loc;
  out->value = e.value;
  out->id = e.id;
  out->deref_ptr = e.deref_ptr;
  out->is_volatile = e.is_volatile;
  out->addr_target = e.addr_target;
  out->un = e.un;
  out->bin = e.bin;
  if (e.index) out->index = clone_rexpr(*e.index);
  if (e.a) out->a = clone_rexpr(*e.a);
  if (e.b) out->b = clone_rexpr(*e.b);
  return out;
}

std::string rexpr_str(const RExpr &e, const MemLocTable &t) {
  switch (e.kind) {
    case RExpr::Const:
      return std::to_string(e.value);
    case RExpr::Load: {
      std::string s;
      if (e.deref_ptr) {
        s = "*" + e.deref_ptr->name;
      } else if (e.index) {
        std::string n = t.name(e.id);
        s = n.substr(0, n.size() - 2) + "[" + rexpr_str(*e.index, t) + "]";
      } else {
        s = t.name(e.id);
      }
      return e.is_volatile ? "volatile(" + s + ")" : s;
    }
    case RExpr::Un:
      return std::string(un_op_str(e.un)) + "(" + rexpr_str(*e.a, t) + ")";
    case RExpr::Bin:
      return "(" + rexpr_str(*e.a, t) + " " + bin_op_str(e.bin) + " " +
             rexpr_str(*e.b, t) + ")";
    case RExpr::Addr:
      return "&" + e.addr_target->name;
  }
  return "?";
}

namespace {

// Open successor slots waiting for their target node.
struct Ends {
  std::vector<std::pair<int, int>> slots;  // (node id, succ index)
  void add(int node, int slot) { slots.push_back({node, slot}); }
  void merge(Ends &&o) {
    for (auto &s : o.slots) slots.push_back(s);
    o.slots.clear();
  }
  bool empty() const { return slots.empty(); }
};

struct LoopCtx {
  Ends breaks;
  int continue_target = -1;
  Ends pending_continues;  // for loops whose continue target is lowered later
};

class Lowerer {
 public:
  Lowerer(const FunctionDef &fn, MemLocTable &table, const HardwareSpec &hw)
      : fn_(fn), table_(table), hw_(hw) {}

  Cfg run() {
    cfg_.fn = &fn_;
    for (auto &p : fn_.params)
      cfg_.locals.push_back(table_.of_decl(p.get(), hw_));
    for (const VarDecl *l : fn_.locals)
      cfg_.locals.push_back(table_.of_decl(l, hw_));
    if (!fn_.return_type.is_void())
      cfg_.return_slot = table_.make_return_slot(&fn_, fn_.return_type.base);

    int entry = emit(NodeKind::Nop, fn_.loc, 1);
    cfg_.node(entry).full_expr_id = new_full_expr(nullptr, fn_.loc);
    cfg_.full_exprs.back().nodes.push_back(entry);
    cfg_.entry = entry;
    cur_ends_ = ends_of(entry);

    lower_stmt(*fn_.body);

    if (!cur_ends_.empty()) {
      // fall off the end: implicit return (value untracked for non-void)
      int r = emit(NodeKind::Return, fn_.loc, 0);
      patch(cur_ends_, r);
      cfg_.node(r).full_expr_id = new_full_expr(nullptr, fn_.loc);
      cfg_.full_exprs.back().nodes.push_back(r);
    }
    for (auto &n : cfg_.nodes) finalize_accesses(*n);
    return std::move(cfg_);
  }

 private:
  // ---- node plumbing ----

  int emit(NodeKind k, SourceLoc loc, int nsucc) {
    auto n = std::make_unique<CfgNode>();
    n->id = (int)cfg_.nodes.size();
    n->kind = k;
    n->loc = loc;
    n->succ.assign(nsucc, -1);
    cfg_.nodes.push_back(std::move(n));
    return cfg_.nodes.back()->id;
  }

  Ends ends_of(int node) {
    Ends e;
    for (size_t i = 0; i < cfg_.node(node).succ.size(); ++i)
      e.add(node, (int)i);
    return e;
  }

  void patch(Ends &e, int target) {
    for (auto &[n, s] : e.slots) cfg_.node(n).succ[s] = target;
    e.slots.clear();
  }

  // Emits a node at the current position: wires pending ends to it and
  // leaves its successors open.
  int emit_linked(NodeKind k, SourceLoc loc, int nsucc) {
    int n = emit(k, loc, nsucc);
    patch(cur_ends_, n);
    if (cur_fe_ >= 0) {
      cfg_.node(n).full_expr_id = cur_fe_;
      cfg_.full_exprs[cur_fe_].nodes.push_back(n);
    }
    cur_ends_ = ends_of(n);
    return n;
  }

  int new_full_expr(const Expr *ast, SourceLoc loc) {
    FullExpr fe;
    fe.id = (int)cfg_.full_exprs.size();
    fe.ast = ast;
    fe.fn = &fn_;
    fe.loc = loc;
    cfg_.full_exprs.push_back(std::move(fe));
    return cfg_.full_exprs.back().id;
  }

  MemLocId fresh_temp(Base b) {
    MemLocId t = table_.make_temp(&fn_, b, temp_idx_++);
    cfg_.temps.push_back(t);
    return t;
  }

  [[noreturn]] void unsupported(SourceLoc loc, const std::string &what) {
    throw Diag("UnsupportedConstruct", loc, what);
  }

  // ---- expression lowering ----

  bool effect_free(const RExpr &e) const {
    switch (e.kind) {
      case RExpr::Const:
      case RExpr::Addr:
        return true;
      case RExpr::Load:
        return false;
      case RExpr::Un:
        return effect_free(*e.a);
      case RExpr::Bin:
        return effect_free(*e.a) && effect_free(*e.b);
    }
    return false;
  }

  void lower_discarded(const Expr &e) {
    size_t before = cfg_.nodes.size();
    RExprPtr v = lower_value(e);
    if (cfg_.nodes.size() != before) {
      // some node carried the effects; drop a pure residue
      if (v && !effect_free(*v) && !ends_in_store_of(v.get())) {
        int n = emit_linked(NodeKind::Assign, e.loc, 1);
        finish_temp_assign(n, std::move(v));
      }
      return;
    }
    if (!v || effect_free(*v)) {
      int n = emit_linked(NodeKind::Nop, e.loc, 1);
      (void)n;
      return;
    }
    // loads only: keep them visible for the shared-access handling
    int n = emit_linked(NodeKind::Assign, e.loc, 1);
    finish_temp_assign(n, std::move(v));
  }

  bool ends_in_store_of(const RExpr *v) const {
    // a plain temp load whose producing node was just emitted needs no
    // extra node
    return v->kind == RExpr::Load && !v->index && !v->deref_ptr &&
           table_.info(v->id).kind == MemLocKind::Temp;
  }

  void finish_temp_assign(int node, RExprPtr v) {
    CfgNode &n = cfg_.node(node);
    MemLocId t = fresh_temp(v->type);
    n.lhs.kind = LValue::Scalar;
    n.lhs.id = t;
    n.lhs.loc = n.loc;
    n.rhs = std::move(v);
  }

  struct LoweredLValue {
    LValue lv;
    const VarDecl *decl = nullptr;  // underlying declaration if direct
    Base base = Base::U8;
  };

  LoweredLValue lower_lvalue(const Expr &e) {
    const Expr *l = &e;
    bool vol = false;
    if (l->kind == ExprKind::VolatileCast) {
      vol = true;
      l = l->kid(0);
    }
    LoweredLValue out;
    out.lv.loc = l->loc;
    switch (l->kind) {
      case ExprKind::Var: {
        out.decl = l->decl;
        out.base = l->type.base;
        out.lv.kind = LValue::Scalar;
        out.lv.id = table_.of_decl(l->decl, hw_);
        out.lv.is_volatile = vol || l->decl->is_volatile;
        return out;
      }
      case ExprKind::Index: {
        const Expr *basev = l->kid(0);
        out.decl = basev->decl;
        out.base = basev->type.base;
        out.lv.kind = LValue::ArrayElem;
        out.lv.id = table_.of_decl(basev->decl, hw_);
        out.lv.index = lower_value(*l->kid(1));
        out.lv.is_volatile = vol || basev->decl->is_volatile;
        return out;
      }
      case ExprKind::Deref: {
        const Expr *p = l->kid(0);
        if (p->kind != ExprKind::Var)
          unsupported(l->loc, "dereference of a non-variable pointer");
        out.decl = nullptr;
        out.base = l->type.base;
        out.lv.kind = LValue::PtrDeref;
        out.lv.ptr = p->decl;
        out.lv.is_volatile = vol;
        return out;
      }
      default:
        unsupported(l->loc, "unsupported lvalue");
    }
  }

  RExprPtr load_of(const LoweredLValue &llv, SourceLoc loc) {
    auto e = std::make_unique<RExpr>();
    e->kind = RExpr::Load;
    e->type = llv.base;
    e->loc = loc;
    e->is_volatile = llv.lv.is_volatile;
    if (llv.lv.kind == LValue::Scalar) {
      e->id = llv.lv.id;
    } else if (llv.lv.kind == LValue::ArrayElem) {
      e->id = llv.lv.id;
      e->index = clone_rexpr(*llv.lv.index);
    } else {
      e->deref_ptr = llv.lv.ptr;
    }
    return e;
  }

  RExprPtr lower_value(const Expr &e) {
    switch (e.kind) {
      case ExprKind::Const:
        return RExpr::constant(e.value, e.type.base, e.loc);
      case ExprKind::Var: {
        if (e.type.is_array)
          unsupported(e.loc, "array value");
        MemLocId id = table_.of_decl(e.decl, hw_);
        return RExpr::load(id, e.type.base, e.decl->is_volatile, e.loc);
      }
      case ExprKind::VolatileCast:
      case ExprKind::Index:
      case ExprKind::Deref: {
        LoweredLValue llv = lower_lvalue(e);
        return load_of(llv, e.loc);
      }
      case ExprKind::AddrOf: {
        auto out = std::make_unique<RExpr>();
        out->kind = RExpr::Addr;
        out->type = e.type.base;
        out->loc = e.loc;
        const Expr *t = e.kid(0);
        out->addr_target = t->kind == ExprKind::Var ? t->decl
                                                    : t->kid(0)->decl;
        if (t->kind == ExprKind::Index) {
          // evaluate the index for its effects; the summary cell is the
          // points-to target either way
          RExprPtr idx = lower_value(*t->kid(1));
          if (!effect_free(*idx)) {
            int n = emit_linked(NodeKind::Assign, e.loc, 1);
            finish_temp_assign(n, std::move(idx));
          }
        }
        return out;
      }
      case ExprKind::Unary: {
        auto out = std::make_unique<RExpr>();
        out->kind = RExpr::Un;
        out->un = e.un_op;
        out->type = e.type.base;
        out->loc = e.loc;
        out->a = lower_value(*e.kid(0));
        return out;
      }
      case ExprKind::Binary: {
        auto out = std::make_unique<RExpr>();
        out->kind = RExpr::Bin;
        out->bin = e.bin_op;
        out->type = e.type.base;
        out->loc = e.loc;
        out->a = lower_value(*e.kid(0));
        out->b = lower_value(*e.kid(1));
        return out;
      }
      case ExprKind::Comma: {
        lower_discarded_subexpr(*e.kid(0));
        return lower_value(*e.kid(1));
      }
      case ExprKind::Logic: {
        MemLocId t = fresh_temp(Base::U8);
        Ends tr, fl;
        lower_cond(e, tr, fl);
        cur_ends_ = std::move(tr);
        int nt = emit_linked(NodeKind::Assign, e.loc, 1);
        CfgNode &tn = cfg_.node(nt);
        tn.lhs.kind = LValue::Scalar;
        tn.lhs.id = t;
        tn.lhs.loc = e.loc;
        tn.rhs = RExpr::constant(1, Base::U8, e.loc);
        Ends after = ends_of(nt);
        cur_ends_ = std::move(fl);
        int nf = emit_linked(NodeKind::Assign, e.loc, 1);
        CfgNode &zn = cfg_.node(nf);
        zn.lhs.kind = LValue::Scalar;
        zn.lhs.id = t;
        zn.lhs.loc = e.loc;
        zn.rhs = RExpr::constant(0, Base::U8, e.loc);
        after.merge(std::move(cur_ends_));
        cur_ends_ = std::move(after);
        return RExpr::load(t, Base::U8, false, e.loc);
      }
      case ExprKind::Call:
        return lower_call(e);
      case ExprKind::Assign:
        return lower_assign(e, /*value_used=*/true);
    }
    unsupported(e.loc, "expression");
  }

  void lower_discarded_subexpr(const Expr &e) {
    size_t before = cfg_.nodes.size();
    RExprPtr v = lower_value(e);
    bool emitted = cfg_.nodes.size() != before;
    if (v && !effect_free(*v) && !(emitted && ends_in_store_of(v.get()))) {
      int n = emit_linked(NodeKind::Assign, e.loc, 1);
      finish_temp_assign(n, std::move(v));
    }
  }

  RExprPtr lower_call(const Expr &e) {
    std::vector<RExprPtr> args;
    for (auto &a : e.kids) args.push_back(lower_value(*a));
    int n = emit_linked(NodeKind::Call, e.loc, 1);
    CfgNode &cn = cfg_.node(n);
    cn.args = std::move(args);
    if (is_sei_call(e)) {
      cn.builtin = CfgNode::Builtin::Sei;
      return nullptr;
    }
    if (is_cli_call(e)) {
      cn.builtin = CfgNode::Builtin::Cli;
      return nullptr;
    }
    cn.callee = e.callee;
    if (!e.callee->return_type.is_void()) {
      cn.result = fresh_temp(e.callee->return_type.base);
      return RExpr::load(cn.result, e.callee->return_type.base, false, e.loc);
    }
    return nullptr;
  }

  RExprPtr lower_assign(const Expr &e, bool value_used) {
    bool post =
        e.sugar == Sugar::PostInc || e.sugar == Sugar::PostDec;
    LoweredLValue llv = lower_lvalue(*e.lhs());
    if (value_used && e.lhs()->type.is_pointer)
      unsupported(e.loc, "using a pointer assignment as a value");

    if (post && value_used) {
      // t := lv; lv := t +/- 1; value is t
      MemLocId t = fresh_temp(llv.base);
      int n1 = emit_linked(NodeKind::Assign, e.loc, 1);
      CfgNode &rn = cfg_.node(n1);
      rn.lhs.kind = LValue::Scalar;
      rn.lhs.id = t;
      rn.lhs.loc = e.loc;
      rn.rhs = load_of(llv, e.lhs()->loc);

      auto upd = std::make_unique<RExpr>();
      upd->kind = RExpr::Bin;
      upd->bin = e.sugar == Sugar::PostInc ? BinOp::Add : BinOp::Sub;
      upd->type = llv.base;
      upd->loc = e.loc;
      upd->a = RExpr::load(t, llv.base, false, e.loc);
      upd->b = RExpr::constant(1, llv.base, e.loc);
      int n2 = emit_linked(NodeKind::Assign, e.loc, 1);
      CfgNode &sn = cfg_.node(n2);
      sn.lhs = std::move(llv.lv);
      sn.rhs = std::move(upd);
      return RExpr::load(t, llv.base, false, e.loc);
    }

    RExprPtr rv = lower_value(*e.rhs());
    if (!rv) unsupported(e.loc, "void value on the right of =");
    if (value_used) {
      MemLocId t = fresh_temp(llv.base);
      int n1 = emit_linked(NodeKind::Assign, e.loc, 1);
      CfgNode &tn = cfg_.node(n1);
      tn.lhs.kind = LValue::Scalar;
      tn.lhs.id = t;
      tn.lhs.loc = e.loc;
      tn.rhs = std::move(rv);
      int n2 = emit_linked(NodeKind::Assign, e.loc, 1);
      CfgNode &sn = cfg_.node(n2);
      sn.lhs = std::move(llv.lv);
      sn.rhs = RExpr::load(t, llv.base, false, e.loc);
      return RExpr::load(t, llv.base, false, e.loc);
    }
    int n = emit_linked(NodeKind::Assign, e.loc, 1);
    CfgNode &sn = cfg_.node(n);
    sn.lhs = std::move(llv.lv);
    sn.rhs = std::move(rv);
    return nullptr;
  }

  void lower_cond(const Expr &e, Ends &true_ends, Ends &false_ends) {
    if (e.kind == ExprKind::Logic && e.logic_op == LogicOp::And) {
      Ends t0, f0;
      lower_cond(*e.kid(0), t0, f0);
      cur_ends_ = std::move(t0);
      Ends t1, f1;
      lower_cond(*e.kid(1), t1, f1);
      true_ends = std::move(t1);
      false_ends = std::move(f0);
      false_ends.merge(std::move(f1));
      return;
    }
    if (e.kind == ExprKind::Logic && e.logic_op == LogicOp::Or) {
      Ends t0, f0;
      lower_cond(*e.kid(0), t0, f0);
      cur_ends_ = std::move(f0);
      Ends t1, f1;
      lower_cond(*e.kid(1), t1, f1);
      true_ends = std::move(t0);
      true_ends.merge(std::move(t1));
      false_ends = std::move(f1);
      return;
    }
    if (e.kind == ExprKind::Unary && e.un_op == UnOp::Not) {
      lower_cond(*e.kid(0), false_ends, true_ends);
      return;
    }
    RExprPtr v = lower_value(e);
    int g = emit_linked(NodeKind::Guard, e.loc, 2);
    cfg_.node(g).rhs = std::move(v);
    cfg_.node(g).sense = true;
    cur_ends_.slots.clear();
    true_ends.add(g, 0);
    false_ends.add(g, 1);
  }

  // ---- statements ----

  void lower_full_expr_discarded(const Expr *e, SourceLoc loc) {
    cur_fe_ = new_full_expr(e, e ? e->loc : loc);
    if (e) {
      if (e->kind == ExprKind::Assign) {
        lower_assign(*e, /*value_used=*/false);
      } else if (e->kind == ExprKind::Call) {
        size_t before = cfg_.nodes.size();
        RExprPtr v = lower_call(*e);
        (void)v;  // call result unused
        assert(cfg_.nodes.size() > before);
      } else {
        lower_discarded(*e);
      }
      if (cfg_.full_exprs[cur_fe_].nodes.empty()) {
        int n = emit_linked(NodeKind::Nop, loc, 1);
        (void)n;
      }
    } else {
      emit_linked(NodeKind::Nop, loc, 1);
    }
    cur_fe_ = -1;
  }

  void lower_stmt(const Stmt &s) {
    switch (s.kind) {
      case StmtKind::Block:
        for (auto &c : s.body) lower_stmt(*c);
        return;
      case StmtKind::Expr:
        lower_full_expr_discarded(s.expr.get(), s.loc);
        return;
      case StmtKind::LocalDecl: {
        if (s.init) {
          cur_fe_ = new_full_expr(s.init.get(), s.loc);
          RExprPtr v = lower_value(*s.init);
          int n = emit_linked(NodeKind::Assign, s.loc, 1);
          CfgNode &an = cfg_.node(n);
          an.lhs.kind = LValue::Scalar;
          an.lhs.id = table_.of_decl(s.decl.get(), hw_);
          an.lhs.is_volatile = s.decl->is_volatile;
          an.lhs.loc = s.loc;
          an.rhs = std::move(v);
          cur_fe_ = -1;
        }
        return;
      }
      case StmtKind::If: {
        cur_fe_ = new_full_expr(s.expr.get(), s.expr->loc);
        Ends tr, fl;
        lower_cond(*s.expr, tr, fl);
        cur_fe_ = -1;
        cur_ends_ = std::move(tr);
        lower_stmt(*s.body[0]);
        Ends after = std::move(cur_ends_);
        cur_ends_ = std::move(fl);
        if (!s.body2.empty()) lower_stmt(*s.body2[0]);
        after.merge(std::move(cur_ends_));
        cur_ends_ = std::move(after);
        return;
      }
      case StmtKind::While: {
        int head = (int)cfg_.nodes.size();
        cur_fe_ = new_full_expr(s.expr.get(), s.expr->loc);
        Ends tr, fl;
        lower_cond(*s.expr, tr, fl);
        cur_fe_ = -1;
        loops_.push_back({});
        loops_.back().continue_target = head;
        cur_ends_ = std::move(tr);
        lower_stmt(*s.body[0]);
        patch(cur_ends_, head);  // back edge
        LoopCtx ctx = std::move(loops_.back());
        loops_.pop_back();
        for (auto &[n, slot] : ctx.pending_continues.slots)
          cfg_.node(n).succ[slot] = head;
        cur_ends_ = std::move(fl);
        cur_ends_.merge(std::move(ctx.breaks));
        return;
      }
      case StmtKind::DoWhile: {
        int body_head = (int)cfg_.nodes.size();
        loops_.push_back({});
        loops_.back().continue_target = -1;  // patched to cond head below
        lower_stmt(*s.body[0]);
        int cond_head = (int)cfg_.nodes.size();
        cur_fe_ = new_full_expr(s.expr.get(), s.expr->loc);
        Ends tr, fl;
        lower_cond(*s.expr, tr, fl);
        cur_fe_ = -1;
        patch(tr, body_head);  // back edge
        LoopCtx ctx = std::move(loops_.back());
        loops_.pop_back();
        for (auto &[n, slot] : ctx.pending_continues.slots)
          cfg_.node(n).succ[slot] = cond_head;
        cur_ends_ = std::move(fl);
        cur_ends_.merge(std::move(ctx.breaks));
        return;
      }
      case StmtKind::For: {
        if (s.expr2) lower_full_expr_discarded(s.expr2.get(), s.loc);
        int head = (int)cfg_.nodes.size();
        Ends tr, fl;
        if (s.expr) {
          cur_fe_ = new_full_expr(s.expr.get(), s.expr->loc);
          lower_cond(*s.expr, tr, fl);
          cur_fe_ = -1;
        } else {
          cur_fe_ = new_full_expr(nullptr, s.loc);
          int g = emit_linked(NodeKind::Guard, s.loc, 2);
          cfg_.node(g).rhs = RExpr::constant(1, Base::U8, s.loc);
          cur_fe_ = -1;
          cur_ends_.slots.clear();
          tr.add(g, 0);
          fl.add(g, 1);
        }
        loops_.push_back({});
        loops_.back().continue_target = -1;  // step comes after the body
        cur_ends_ = std::move(tr);
        lower_stmt(*s.body[0]);
        int step_head;
        if (s.expr3) {
          step_head = (int)cfg_.nodes.size();
          lower_full_expr_discarded(s.expr3.get(), s.loc);
          patch(cur_ends_, head);
        } else {
          step_head = head;
          patch(cur_ends_, head);
        }
        LoopCtx ctx = std::move(loops_.back());
        loops_.pop_back();
        for (auto &[n, slot] : ctx.pending_continues.slots)
          cfg_.node(n).succ[slot] = step_head;
        cur_ends_ = std::move(fl);
        cur_ends_.merge(std::move(ctx.breaks));
        return;
      }
      case StmtKind::Return: {
        cur_fe_ = new_full_expr(s.expr.get(), s.loc);
        RExprPtr v;
        if (s.expr) v = lower_value(*s.expr);
        int n = emit_linked(NodeKind::Return, s.loc, 0);
        cfg_.node(n).rhs = std::move(v);
        cur_fe_ = -1;
        cur_ends_.slots.clear();
        return;
      }
      case StmtKind::Break: {
        if (loops_.empty()) unsupported(s.loc, "break outside a loop");
        loops_.back().breaks.merge(std::move(cur_ends_));
        cur_ends_.slots.clear();
        return;
      }
      case StmtKind::Continue: {
        if (loops_.empty()) unsupported(s.loc, "continue outside a loop");
        LoopCtx &ctx = loops_.back();
        if (ctx.continue_target >= 0)
          patch(cur_ends_, ctx.continue_target);
        else
          ctx.pending_continues.merge(std::move(cur_ends_));
        cur_ends_.slots.clear();
        return;
      }
    }
  }

  // ---- access collection ----

  void collect_reads(const RExpr &e, CfgNode &n) {
    switch (e.kind) {
      case RExpr::Const:
      case RExpr::Addr:
        return;
      case RExpr::Load: {
        DirectAccess a;
        a.loc = e.loc;
        a.is_volatile = e.is_volatile;
        if (e.deref_ptr)
          a.via_ptr = e.deref_ptr;
        else
          a.id = e.id;
        n.direct.push_back(a);
        if (e.index) collect_reads(*e.index, n);
        return;
      }
      case RExpr::Un:
        collect_reads(*e.a, n);
        return;
      case RExpr::Bin:
        collect_reads(*e.a, n);
        collect_reads(*e.b, n);
        return;
    }
  }

  void finalize_accesses(CfgNode &n) {
    if (n.rhs) collect_reads(*n.rhs, n);
    for (auto &a : n.args) collect_reads(*a, n);
    if (n.kind == NodeKind::Assign) {
      if (n.lhs.index) collect_reads(*n.lhs.index, n);
      DirectAccess w;
      w.write = true;
      w.is_volatile = n.lhs.is_volatile;
      w.loc = n.lhs.loc;
      if (n.lhs.kind == LValue::PtrDeref)
        w.via_ptr = n.lhs.ptr;
      else
        w.id = n.lhs.id;
      n.direct.push_back(w);
    }
  }

  const FunctionDef &fn_;
  MemLocTable &table_;
  const HardwareSpec &hw_;
  Cfg cfg_;
  Ends cur_ends_;
  int cur_fe_ = -1;
  int temp_idx_ = 0;
  std::vector<LoopCtx> loops_;
};

}  // namespace

Cfg lower_function(const FunctionDef &fn, MemLocTable &table,
                   const HardwareSpec &hw) {
  return Lowerer(fn, table, hw).run();
}

std::map<const FunctionDef *, Cfg> lower_program(const Program &prog,
                                                 MemLocTable &table,
                                                 const HardwareSpec &hw) {
  std::map<const FunctionDef *, Cfg> out;
  for (const FunctionDef *f : prog.all_functions())
    out.emplace(f, lower_function(*f, table, hw));
  return out;
}

const std::vector<FullExpr> &mark_full_expressions(const Cfg &cfg) {
  std::set<int> seen;
  for (const auto &fe : cfg.full_exprs) {
    for (int n : fe.nodes) {
      assert(cfg.node(n).full_expr_id == fe.id);
      bool fresh = seen.insert(n).second;
      assert(fresh && "node in two full expressions");
      (void)fresh;
    }
  }
  for (const auto &n : cfg.nodes) {
    if (n->kind == NodeKind::IsrFixpoint) {
      assert(n->full_expr_id < 0);
      continue;
    }
    assert(n->full_expr_id >= 0 && seen.count(n->id) &&
           "non-synthetic node outside every full expression");
  }
  return cfg.full_exprs;
}

std::vector<int> full_expr_boundary(const Cfg &cfg, const FullExpr &fe) {
  std::set<int> members(fe.nodes.begin(), fe.nodes.end());
  std::vector<int> out;
  for (int id : fe.nodes) {
    const CfgNode &n = cfg.node(id);
    bool boundary = n.succ.empty();
    for (int s : n.succ)
      if (s < 0 || !members.count(s)) boundary = true;
    if (boundary) out.push_back(id);
  }
  return out;
}

std::string cfg_to_dot(const Cfg &cfg, const MemLocTable &table) {
  auto esc = [](std::string s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  };
  std::string out = "digraph \"" + esc(cfg.fn->name) + "\" {\n";
  out += "  node [shape=box, fontname=monospace];\n";
  for (const auto &np : cfg.nodes) {
    const CfgNode &n = *np;
    std::string label = "n" + std::to_string(n.id) + ": ";
    switch (n.kind) {
      case NodeKind::Nop:
        label += "nop";
        break;
      case NodeKind::Assign: {
        std::string lhs;
        if (n.lhs.kind == LValue::Scalar) {
          lhs = table.name(n.lhs.id);
        } else if (n.lhs.kind == LValue::ArrayElem) {
          std::string nm = table.name(n.lhs.id);
          lhs = nm.substr(0, nm.size() - 2) + "[" +
                rexpr_str(*n.lhs.index, table) + "]";
        } else {
          lhs = "*" + n.lhs.ptr->name;
        }
        label += lhs + " := " + rexpr_str(*n.rhs, table);
        break;
      }
      case NodeKind::Guard:
        label += "guard " + rexpr_str(*n.rhs, table);
        break;
      case NodeKind::Call: {
        if (n.builtin == CfgNode::Builtin::Sei)
          label += "sei()";
        else if (n.builtin == CfgNode::Builtin::Cli)
          label += "cli()";
        else {
          if (n.result != kNoMemLoc) label += table.name(n.result) + " := ";
          label += n.callee->name + "(";
          for (size_t i = 0; i < n.args.size(); ++i) {
            if (i) label += ", ";
            label += rexpr_str(*n.args[i], table);
          }
          label += ")";
        }
        break;
      }
      case NodeKind::Return:
        label += "return";
        if (n.rhs) label += " " + rexpr_str(*n.rhs, table);
        break;
      case NodeKind::IsrFixpoint:
        label += "ISR*";
        break;
    }
    if (n.full_expr_id >= 0)
      label += "  (e" + std::to_string(n.full_expr_id) + ")";
    out += "  n" + std::to_string(n.id) + " [label=\"" + esc(label) + "\"";
    if (n.kind == NodeKind::IsrFixpoint) out += ", style=dashed";
    out += "];\n";
    for (size_t i = 0; i < n.succ.size(); ++i) {
      if (n.succ[i] < 0) continue;
      out += "  n" + std::to_string(n.id) + " -> n" +
             std::to_string(n.succ[i]);
      if (n.kind == NodeKind::Guard)
        out += i == 0 ? " [label=\"T\"]" : " [label=\"F\"]";
      out += ";\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace mca
