#include "mca/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_set>

#include "mca/printer.hpp"
#include "mca/resolve.hpp"

namespace mca {

namespace {

// ---------------------------------------------------------------------------
// micro-instruction DAG construction

struct DagBuilder {
  const HardwareSpec &hw;
  std::vector<MicroInstr> instrs;
  std::vector<std::vector<int>> deps;  // prerequisites per instr
  std::vector<int> producer;           // temp -> instr writing it
  int temps = 0;

  explicit DagBuilder(const HardwareSpec &h) : hw(h) {}

  int new_temp() {
    producer.push_back(-1);
    return temps++;
  }

  int emit(MicroInstr mi, std::vector<int> dep) {
    int temp = mi.temp;
    instrs.push_back(std::move(mi));
    deps.push_back(std::move(dep));
    int idx = (int)instrs.size() - 1;
    if (temp >= 0) producer[temp] = idx;
    return idx;
  }

  // Dependencies order value availability, not side effects: a consumer
  // waits for the instruction that produces its operand temp (whose own
  // prerequisites order transitively); unsequenced stores stay free.
  std::vector<int> value_dep(int temp) const {
    if (temp < 0 || producer[temp] < 0) return {};
    return {producer[temp]};
  }

  static int bytes_of(Base b) { return bit_width(b) / 8; }

  bool atomic_width(int bits) const {
    return hw.atomic_bits > 0 && bits <= hw.atomic_bits;
  }

  struct Val {
    int temp = -1;
    std::vector<int> instrs;  // instruction indices that produce it
  };

  // loads a scalar location; width per decl type
  Val load_loc(const VarDecl *decl, const Val *index, int ptr_temp,
               bool vol, bool input, Base type, SourceLoc loc,
               std::vector<int> extra_deps) {
    Val out;
    int bits = bit_width(type);
    std::vector<int> dep = std::move(extra_deps);
    if (index) {
      std::vector<int> vd = value_dep(index->temp);
      dep.insert(dep.end(), vd.begin(), vd.end());
    }
    if (input || atomic_width(bits) || bits <= 8) {
      MicroInstr mi;
      mi.kind = MicroInstr::LoadByte;
      mi.temp = new_temp();
      mi.var = decl;
      mi.index_temp = index ? index->temp : -1;
      mi.ptr_temp = ptr_temp;
      mi.byte = -1;  // whole access
      mi.is_volatile = vol;
      mi.is_input = input;
      mi.loc = loc;
      mi.imm = (int64_t)type;  // carries the width/sign for decoding
      out.temp = mi.temp;
      out.instrs.push_back(emit(std::move(mi), dep));
      return out;
    }
    // split into byte units, mutually unordered
    std::vector<int> parts;
    std::vector<int> part_temps;
    int nb = bits / 8;
    for (int b = 0; b < nb; ++b) {
      MicroInstr mi;
      mi.kind = MicroInstr::LoadByte;
      mi.temp = new_temp();
      mi.var = decl;
      mi.index_temp = index ? index->temp : -1;
      mi.ptr_temp = ptr_temp;
      mi.byte = b;
      mi.is_volatile = vol;
      mi.loc = loc;
      part_temps.push_back(mi.temp);
      parts.push_back(emit(std::move(mi), dep));
    }
    MicroInstr comp;
    comp.kind = MicroInstr::Compose;
    comp.temp = new_temp();
    comp.args = part_temps;
    comp.imm = (int64_t)type;
    comp.loc = loc;
    out.temp = comp.temp;
    out.instrs = parts;
    out.instrs.push_back(emit(std::move(comp), parts));
    return out;
  }

  std::vector<int> store_loc(const VarDecl *decl, const Val *index,
                             int ptr_temp, bool vol, Base type, int src_temp,
                             SourceLoc loc, std::vector<int> dep) {
    if (index) {
      std::vector<int> vd = value_dep(index->temp);
      dep.insert(dep.end(), vd.begin(), vd.end());
    }
    int bits = bit_width(type);
    std::vector<int> out;
    if (atomic_width(bits) || bits <= 8) {
      MicroInstr mi;
      mi.kind = MicroInstr::StoreByte;
      mi.var = decl;
      mi.index_temp = index ? index->temp : -1;
      mi.ptr_temp = ptr_temp;
      mi.byte = -1;
      mi.is_volatile = vol;
      mi.src_temp = src_temp;
      mi.imm = (int64_t)type;
      mi.loc = loc;
      out.push_back(emit(std::move(mi), dep));
      return out;
    }
    int nb = bits / 8;
    for (int b = 0; b < nb; ++b) {
      MicroInstr mi;
      mi.kind = MicroInstr::StoreByte;
      mi.var = decl;
      mi.index_temp = index ? index->temp : -1;
      mi.ptr_temp = ptr_temp;
      mi.byte = b;
      mi.is_volatile = vol;
      mi.src_temp = src_temp;
      mi.imm = (int64_t)type;
      mi.loc = loc;
      out.push_back(emit(std::move(mi), dep));  // unordered units
    }
    return out;
  }

  bool is_input_reg(const VarDecl *d) const {
    if (!d || !d->absolute_address) return false;
    return classify_address(*d->absolute_address, hw).cls == RegClass::Input;
  }

  Val build(const Expr &e) {
    switch (e.kind) {
      case ExprKind::Const: {
        MicroInstr mi;
        mi.kind = MicroInstr::ConstV;
        mi.temp = new_temp();
        mi.imm = e.value;
        mi.loc = e.loc;
        Val v;
        v.temp = mi.temp;
        v.instrs.push_back(emit(std::move(mi), {}));
        return v;
      }
      case ExprKind::Var:
        return load_loc(e.decl, nullptr, -1, e.decl->is_volatile,
                        is_input_reg(e.decl), e.type.base, e.loc, {});
      case ExprKind::VolatileCast: {
        const Expr &in = *e.kid(0);
        return build_lvalue_read(in, true);
      }
      case ExprKind::Index:
      case ExprKind::Deref:
        return build_lvalue_read(e, false);
      case ExprKind::AddrOf: {
        const Expr *t = e.kid(0);
        MicroInstr mi;
        mi.kind = MicroInstr::AddrOfV;
        mi.temp = new_temp();
        mi.expr = &e;
        mi.loc = e.loc;
        Val out;
        std::vector<int> dep;
        if (t->kind == ExprKind::Index) {
          Val idx = build(*t->kid(1));
          dep = value_dep(idx.temp);
          mi.args = {idx.temp};
          mi.var = t->kid(0)->decl;
          out.instrs = idx.instrs;
        } else {
          mi.var = t->decl;
        }
        out.temp = mi.temp;
        out.instrs.push_back(emit(std::move(mi), dep));
        return out;
      }
      case ExprKind::Unary: {
        Val a = build(*e.kid(0));
        MicroInstr mi;
        mi.kind = MicroInstr::Op;
        mi.temp = new_temp();
        mi.expr = &e;
        mi.args = {a.temp};
        mi.loc = e.loc;
        Val out;
        out.temp = mi.temp;
        out.instrs = a.instrs;
        out.instrs.push_back(emit(std::move(mi), value_dep(a.temp)));
        return out;
      }
      case ExprKind::Binary: {
        Val a = build(*e.kid(0));
        Val b = build(*e.kid(1));
        MicroInstr mi;
        mi.kind = MicroInstr::Op;
        mi.temp = new_temp();
        mi.expr = &e;
        mi.args = {a.temp, b.temp};
        mi.loc = e.loc;
        std::vector<int> dep = value_dep(a.temp);
        std::vector<int> bd = value_dep(b.temp);
        dep.insert(dep.end(), bd.begin(), bd.end());
        Val out;
        out.temp = mi.temp;
        out.instrs = a.instrs;
        out.instrs.insert(out.instrs.end(), b.instrs.begin(), b.instrs.end());
        out.instrs.push_back(emit(std::move(mi), dep));
        return out;
      }
      case ExprKind::Logic:
      case ExprKind::Comma: {
        Val a = build(*e.kid(0));
        MicroInstr sp;
        sp.kind = MicroInstr::SeqPoint;
        sp.expr = &e;
        sp.args = {a.temp};
        sp.loc = e.loc;
        sp.temp = new_temp();  // unused, keeps temps distinct
        int sp_idx = emit(std::move(sp), a.instrs);
        int right_begin = (int)instrs.size();
        Val b = build(*e.kid(1));
        // everything on the right is sequenced after the marker
        for (int i = right_begin; i < (int)instrs.size(); ++i)
          deps[i].push_back(sp_idx);
        instrs[sp_idx].skip_begin = right_begin;
        instrs[sp_idx].skip_end = (int)instrs.size();
        if (e.kind == ExprKind::Logic)
          instrs[sp_idx].skip_when_true = e.logic_op == LogicOp::Or;
        else
          instrs[sp_idx].skip_begin = -1;  // comma never skips
        MicroInstr fin;
        fin.kind = MicroInstr::Op;
        fin.temp = new_temp();
        fin.expr = &e;
        fin.args = {a.temp, b.temp};
        fin.loc = e.loc;
        std::vector<int> dep = {sp_idx};
        std::vector<int> bd = value_dep(b.temp);
        dep.insert(dep.end(), bd.begin(), bd.end());
        Val out;
        out.temp = fin.temp;
        out.instrs = a.instrs;
        out.instrs.push_back(sp_idx);
        out.instrs.insert(out.instrs.end(), b.instrs.begin(), b.instrs.end());
        out.instrs.push_back(emit(std::move(fin), dep));
        return out;
      }
      case ExprKind::Call: {
        std::vector<Val> args;
        std::vector<int> all;
        for (auto &k : e.kids) {
          args.push_back(build(*k));
          all.insert(all.end(), args.back().instrs.begin(),
                     args.back().instrs.end());
        }
        MicroInstr mi;
        mi.kind = MicroInstr::CallMarker;
        mi.temp = new_temp();
        mi.expr = &e;
        for (auto &a : args) mi.args.push_back(a.temp);
        mi.loc = e.loc;
        Val out;
        out.temp = mi.temp;
        out.instrs = all;
        out.instrs.push_back(emit(std::move(mi), all));
        return out;
      }
      case ExprKind::Assign:
        return build_assign(e);
    }
    assert(false && "unreachable expression kind");
    return {};
  }

  Val build_lvalue_read(const Expr &e, bool vol) {
    const Expr *l = &e;
    if (l->kind == ExprKind::VolatileCast) {
      vol = true;
      l = l->kid(0);
    }
    switch (l->kind) {
      case ExprKind::Var:
        return load_loc(l->decl, nullptr, -1, vol || l->decl->is_volatile,
                        is_input_reg(l->decl), l->type.base, l->loc, {});
      case ExprKind::Index: {
        Val idx = build(*l->kid(1));
        return load_loc(l->kid(0)->decl, &idx, -1,
                        vol || l->kid(0)->decl->is_volatile, false,
                        l->type.base, l->loc, {});
      }
      case ExprKind::Deref: {
        Val p = build(*l->kid(0));
        Val out = load_loc(nullptr, nullptr, p.temp, vol, false, l->type.base,
                           l->loc, value_dep(p.temp));
        out.instrs.insert(out.instrs.begin(), p.instrs.begin(),
                          p.instrs.end());
        return out;
      }
      default:
        throw Diag("UnsupportedConstruct", l->loc, "oracle lvalue");
    }
  }

  Val build_assign(const Expr &e) {
    bool post = e.sugar == Sugar::PostInc || e.sugar == Sugar::PostDec;
    const Expr *lv = e.lhs();
    bool vol = false;
    if (lv->kind == ExprKind::VolatileCast) {
      vol = true;
      lv = lv->kid(0);
    }

    Val rhs = build(*e.rhs());
    int value_temp = rhs.temp;
    if (post) {
      // the expression's value is the lvalue read inside the update
      const Expr *old_read = e.rhs()->kid(0);
      (void)old_read;
      // the first instruction block of rhs evaluates the old value; its
      // temp is the first operand of the update op
      const MicroInstr &op = instrs[rhs.instrs.back()];
      assert(op.kind == MicroInstr::Op && op.args.size() == 2);
      value_temp = op.args[0];
    }

    std::vector<int> stores;
    switch (lv->kind) {
      case ExprKind::Var:
        stores = store_loc(lv->decl, nullptr, -1, vol || lv->decl->is_volatile,
                           lv->type.base, rhs.temp, e.loc,
                           value_dep(rhs.temp));
        break;
      case ExprKind::Index: {
        Val idx = build(*lv->kid(1));
        stores = store_loc(lv->kid(0)->decl, &idx, -1,
                           vol || lv->kid(0)->decl->is_volatile, lv->type.base,
                           rhs.temp, e.loc, value_dep(rhs.temp));
        rhs.instrs.insert(rhs.instrs.end(), idx.instrs.begin(),
                          idx.instrs.end());
        break;
      }
      case ExprKind::Deref: {
        Val p = build(*lv->kid(0));
        std::vector<int> dep = value_dep(rhs.temp);
        std::vector<int> pd = value_dep(p.temp);
        dep.insert(dep.end(), pd.begin(), pd.end());
        stores = store_loc(nullptr, nullptr, p.temp, vol, lv->type.base,
                           rhs.temp, e.loc, dep);
        rhs.instrs.insert(rhs.instrs.end(), p.instrs.begin(), p.instrs.end());
        break;
      }
      default:
        throw Diag("UnsupportedConstruct", lv->loc, "oracle assignment");
    }
    Val out;
    out.temp = value_temp;
    out.instrs = rhs.instrs;
    out.instrs.insert(out.instrs.end(), stores.begin(), stores.end());
    return out;
  }
};

// enumerate topological orders (deterministic, ascending tie-break)
struct OrderEnum {
  const std::vector<std::vector<int>> &deps;
  size_t cap;
  std::vector<std::vector<int>> orders;
  std::vector<int> cur;
  std::vector<int> remaining_deps;
  std::vector<char> done;

  void run(size_t n) {
    remaining_deps.assign(n, 0);
    done.assign(n, 0);
    for (size_t i = 0; i < n; ++i) remaining_deps[i] = (int)deps[i].size();
    rec(n);
  }

  void rec(size_t n) {
    if (cur.size() == n) {
      orders.push_back(cur);
      if (orders.size() > cap)
        throw Diag("ScheduleExplosion", SourceLoc{},
                   "more than " + std::to_string(cap) +
                       " instruction orders for one full expression");
      return;
    }
    for (size_t i = 0; i < n; ++i) {
      if (done[i] || remaining_deps[i] != 0) continue;
      done[i] = 1;
      cur.push_back((int)i);
      std::vector<size_t> dec;
      for (size_t j = 0; j < n; ++j) {
        if (done[j]) continue;
        for (int d : deps[j])
          if (d == (int)i) {
            --remaining_deps[j];
            dec.push_back(j);
          }
      }
      rec(n);
      for (size_t j : dec) ++remaining_deps[j];
      cur.pop_back();
      done[i] = 0;
    }
  }
};

}  // namespace

std::vector<Schedule> compile_schedules(const Expr &full_expr,
                                        const HardwareSpec &hw, size_t cap) {
  DagBuilder b(hw);
  DagBuilder::Val v = b.build(full_expr);
  OrderEnum oe{b.deps, cap, {}, {}, {}, {}};
  oe.run(b.instrs.size());
  std::vector<Schedule> out;
  for (const auto &order : oe.orders) {
    Schedule s;
    s.result_temp = v.temp;
    s.temp_count = b.temps;
    for (int old : order) {
      MicroInstr mi = b.instrs[old];
      mi.dag_index = old;  // skip ranges stay in DAG indexing
      s.instrs.push_back(std::move(mi));
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// the bounded interpreter

namespace {

int bytes_of_type(const CType &t) {
  if (t.is_pointer) return 2;
  if (t.is_array) return (int)t.array_len * (bit_width(t.base) / 8);
  return bit_width(t.base) / 8;
}

struct Layout {
  std::map<const VarDecl *, int> offset;
  int size = 0;

  void add(const VarDecl *d) {
    offset[d] = size;
    size += bytes_of_type(d->ctype);
  }
};

struct OStmt {
  enum K : uint8_t { Eval, Branch, Jump, Ret, Nop } k = Nop;
  const Expr *expr = nullptr;         // Eval / Branch cond / Ret value
  const VarDecl *store_to = nullptr;  // local-decl initializer target
  int t_target = -1, f_target = -1;   // Branch
  int target = -1;                    // Jump
};

struct FnCode {
  const FunctionDef *fn = nullptr;
  std::vector<OStmt> ops;
  Layout locals;
};

struct CodeBuilder {
  FnCode code;
  std::vector<std::pair<int, int>> loop_stack;  // (continue ip, break patch id)
  std::vector<std::vector<int>> break_patches;

  void build(const FunctionDef &fn) {
    code.fn = &fn;
    for (auto &p : fn.params) code.locals.add(p.get());
    for (const VarDecl *l : fn.locals) code.locals.add(l);
    stmt(*fn.body);
    OStmt ret;
    ret.k = OStmt::Ret;
    code.ops.push_back(ret);  // implicit return
  }

  int emit(OStmt s) {
    code.ops.push_back(std::move(s));
    return (int)code.ops.size() - 1;
  }

  void stmt(const Stmt &s) {
    switch (s.kind) {
      case StmtKind::Block:
        for (auto &c : s.body) stmt(*c);
        return;
      case StmtKind::Expr:
        if (s.expr) {
          OStmt o;
          o.k = OStmt::Eval;
          o.expr = s.expr.get();
          emit(o);
        }
        return;
      case StmtKind::LocalDecl:
        if (s.init) {
          OStmt o;
          o.k = OStmt::Eval;
          o.expr = s.init.get();
          o.store_to = s.decl.get();
          emit(o);
        }
        return;
      case StmtKind::If: {
        OStmt b;
        b.k = OStmt::Branch;
        b.expr = s.expr.get();
        int bi = emit(b);
        code.ops[bi].t_target = (int)code.ops.size();
        stmt(*s.body[0]);
        if (s.body2.empty()) {
          code.ops[bi].f_target = (int)code.ops.size();
        } else {
          OStmt j;
          j.k = OStmt::Jump;
          int ji = emit(j);
          code.ops[bi].f_target = (int)code.ops.size();
          stmt(*s.body2[0]);
          code.ops[ji].target = (int)code.ops.size();
        }
        return;
      }
      case StmtKind::While: {
        int head = (int)code.ops.size();
        OStmt b;
        b.k = OStmt::Branch;
        b.expr = s.expr.get();
        int bi = emit(b);
        code.ops[bi].t_target = (int)code.ops.size();
        loop_stack.push_back({head, (int)break_patches.size()});
        break_patches.emplace_back();
        stmt(*s.body[0]);
        OStmt j;
        j.k = OStmt::Jump;
        j.target = head;
        emit(j);
        code.ops[bi].f_target = (int)code.ops.size();
        for (int p : break_patches.back())
          code.ops[p].target = (int)code.ops.size();
        break_patches.pop_back();
        loop_stack.pop_back();
        return;
      }
      case StmtKind::DoWhile: {
        int head = (int)code.ops.size();
        // continue jumps to the condition; patch afterwards
        loop_stack.push_back({-1, (int)break_patches.size()});
        break_patches.emplace_back();
        std::vector<int> cont_fixups;
        size_t lp_index = loop_stack.size() - 1;
        stmt(*s.body[0]);
        int cond_ip = (int)code.ops.size();
        // patch continues emitted inside (they used Jump with target -2 -
        // see Continue below)
        for (size_t i = head; i < code.ops.size(); ++i)
          if (code.ops[i].k == OStmt::Jump && code.ops[i].target == -2 - (int)lp_index)
            code.ops[i].target = cond_ip;
        OStmt b;
        b.k = OStmt::Branch;
        b.expr = s.expr.get();
        int bi = emit(b);
        code.ops[bi].t_target = head;
        code.ops[bi].f_target = (int)code.ops.size();
        for (int p : break_patches.back())
          code.ops[p].target = (int)code.ops.size();
        break_patches.pop_back();
        loop_stack.pop_back();
        (void)cont_fixups;
        return;
      }
      case StmtKind::For: {
        if (s.expr2) {
          OStmt o;
          o.k = OStmt::Eval;
          o.expr = s.expr2.get();
          emit(o);
        }
        int head = (int)code.ops.size();
        int bi = -1;
        if (s.expr) {
          OStmt b;
          b.k = OStmt::Branch;
          b.expr = s.expr.get();
          bi = emit(b);
          code.ops[bi].t_target = (int)code.ops.size();
        }
        loop_stack.push_back({-1, (int)break_patches.size()});
        break_patches.emplace_back();
        size_t lp_index = loop_stack.size() - 1;
        size_t body_begin = code.ops.size();
        stmt(*s.body[0]);
        int step_ip = (int)code.ops.size();
        if (s.expr3) {
          OStmt o;
          o.k = OStmt::Eval;
          o.expr = s.expr3.get();
          emit(o);
        }
        OStmt j;
        j.k = OStmt::Jump;
        j.target = head;
        emit(j);
        for (size_t i = body_begin; i < code.ops.size(); ++i)
          if (code.ops[i].k == OStmt::Jump && code.ops[i].target == -2 - (int)lp_index)
            code.ops[i].target = step_ip;
        if (bi >= 0) code.ops[bi].f_target = (int)code.ops.size();
        for (int p : break_patches.back())
          code.ops[p].target = (int)code.ops.size();
        break_patches.pop_back();
        loop_stack.pop_back();
        return;
      }
      case StmtKind::Return: {
        OStmt o;
        o.k = OStmt::Ret;
        o.expr = s.expr.get();
        emit(o);
        return;
      }
      case StmtKind::Break: {
        if (loop_stack.empty())
          throw Diag("UnsupportedConstruct", s.loc, "break outside a loop");
        OStmt j;
        j.k = OStmt::Jump;
        j.target = -1;
        int ji = emit(j);
        break_patches[loop_stack.back().second].push_back(ji);
        return;
      }
      case StmtKind::Continue: {
        if (loop_stack.empty())
          throw Diag("UnsupportedConstruct", s.loc, "continue outside a loop");
        OStmt j;
        j.k = OStmt::Jump;
        auto &lp = loop_stack.back();
        // while loops know their head; do/for get patched afterwards
        j.target = lp.first >= 0 ? lp.first
                                 : -2 - (int)(loop_stack.size() - 1);
        emit(j);
        return;
      }
    }
  }
};

struct OFrame {
  int fn = -1;  // index into the code table
  std::vector<uint8_t> locals;
  int ip = 0;
  bool in_eval = false;
  int sched = -1;
  int pos = 0;
  std::vector<int64_t> temps;
  uint64_t dead = 0;  // bitmask over dag indices (schedules stay small)
  int wait_temp = -1;
};

struct OConfig {
  std::vector<uint8_t> globals;
  uint8_t gflag = 0;
  std::vector<uint8_t> sflags;
  int budget = 0;
  int isr_depth = 0;
  std::vector<OFrame> frames;
};

struct ConfigHash {
  uint64_t h1, h2;
  bool operator==(const ConfigHash &o) const {
    return h1 == o.h1 && h2 == o.h2;
  }
};
struct ConfigHasher {
  size_t operator()(const ConfigHash &c) const {
    return (size_t)(c.h1 ^ (c.h2 * 0x9e3779b97f4a7c15ULL));
  }
};

class Vm {
 public:
  Vm(const Program &prog, const HardwareSpec &hw, const OracleConfig &cfg)
      : prog_(prog), hw_(hw), cfg_(cfg) {
    if (hw_.agnostic)
      throw Diag("SpecError", SourceLoc{},
                 "the oracle needs a concrete hardware model");
    for (auto &g : prog_.globals) globals_.add(g.get());
    for (const FunctionDef *f : prog_.all_functions()) {
      CodeBuilder cb;
      cb.build(*f);
      fn_index_[f] = (int)code_.size();
      code_.push_back(std::move(cb.code));
    }
    for (size_t i = 0; i < hw_.sources.size(); ++i) {
      const FunctionDef *isr = prog_.find_isr(hw_.sources[i].vector);
      source_isr_.push_back(isr ? fn_index_.at(isr) : -1);
    }
  }

  // fires_inside: interrupt placements between micro instructions; when
  // false only statement boundaries fire (the requirement-1 baseline).
  OracleResult run(bool fires_inside = true) {
    fires_inside_ = fires_inside;
    result_ = OracleResult{};
    visited_.clear();
    OConfig init = initial_config();
    explore(std::move(init));
    return std::move(result_);
  }

  // requirement-1 experiment support: run a single expression from a
  // packed machine state (globals+flags+main locals), collecting the final
  // packed states at its completion (with trailing boundary fires).
  std::set<std::vector<uint8_t>> run_single_expr(const Expr *expr,
                                                 const FunctionDef *host,
                                                 std::vector<uint8_t> sigma,
                                                 int budget,
                                                 bool fires_inside);

  // boundary-only exploration recording packed pre-states per full expr of
  // the host function's frames.
  std::map<const Expr *, std::set<std::vector<uint8_t>>> collect_prestates(
      const FunctionDef *host);

  std::vector<uint8_t> pack_state(const OConfig &c,
                                  const OFrame *host_frame) const;
  std::string describe_packed(const std::vector<uint8_t> &s,
                              const FunctionDef *host) const;

 private:
  OConfig initial_config() {
    OConfig c;
    c.globals.assign(globals_.size, 0);
    for (auto &g : prog_.globals)
      if (g->init_value)
        write_scalar(c.globals, globals_.offset.at(g.get()),
                     bytes_of_type(g->ctype), *g->init_value);
    c.gflag = hw_.global_enable_initial ? 1 : 0;
    c.sflags.assign(hw_.sources.size(), 0);
    c.budget = cfg_.isr_fires_max;
    const FunctionDef *entry = prog_.entry_function();
    c.frames.push_back(make_frame(entry));
    return c;
  }

  OFrame make_frame(const FunctionDef *fn) {
    OFrame f;
    f.fn = fn_index_.at(fn);
    f.locals.assign(code_[f.fn].locals.size, 0);
    return f;
  }

  static void write_scalar(std::vector<uint8_t> &mem, int off, int bytes,
                           int64_t v) {
    for (int i = 0; i < bytes; ++i) mem[off + i] = (uint8_t)(v >> (8 * i));
  }
  static int64_t read_scalar(const std::vector<uint8_t> &mem, int off,
                             int bytes, bool sign) {
    int64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= (int64_t)mem[off + i] << (8 * i);
    if (sign) {
      int bits = bytes * 8;
      int64_t m = int64_t(1) << (bits - 1);
      v = (v ^ m) - m;
    }
    return v;
  }

  // --- exploration ---

  void explore(OConfig init) {
    std::vector<OConfig> stack;
    stack.push_back(std::move(init));
    while (!stack.empty()) {
      OConfig c = std::move(stack.back());
      stack.pop_back();
      ConfigHash h = hash_config(c);
      if (!visited_.insert(h).second) continue;
      if (++result_.configs_explored > cfg_.max_configs)
        throw Diag("StateBudgetExceeded", SourceLoc{},
                   "oracle exceeded " + std::to_string(cfg_.max_configs) +
                       " configurations");
      step(c, stack);
    }
  }

  ConfigHash hash_config(const OConfig &c) const {
    std::vector<uint8_t> buf;
    serialize(c, buf);
    uint64_t h1 = 1469598103934665603ULL, h2 = 1099511628211ULL * 31 + 7;
    for (uint8_t b : buf) {
      h1 = (h1 ^ b) * 1099511628211ULL;
      h2 = (h2 ^ (b + 17)) * 0x100000001b3ULL;
    }
    return {h1, h2};
  }

  static void put32(std::vector<uint8_t> &buf, int64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back((uint8_t)(v >> (8 * i)));
  }

  void serialize(const OConfig &c, std::vector<uint8_t> &buf) const {
    buf.insert(buf.end(), c.globals.begin(), c.globals.end());
    buf.push_back(c.gflag);
    buf.insert(buf.end(), c.sflags.begin(), c.sflags.end());
    buf.push_back((uint8_t)c.budget);
    buf.push_back((uint8_t)c.isr_depth);
    for (const OFrame &f : c.frames) {
      buf.push_back(0xFE);
      put32(buf, f.fn);
      put32(buf, f.ip);
      buf.insert(buf.end(), f.locals.begin(), f.locals.end());
      buf.push_back(f.in_eval);
      if (f.in_eval) {
        put32(buf, f.sched);
        put32(buf, f.pos);
        put32(buf, (int64_t)f.dead);
        put32(buf, f.wait_temp);
        for (int64_t t : f.temps) put32(buf, t);
      }
    }
  }

  const Schedule &schedule_of(const Expr *e, int idx) {
    auto it = sched_cache_.find(e);
    if (it == sched_cache_.end())
      it = sched_cache_.emplace(e, compile_schedules(*e, hw_, 64)).first;
    return it->second[idx];
  }
  size_t schedule_count(const Expr *e) {
    auto it = sched_cache_.find(e);
    if (it == sched_cache_.end())
      it = sched_cache_.emplace(e, compile_schedules(*e, hw_, 64)).first;
    return it->second.size();
  }

  bool fire_point(const OConfig &c) const {
    if (c.isr_depth > 0 || !c.gflag || c.budget <= 0) return false;
    const OFrame &f = c.frames.back();
    if (f.wait_temp >= 0 && !f.in_eval) return false;
    if (!fires_inside_ && f.in_eval) return false;
    return true;
  }

  void offer_fires(const OConfig &c, std::vector<OConfig> &out) {
    if (!fire_point(c)) return;
    for (size_t s = 0; s < hw_.sources.size(); ++s) {
      if (!c.sflags[s] || source_isr_[s] < 0) continue;
      OConfig n = c;
      n.budget -= 1;
      n.gflag = 0;  // hardware clears the global bit on entry
      n.isr_depth += 1;
      OFrame isr;
      isr.fn = source_isr_[s];
      isr.locals.assign(code_[isr.fn].locals.size, 0);
      n.frames.push_back(std::move(isr));
      out.push_back(std::move(n));
    }
  }

  void step(const OConfig &c, std::vector<OConfig> &out) {
    if (c.frames.empty()) {
      ++result_.traces_completed;
      return;
    }
    offer_fires(c, out);
    const OFrame &f = c.frames.back();
    const FnCode &fc = code_[f.fn];
    if (!f.in_eval && f.fn == synthetic_fn_ && f.ip >= 1) {
      // end of a single-expression experiment: record, allow trailing fires
      if (final_sink_) final_sink_->insert(pack_state(c, &f));
      ++result_.traces_completed;
      return;
    }
    if (f.in_eval) {
      exec_instr(c, out);
      return;
    }
    if (f.ip >= (int)fc.ops.size()) {
      OConfig n = c;
      pop_frame(n, 0);
      out.push_back(std::move(n));
      return;
    }
    const OStmt &op = fc.ops[f.ip];
    if (prestate_sink_ && op.expr && fc.fn == host_ && c.isr_depth == 0 &&
        (op.k == OStmt::Eval || op.k == OStmt::Branch || op.k == OStmt::Ret))
      (*prestate_sink_)[op.expr].insert(pack_state(c, &f));
    switch (op.k) {
      case OStmt::Nop: {
        OConfig n = c;
        n.frames.back().ip += 1;
        out.push_back(std::move(n));
        return;
      }
      case OStmt::Jump: {
        OConfig n = c;
        n.frames.back().ip = op.target;
        out.push_back(std::move(n));
        return;
      }
      case OStmt::Ret: {
        if (!op.expr) {
          OConfig n = c;
          pop_frame(n, 0);
          out.push_back(std::move(n));
          return;
        }
        start_eval(c, op.expr, out);
        return;
      }
      case OStmt::Eval:
      case OStmt::Branch:
        start_eval(c, op.expr, out);
        return;
    }
  }

  void start_eval(const OConfig &c, const Expr *e,
                  std::vector<OConfig> &out) {
    size_t ns = schedule_count(e);
    for (size_t i = 0; i < ns; ++i) {
      OConfig n = c;
      OFrame &f = n.frames.back();
      f.in_eval = true;
      f.sched = (int)i;
      f.pos = 0;
      f.dead = 0;
      f.wait_temp = -1;
      f.temps.assign(schedule_of(e, (int)i).temp_count, 0);
      out.push_back(std::move(n));
    }
  }

  const Expr *current_expr(const OConfig &c) const {
    const OFrame &f = c.frames.back();
    const OStmt &op = code_[f.fn].ops[f.ip];
    return op.expr;
  }

  void exec_instr(const OConfig &c0, std::vector<OConfig> &out) {
    OConfig c = c0;
    OFrame &f = c.frames.back();
    const Expr *root = current_expr(c);
    const Schedule &sch = schedule_of(root, f.sched);

    // skip dead instructions eagerly
    while (f.pos < (int)sch.instrs.size() &&
           (f.dead >> sch.instrs[f.pos].dag_index) & 1)
      f.pos += 1;
    if (f.pos >= (int)sch.instrs.size()) {
      complete_eval(std::move(c), sch, out);
      return;
    }
    const MicroInstr &mi = sch.instrs[f.pos];
    f.pos += 1;

    switch (mi.kind) {
      case MicroInstr::ConstV:
        f.temps[mi.temp] = mi.imm;
        break;
      case MicroInstr::AddrOfV: {
        int base = globals_.offset.count(mi.var) ? globals_.offset.at(mi.var)
                                                 : -1;
        if (base < 0) {
          ++result_.traps;  // address of a non-global: unsupported
          return;
        }
        int64_t addr = base + 1;  // +1 so that 0 stays invalid
        if (!mi.args.empty()) {
          int elem = bit_width(mi.var->ctype.base) / 8;
          addr += f.temps[mi.args[0]] * elem;
        }
        f.temps[mi.temp] = addr;
        break;
      }
      case MicroInstr::LoadByte: {
        if (mi.is_input) {
          const InputRegister *reg = nullptr;
          for (auto &r : hw_.inputs)
            if (mi.var->absolute_address &&
                r.address == *mi.var->absolute_address)
              reg = &r;
          assert(reg && "input load without a register");
          for (int64_t v : reg->test_values) {
            OConfig n = c;
            n.frames.back().temps[mi.temp] = v;
            out.push_back(std::move(n));
          }
          return;
        }
        int64_t v;
        if (!load_value(c, mi, v)) {
          ++result_.traps;
          return;
        }
        f.temps[mi.temp] = v;
        break;
      }
      case MicroInstr::StoreByte: {
        if (!store_value(c, mi, f.temps[mi.src_temp])) {
          ++result_.traps;
          return;
        }
        break;
      }
      case MicroInstr::Compose: {
        int64_t v = 0;
        for (size_t i = 0; i < mi.args.size(); ++i)
          v |= (f.temps[mi.args[i]] & 0xFF) << (8 * i);
        Base b = (Base)mi.imm;
        if (is_signed(b)) {
          int bits = bit_width(b);
          int64_t m = int64_t(1) << (bits - 1);
          v = (v ^ m) - m;
        }
        f.temps[mi.temp] = v;
        break;
      }
      case MicroInstr::Op: {
        int64_t v;
        if (!eval_op(mi, f.temps, v)) {
          ++result_.traps;
          return;
        }
        f.temps[mi.temp] = v;
        break;
      }
      case MicroInstr::SeqPoint: {
        if (mi.skip_begin >= 0 && mi.expr->kind == ExprKind::Logic) {
          bool left_true = f.temps[mi.args[0]] != 0;
          if (left_true == mi.skip_when_true) {
            for (int d = mi.skip_begin; d < mi.skip_end; ++d)
              f.dead |= uint64_t(1) << d;
          }
        }
        break;
      }
      case MicroInstr::CallMarker: {
        const Expr *call = mi.expr;
        if (is_sei_call(*call)) {
          c.gflag = 1;
          break;
        }
        if (is_cli_call(*call)) {
          c.gflag = 0;
          break;
        }
        f.wait_temp = mi.temp;
        OFrame callee = make_frame(call->callee);
        const FnCode &cc = code_[callee.fn];
        for (size_t i = 0; i < call->callee->params.size(); ++i) {
          const VarDecl *p = call->callee->params[i].get();
          write_scalar(callee.locals, cc.locals.offset.at(p),
                       bytes_of_type(p->ctype),
                       wrap_to(p->ctype.base, f.temps[mi.args[i]]));
        }
        c.frames.push_back(std::move(callee));
        break;
      }
    }

    // after the last live instruction the evaluation completes, unless a
    // callee now runs on top
    if (c.frames.back().wait_temp < 0 || c.frames.back().in_eval) {
      OFrame &g = c.frames.back();
      if (g.in_eval) {
        const Schedule &s2 = schedule_of(current_expr(c), g.sched);
        while (g.pos < (int)s2.instrs.size() &&
               (g.dead >> s2.instrs[g.pos].dag_index) & 1)
          g.pos += 1;
        if (g.pos >= (int)s2.instrs.size() && g.wait_temp < 0) {
          complete_eval(std::move(c), s2, out);
          return;
        }
      }
    }
    out.push_back(std::move(c));
  }

  static int64_t wrap_to(Base b, int64_t v) {
    int bits = bit_width(b);
    uint64_t mask = bits >= 64 ? ~0ULL : ((uint64_t(1) << bits) - 1);
    uint64_t u = (uint64_t)v & mask;
    if (is_signed(b)) {
      uint64_t m = uint64_t(1) << (bits - 1);
      return (int64_t)((u ^ m) - m);
    }
    return (int64_t)u;
  }

  struct Cell {
    std::vector<uint8_t> *mem;
    int off;
    int bytes;
    bool sign;
  };

  bool resolve(OConfig &c, const MicroInstr &mi, Cell &cell) {
    const VarDecl *d = mi.var;
    OFrame &f = c.frames.back();
    if (mi.ptr_temp >= 0) {
      int64_t addr = f.temps[mi.ptr_temp];
      if (addr <= 0 || addr > (int64_t)c.globals.size()) return false;
      Base b = (Base)mi.imm;
      cell = {&c.globals, (int)addr - 1, bit_width(b) / 8, is_signed(b)};
      return cell.off + cell.bytes <= (int)c.globals.size();
    }
    assert(d);
    std::vector<uint8_t> *mem;
    int base;
    if (d->storage == Storage::Global) {
      mem = &c.globals;
      base = globals_.offset.at(d);
    } else {
      // locals of the innermost frame owning them
      mem = nullptr;
      base = -1;
      for (auto it = c.frames.rbegin(); it != c.frames.rend(); ++it) {
        const FnCode &fc = code_[it->fn];
        auto f2 = fc.locals.offset.find(d);
        if (f2 != fc.locals.offset.end()) {
          mem = &it->locals;
          base = f2->second;
          break;
        }
      }
      if (!mem) return false;
    }
    int elem_bytes = bit_width(d->ctype.base) / 8;
    if (mi.index_temp >= 0) {
      int64_t idx = f.temps[mi.index_temp];
      if (idx < 0 || idx >= d->ctype.array_len) return false;  // overrun
      base += (int)idx * elem_bytes;
    }
    cell = {mem, base, elem_bytes, is_signed(d->ctype.base)};
    if (d->ctype.is_pointer) {
      cell.bytes = 2;
      cell.sign = false;
    }
    return true;
  }

  bool load_value(OConfig &c, const MicroInstr &mi, int64_t &out) {
    Cell cell;
    if (!resolve(c, mi, cell)) return false;
    if (mi.byte < 0) {
      out = read_scalar(*cell.mem, cell.off, cell.bytes, cell.sign);
    } else {
      out = (*cell.mem)[cell.off + mi.byte];
    }
    return true;
  }

  bool store_value(OConfig &c, const MicroInstr &mi, int64_t v) {
    Cell cell;
    if (!resolve(c, mi, cell)) return false;
    // enable-bit side effects of register stores
    if (mi.var && mi.var->absolute_address && mi.byte <= 0) {
      // whole-register store value (byte stores of registers are 8-bit
      // anyway on this corpus)
      int64_t addr = *mi.var->absolute_address;
      if (addr == hw_.global_enable_reg)
        c.gflag = (v >> hw_.global_enable_bit) & 1;
      for (size_t s = 0; s < hw_.sources.size(); ++s)
        if (hw_.sources[s].enable_reg == addr)
          c.sflags[s] = (v >> hw_.sources[s].enable_bit) & 1;
    }
    if (mi.byte < 0) {
      write_scalar(*cell.mem, cell.off, cell.bytes, v);
    } else {
      (*cell.mem)[cell.off + mi.byte] = (uint8_t)(v >> (8 * mi.byte));
    }
    return true;
  }

  bool eval_op(const MicroInstr &mi, const std::vector<int64_t> &temps,
               int64_t &out) {
    const Expr &e = *mi.expr;
    if (e.kind == ExprKind::Unary) {
      int64_t a = temps[mi.args[0]];
      switch (e.un_op) {
        case UnOp::Neg: out = -a; return true;
        case UnOp::Not: out = a == 0 ? 1 : 0; return true;
        case UnOp::BitNot:
          out = wrap_to(e.type.base, ~a);
          return true;
      }
      return false;
    }
    if (e.kind == ExprKind::Logic) {
      int64_t a = temps[mi.args[0]], b = temps[mi.args[1]];
      if (e.logic_op == LogicOp::And) out = (a != 0) ? (b != 0) : 0;
      else out = (a != 0) ? 1 : (b != 0);
      return true;
    }
    if (e.kind == ExprKind::Comma) {
      out = temps[mi.args[1]];
      return true;
    }
    assert(e.kind == ExprKind::Binary);
    int64_t a = temps[mi.args[0]], b = temps[mi.args[1]];
    switch (e.bin_op) {
      case BinOp::Add: out = a + b; return true;
      case BinOp::Sub: out = a - b; return true;
      case BinOp::Mul: out = a * b; return true;
      case BinOp::Div:
        if (b == 0) return false;
        out = a / b;
        return true;
      case BinOp::Mod:
        if (b == 0) return false;
        out = a % b;
        return true;
      case BinOp::Shl:
        if (b < 0 || b > 32) return false;
        out = a << b;
        return true;
      case BinOp::Shr:
        if (b < 0 || b > 32) return false;
        out = a >> b;
        return true;
      case BinOp::BitOr: out = a | b; return true;
      case BinOp::BitAnd: out = a & b; return true;
      case BinOp::BitXor: out = a ^ b; return true;
      case BinOp::Lt: out = a < b; return true;
      case BinOp::Le: out = a <= b; return true;
      case BinOp::Gt: out = a > b; return true;
      case BinOp::Ge: out = a >= b; return true;
      case BinOp::Eq: out = a == b; return true;
      case BinOp::Ne: out = a != b; return true;
    }
    return false;
  }

  void complete_eval(OConfig c, const Schedule &sch,
                     std::vector<OConfig> &out) {
    OFrame &f = c.frames.back();
    const FnCode &fc = code_[f.fn];
    const OStmt &op = fc.ops[f.ip];
    int64_t r = sch.result_temp >= 0 ? f.temps[sch.result_temp] : 0;
    f.in_eval = false;
    f.wait_temp = -1;

    if (op.store_to) {
      write_scalar(f.locals, fc.locals.offset.at(op.store_to),
                   bytes_of_type(op.store_to->ctype),
                   wrap_to(op.store_to->ctype.base, r));
    }

    record_snapshot(c, op.expr);

    switch (op.k) {
      case OStmt::Eval:
        f.ip += 1;
        break;
      case OStmt::Branch:
        f.ip = r != 0 ? op.t_target : op.f_target;
        break;
      case OStmt::Ret:
        pop_frame(c, r);
        break;
      default:
        assert(false);
    }
    out.push_back(std::move(c));
  }

  void pop_frame(OConfig &c, int64_t ret_value) {
    const FunctionDef *fn = code_[c.frames.back().fn].fn;
    bool was_isr = fn->is_isr;
    Base rt = fn->return_type.is_void() ? Base::U8 : fn->return_type.base;
    c.frames.pop_back();
    if (was_isr) {
      c.gflag = 1;  // reti restores the global bit
      c.isr_depth -= 1;
      return;
    }
    if (!c.frames.empty()) {
      OFrame &caller = c.frames.back();
      if (caller.wait_temp >= 0) {
        caller.temps[caller.wait_temp] = wrap_to(rt, ret_value);
        caller.wait_temp = -1;
        // if that was the last instruction, the caller's eval completes on
        // its next step (pos already past the marker)
      }
    }
  }

  void record_snapshot(const OConfig &c, const Expr *e) {
    if (!e) return;
    auto &slot = result_.at_seqpoint[e];
    for (auto &g : prog_.globals) {
      const VarDecl *d = g.get();
      if (d->absolute_address &&
          classify_address(*d->absolute_address, hw_).cls !=
              RegClass::PlainMemory)
        continue;
      int off = globals_.offset.at(d);
      if (d->ctype.is_array) {
        int eb = bit_width(d->ctype.base) / 8;
        for (int i = 0; i < d->ctype.array_len; ++i)
          slot[d].insert(read_scalar(c.globals, off + i * eb, eb,
                                     is_signed(d->ctype.base)));
      } else if (!d->ctype.is_pointer) {
        slot[d].insert(read_scalar(c.globals, off, bytes_of_type(d->ctype),
                                   is_signed(d->ctype.base)));
      }
    }
    const OFrame &f = c.frames.back();
    const FnCode &fc = code_[f.fn];
    for (auto &[d, off] : fc.locals.offset) {
      if (d->ctype.is_pointer || d->ctype.is_array) continue;
      slot[d].insert(read_scalar(f.locals, off, bytes_of_type(d->ctype),
                                 is_signed(d->ctype.base)));
    }
  }

  const Program &prog_;
  const HardwareSpec &hw_;
  OracleConfig cfg_;
  Layout globals_;
  std::vector<FnCode> code_;
  std::map<const FunctionDef *, int> fn_index_;
  std::vector<int> source_isr_;
  std::map<const Expr *, std::vector<Schedule>> sched_cache_;
  std::unordered_set<ConfigHash, ConfigHasher> visited_;
  OracleResult result_;
  bool fires_inside_ = true;

 public:
  std::map<const Expr *, std::set<std::vector<uint8_t>>> *prestate_sink_ =
      nullptr;
  std::set<std::vector<uint8_t>> *final_sink_ = nullptr;
  int synthetic_fn_ = -1;
  const FunctionDef *host_ = nullptr;
};

std::vector<uint8_t> Vm::pack_state(const OConfig &c,
                                    const OFrame *host_frame) const {
  std::vector<uint8_t> out = c.globals;
  out.push_back(c.gflag);
  out.insert(out.end(), c.sflags.begin(), c.sflags.end());
  if (host_frame)
    out.insert(out.end(), host_frame->locals.begin(),
               host_frame->locals.end());
  return out;
}

std::string Vm::describe_packed(const std::vector<uint8_t> &s,
                                const FunctionDef *host) const {
  std::string out;
  for (auto &g : prog_.globals) {
    const VarDecl *d = g.get();
    if (d->ctype.is_pointer || d->ctype.is_array) continue;
    if (d->absolute_address &&
        classify_address(*d->absolute_address, hw_).cls !=
            RegClass::PlainMemory)
      continue;
    int off = globals_.offset.at(d);
    int64_t v = read_scalar(s, off, bytes_of_type(d->ctype),
                            is_signed(d->ctype.base));
    if (!out.empty()) out += " ";
    out += d->name + "=" + std::to_string(v);
  }
  if (host) {
    const FnCode &fc = code_[fn_index_.at(host)];
    size_t base = globals_.size + 1 + hw_.sources.size();
    for (auto &[d, off] : fc.locals.offset) {
      if (d->ctype.is_pointer || d->ctype.is_array) continue;
      if (base + off + bytes_of_type(d->ctype) > s.size()) continue;
      int64_t v = 0;
      for (int i = 0; i < bytes_of_type(d->ctype); ++i)
        v |= (int64_t)s[base + off + i] << (8 * i);
      if (is_signed(d->ctype.base)) {
        int bits = bit_width(d->ctype.base);
        int64_t m = int64_t(1) << (bits - 1);
        v = (v ^ m) - m;
      }
      out += " " + host->name + "::" + d->name + "=" + std::to_string(v);
    }
  }
  return out;
}

std::map<const Expr *, std::set<std::vector<uint8_t>>> Vm::collect_prestates(
    const FunctionDef *host) {
  std::map<const Expr *, std::set<std::vector<uint8_t>>> map;
  host_ = host;
  prestate_sink_ = &map;
  run(false);
  prestate_sink_ = nullptr;
  host_ = nullptr;
  return map;
}

std::set<std::vector<uint8_t>> Vm::run_single_expr(const Expr *expr,
                                                   const FunctionDef *host,
                                                   std::vector<uint8_t> sigma,
                                                   int budget,
                                                   bool fires_inside) {
  if (synthetic_fn_ < 0) {
    FnCode fc;
    fc.fn = host;
    fc.locals = code_[fn_index_.at(host)].locals;
    fc.ops.resize(2);
    fc.ops[0].k = OStmt::Eval;
    fc.ops[1].k = OStmt::Nop;
    synthetic_fn_ = (int)code_.size();
    code_.push_back(std::move(fc));
  }
  code_[synthetic_fn_].fn = host;
  code_[synthetic_fn_].locals = code_[fn_index_.at(host)].locals;
  code_[synthetic_fn_].ops[0].expr = expr;

  OConfig c;
  c.globals.assign(sigma.begin(), sigma.begin() + globals_.size);
  size_t p = globals_.size;
  c.gflag = sigma[p++];
  c.sflags.assign(sigma.begin() + p, sigma.begin() + p + hw_.sources.size());
  p += hw_.sources.size();
  OFrame f;
  f.fn = synthetic_fn_;
  f.locals.assign(sigma.begin() + p, sigma.end());
  f.locals.resize(code_[synthetic_fn_].locals.size, 0);
  c.frames.push_back(std::move(f));
  c.budget = budget;

  std::set<std::vector<uint8_t>> finals;
  final_sink_ = &finals;
  fires_inside_ = fires_inside;
  visited_.clear();
  result_ = OracleResult{};
  explore(std::move(c));
  final_sink_ = nullptr;
  return finals;
}

}  // namespace

OracleResult enumerate_executions(const Program &prog, const HardwareSpec &hw,
                                  const OracleConfig &config) {
  Vm vm(prog, hw, config);
  return vm.run(true);
}

ContainmentReport check_containment(const OracleResult &oracle,
                                    const AnalysisSession &session) {
  ContainmentReport rep;

  // map the oracle's AST keys onto the analyzer's full expressions
  std::map<const Expr *, std::pair<const FunctionDef *, const FullExpr *>>
      by_ast;
  for (auto &[fn, cfg] : session.cfgs)
    for (const FullExpr &fe : cfg.full_exprs)
      if (fe.ast) by_ast[fe.ast] = {fn, &fe};

  for (auto &[expr, vars] : oracle.at_seqpoint) {
    auto it = by_ast.find(expr);
    if (it == by_ast.end()) continue;  // not a tracked boundary
    const FunctionDef *fn = it->second.first;
    const FullExpr &fe = *it->second.second;
    const Cfg &cfg = session.cfgs.at(fn);

    std::optional<AbstractState> post;
    for (int node : full_expr_boundary(cfg, fe)) {
      auto p = session.result.post_joined(fn, node);
      if (p) post = post ? state_join(*post, *p) : *p;
    }
    ++rep.points_checked;
    if (!post || post->is_bottom()) {
      ContainmentViolation v;
      v.at = expr;
      v.loc = fe.loc;
      v.detail = "oracle reaches a point the analysis deems unreachable";
      rep.violations.push_back(v);
      continue;
    }
    Octagon oct = post->oct.closed();
    for (auto &[decl, values] : vars) {
      MemLocId id = session.table.lookup_decl(decl);
      if (id == kNoMemLoc) continue;
      const MemLoc &m = session.table.info(id);
      if (!m.numeric()) continue;
      Interval b = oct.has_var(id) ? oct.bounds(id) : m.type_range();
      for (int64_t v : values) {
        ++rep.values_checked;
        if (!b.contains(v)) {
          ContainmentViolation viol;
          viol.at = expr;
          viol.loc = fe.loc;
          viol.var = m.name;
          viol.value = v;
          viol.bounds = b;
          viol.detail = "value " + std::to_string(v) + " of " + m.name +
                        " escapes " + b.str() + " after " + fe.loc.str();
          rep.violations.push_back(viol);
        }
      }
    }
  }
  return rep;
}

std::vector<Req1Finding> check_requirement1(const Program &prog,
                                            const HardwareSpec &hw,
                                            const SharedInfo &info,
                                            const OracleConfig &config) {
  Vm vm(prog, hw, config);
  const FunctionDef *host = prog.entry_function();
  auto prestates = vm.collect_prestates(host);

  std::vector<Req1Finding> out;
  for (auto &[expr, sigmas] : prestates) {
    Req1Finding f;
    f.expr = expr;
    f.loc = expr->loc;
    f.well_formed = is_well_formed(*expr, info).well_formed;
    f.holds = true;
    for (const auto &sigma : sigmas) {
      auto a = vm.run_single_expr(expr, host, sigma, config.isr_fires_max,
                                  /*fires_inside=*/true);
      auto b = vm.run_single_expr(expr, host, sigma, config.isr_fires_max,
                                  /*fires_inside=*/false);
      for (const auto &st : a) {
        if (!b.count(st)) {
          f.holds = false;
          f.witness = vm.describe_packed(st, host);
          break;
        }
      }
      if (!f.holds) break;
    }
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(),
            [](const Req1Finding &a, const Req1Finding &b) {
              if (a.loc.line != b.loc.line) return a.loc.line < b.loc.line;
              return a.loc.col < b.loc.col;
            });
  return out;
}

std::string render_oracle_result(const OracleResult &result) {
  std::vector<const Expr *> points;
  for (auto &[e, m] : result.at_seqpoint) points.push_back(e);
  std::sort(points.begin(), points.end(), [](const Expr *a, const Expr *b) {
    if (a->loc.line != b->loc.line) return a->loc.line < b->loc.line;
    return a->loc.col < b->loc.col;
  });
  std::string out;
  for (const Expr *e : points) {
    out += "after " + e->loc.str() + "  (" + print_expr(*e) + ")\n";
    for (auto &[d, vals] : result.at_seqpoint.at(e)) {
      out += "  " + d->name + " in {";
      bool first = true;
      for (int64_t v : vals) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(v);
      }
      out += "}\n";
    }
  }
  out += std::to_string(result.configs_explored) + " configurations, " +
         std::to_string(result.traces_completed) + " complete traces, " +
         std::to_string(result.traps) + " trapped\n";
  return out;
}

}  // namespace mca
