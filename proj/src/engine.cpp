#include "mca/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <set>

#include "mca/resolve.hpp"

namespace mca {

AbstractState state_join(const AbstractState &a, const AbstractState &b) {
  if (a.is_bottom()) return b;
  if (b.is_bottom()) return a;
  return {Octagon::join(a.oct, b.oct), ints_join(a.ints, b.ints)};
}

bool state_leq(const AbstractState &a, const AbstractState &b) {
  if (a.is_bottom()) return true;
  if (b.is_bottom()) return false;
  return Octagon::leq(a.oct, b.oct) && ints_leq(a.ints, b.ints);
}

std::optional<AbstractState> AnalysisResult::post_joined(
    const FunctionDef *fn, int node) const {
  std::optional<AbstractState> out;
  for (const auto &[key, st] : states) {
    if (key.first != fn) continue;
    if (node >= (int)st.by_node.size() || !st.by_node[node].post) continue;
    out = out ? state_join(*out, *st.by_node[node].post)
              : *st.by_node[node].post;
  }
  return out;
}

std::optional<AbstractState> AnalysisResult::pre_joined(const FunctionDef *fn,
                                                        int node) const {
  std::optional<AbstractState> out;
  for (const auto &[key, st] : states) {
    if (key.first != fn) continue;
    if (node >= (int)st.by_node.size() || !st.by_node[node].pre) continue;
    out = out ? state_join(*out, *st.by_node[node].pre) : *st.by_node[node].pre;
  }
  return out;
}

// ---------------------------------------------------------------------------
// interval evaluation of lowered expressions

namespace {

int64_t mask_upper(int64_t v) {
  int64_t m = 0;
  while (m < v) m = (m << 1) | 1;
  return m;
}

Interval type_range_of(Base b) { return {type_min(b), type_max(b)}; }

}  // namespace

Interval eval_rexpr_interval(const RExpr &e, const Octagon &oct,
                             const MemLocTable &table, const HardwareSpec &hw,
                             const PointsTo &pts) {
  switch (e.kind) {
    case RExpr::Const:
      return Interval::point(e.value);
    case RExpr::Addr:
      return Interval::point(0);  // addresses carry no numeric meaning here
    case RExpr::Load: {
      if (e.deref_ptr) {
        Interval out = Interval::empty();
        for (MemLocId t : pts.targets(e.deref_ptr)) {
          const MemLoc &m = table.info(t);
          Interval b = oct.has_var(t) ? oct.bounds(t) : m.type_range();
          out = out.join(b);
        }
        return out.is_empty() ? type_range_of(e.type) : out;
      }
      const MemLoc &m = table.info(e.id);
      if (m.kind == MemLocKind::Register) {
        if (m.reg_class == RegClass::Input) return m.input_range;
        return m.type_range();
      }
      if (!oct.has_var(e.id)) return m.type_range();
      return oct.bounds(e.id);
    }
    case RExpr::Un: {
      Interval a = eval_rexpr_interval(*e.a, oct, table, hw, pts);
      if (a.is_empty()) return a;
      switch (e.un) {
        case UnOp::Neg:
          return {-a.hi, -a.lo};
        case UnOp::Not:
          if (a.lo == 0 && a.hi == 0) return Interval::point(1);
          if (!a.contains(0)) return Interval::point(0);
          return {0, 1};
        case UnOp::BitNot:
          if (is_signed(e.type)) return {-a.hi - 1, -a.lo - 1};
          return {type_max(e.type) - a.hi, type_max(e.type) - a.lo};
      }
      return type_range_of(e.type);
    }
    case RExpr::Bin: {
      Interval a = eval_rexpr_interval(*e.a, oct, table, hw, pts);
      Interval b = eval_rexpr_interval(*e.b, oct, table, hw, pts);
      if (a.is_empty() || b.is_empty()) return Interval::empty();
      auto corners = [&](auto f) {
        int64_t c1 = f(a.lo, b.lo), c2 = f(a.lo, b.hi), c3 = f(a.hi, b.lo),
                c4 = f(a.hi, b.hi);
        return Interval{std::min(std::min(c1, c2), std::min(c3, c4)),
                        std::max(std::max(c1, c2), std::max(c3, c4))};
      };
      switch (e.bin) {
        case BinOp::Add:
          return {a.lo + b.lo, a.hi + b.hi};
        case BinOp::Sub:
          return {a.lo - b.hi, a.hi - b.lo};
        case BinOp::Mul:
          return corners([](int64_t x, int64_t y) { return x * y; });
        case BinOp::Div: {
          Interval out = Interval::empty();
          auto div_part = [&](int64_t dlo, int64_t dhi) {
            int64_t c1 = a.lo / dlo, c2 = a.lo / dhi, c3 = a.hi / dlo,
                    c4 = a.hi / dhi;
            out = out.join({std::min(std::min(c1, c2), std::min(c3, c4)),
                            std::max(std::max(c1, c2), std::max(c3, c4))});
          };
          if (b.lo < 0) div_part(b.lo, std::min<int64_t>(b.hi, -1));
          if (b.hi > 0) div_part(std::max<int64_t>(b.lo, 1), b.hi);
          // division by zero is undefined; no contribution
          return out.is_empty() ? type_range_of(e.type) : out;
        }
        case BinOp::Mod: {
          if (a.lo >= 0 && b.lo >= 1) return {0, std::min(a.hi, b.hi - 1)};
          return type_range_of(e.type);
        }
        case BinOp::Shl: {
          if (b.lo < 0 || b.hi > 16) return type_range_of(e.type);
          return corners([](int64_t x, int64_t y) { return x << y; });
        }
        case BinOp::Shr: {
          if (b.lo < 0 || b.hi > 16 || a.lo < 0) return type_range_of(e.type);
          return {a.lo >> b.hi, a.hi >> b.lo};
        }
        case BinOp::BitAnd: {
          if (a.lo >= 0 && b.lo >= 0)
            return {0, std::min(mask_upper(a.hi), mask_upper(b.hi))};
          return type_range_of(e.type);
        }
        case BinOp::BitOr: {
          if (a.lo >= 0 && b.lo >= 0)
            return {std::max(a.lo, b.lo), mask_upper(a.hi | b.hi)};
          return type_range_of(e.type);
        }
        case BinOp::BitXor: {
          if (a.lo >= 0 && b.lo >= 0) return {0, mask_upper(a.hi | b.hi)};
          return type_range_of(e.type);
        }
        case BinOp::Lt:
          if (a.hi < b.lo) return Interval::point(1);
          if (a.lo >= b.hi) return Interval::point(0);
          return {0, 1};
        case BinOp::Le:
          if (a.hi <= b.lo) return Interval::point(1);
          if (a.lo > b.hi) return Interval::point(0);
          return {0, 1};
        case BinOp::Gt:
          if (a.lo > b.hi) return Interval::point(1);
          if (a.hi <= b.lo) return Interval::point(0);
          return {0, 1};
        case BinOp::Ge:
          if (a.lo >= b.hi) return Interval::point(1);
          if (a.hi < b.lo) return Interval::point(0);
          return {0, 1};
        case BinOp::Eq:
          if (a.is_point() && b.is_point() && a.lo == b.lo)
            return Interval::point(1);
          if (a.hi < b.lo || b.hi < a.lo) return Interval::point(0);
          return {0, 1};
        case BinOp::Ne:
          if (a.is_point() && b.is_point() && a.lo == b.lo)
            return Interval::point(0);
          if (a.hi < b.lo || b.hi < a.lo) return Interval::point(1);
          return {0, 1};
      }
      return type_range_of(e.type);
    }
  }
  return type_range_of(e.type);
}

// ---------------------------------------------------------------------------
// enable-bit effects of nodes

namespace {

StoreValue store_value_of(const RExpr &rhs, MemLocId lhs_id) {
  StoreValue v;
  if (rhs.kind == RExpr::Const) {
    v.kind = StoreValue::Const;
    v.value = rhs.value;
    return v;
  }
  if (rhs.kind == RExpr::Bin &&
      (rhs.bin == BinOp::BitOr || rhs.bin == BinOp::BitAnd)) {
    const RExpr *reg = rhs.a.get(), *mask = rhs.b.get();
    if (reg->kind == RExpr::Const) std::swap(reg, mask);
    if (mask->kind == RExpr::Const && reg->kind == RExpr::Load &&
        !reg->index && !reg->deref_ptr && reg->id == lhs_id) {
      v.kind =
          rhs.bin == BinOp::BitOr ? StoreValue::OrConst : StoreValue::AndConst;
      v.value = mask->value;
      return v;
    }
  }
  v.kind = StoreValue::Opaque;
  return v;
}

EnableEffect node_enable_effect(const CfgNode &n, const MemLocTable &table,
                                const HardwareSpec &hw) {
  if (n.kind != NodeKind::Assign || n.lhs.kind != LValue::Scalar) return {};
  const MemLoc &m = table.info(n.lhs.id);
  if (m.kind != MemLocKind::Register || !m.decl || !m.decl->absolute_address)
    return {};
  return enable_effect_of_store(*m.decl->absolute_address,
                                store_value_of(*n.rhs, n.lhs.id), hw);
}

bool effect_may_enable(const EnableEffect &eff) {
  if (eff.touches_global && eff.global != Tri::Off) return true;
  for (auto &[idx, v] : eff.sources)
    if (v != Tri::Off) return true;
  return false;
}

bool callee_may_touch_enables(const FunctionDef *callee,
                              const AccessSets &access,
                              const MemLocTable &table) {
  if (!callee) return false;
  const auto &fa = access.of(callee);
  // sei()/cli() in a callee counts as a volatile side effect
  if (fa.volatile_side_effects) return true;
  for (MemLocId id : fa.writes)
    if (table.info(id).kind == MemLocKind::Register) return true;
  return false;
}

}  // namespace

int schedule_isr_nodes(Cfg &cfg, const SharedSet &shared,
                       const HardwareSpec &hw, const AccessSets &access,
                       const MemLocTable &table, bool is_entry) {
  size_t n0 = cfg.nodes.size();

  // Forward flag per node: is the global enable bit provably cleared just
  // after it (atomic section)? ISR effects are irrelevant: a handler
  // restores the flag on return.
  enum Flag : uint8_t { Disabled, Maybe };
  Flag entry_flag =
      (is_entry && !hw.agnostic && !hw.global_enable_initial) ? Disabled
                                                              : Maybe;
  std::vector<Flag> after(n0, Disabled);
  std::vector<char> reached(n0, 0);

  auto node_out_flag = [&](const CfgNode &n, Flag in) -> Flag {
    if (n.kind == NodeKind::Call) {
      if (n.builtin == CfgNode::Builtin::Sei) return Maybe;
      if (n.builtin == CfgNode::Builtin::Cli) return Disabled;
      if (callee_may_touch_enables(n.callee, access, table)) return Maybe;
      return in;
    }
    EnableEffect eff = node_enable_effect(n, table, hw);
    if (eff.touches_global) return eff.global == Tri::Off ? Disabled : Maybe;
    return in;
  };

  // fixpoint (tiny lattice, loop until stable)
  std::vector<Flag> before(n0, Disabled);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n0; ++i) {
      Flag in = (int)i == cfg.entry ? entry_flag : Disabled;
      bool any_pred = (int)i == cfg.entry;
      for (size_t p = 0; p < n0; ++p) {
        for (int s : cfg.nodes[p]->succ)
          if (s == (int)i && reached[p]) {
            any_pred = true;
            if (after[p] == Maybe) in = Maybe;
          }
      }
      if (!any_pred && !reached[i]) continue;
      Flag out = node_out_flag(*cfg.nodes[i], in);
      if (!reached[i] || before[i] != in || after[i] != out) {
        reached[i] = 1;
        before[i] = in;
        after[i] = out;
        changed = true;
      }
    }
  }

  // decide insertion sites on the original nodes
  std::vector<int> sites;
  for (size_t i = 0; i < n0; ++i) {
    const CfgNode &n = *cfg.nodes[i];
    if (n.succ.empty()) continue;  // nothing can run after a return here
    bool enables = false;
    if (n.kind == NodeKind::Call) {
      enables = n.builtin == CfgNode::Builtin::Sei ||
                (n.builtin == CfgNode::Builtin::None &&
                 callee_may_touch_enables(n.callee, access, table));
    } else {
      enables = effect_may_enable(node_enable_effect(n, table, hw));
    }
    bool shared_access = false;
    for (MemLocId id : n.reads) {
      const SharedVar *v = shared.find(id);
      if (v && v->pattern() != SharedVar::Pattern::ReadOnly)
        shared_access = true;
    }
    for (MemLocId id : n.writes) {
      const SharedVar *v = shared.find(id);
      if (v && v->pattern() != SharedVar::Pattern::ReadOnly)
        shared_access = true;
    }
    if (!enables && !shared_access) continue;
    if (after[i] == Disabled) continue;  // inside an atomic section
    sites.push_back((int)i);
  }

  // splice one fixpoint node per outgoing edge
  int inserted = 0;
  for (int id : sites) {
    CfgNode &n = cfg.node(id);
    for (size_t s = 0; s < n.succ.size(); ++s) {
      auto f = std::make_unique<CfgNode>();
      f->id = (int)cfg.nodes.size();
      f->kind = NodeKind::IsrFixpoint;
      f->loc = n.loc;
      f->full_expr_id = -1;
      f->succ = {n.succ[s]};
      n.succ[s] = f->id;
      cfg.nodes.push_back(std::move(f));
      ++inserted;
    }
  }
  return inserted;
}

// ---------------------------------------------------------------------------
// the engine

namespace {

using FnCtxKey = std::pair<const FunctionDef *, Context>;

struct WarnSink {
  std::vector<Warning> *out = nullptr;
  std::set<std::pair<int, std::pair<int, int>>> *seen = nullptr;  // kind+loc
  std::set<MemLocId> *nonvol_seen = nullptr;
};

class Engine {
 public:
  Engine(const Program &prog, std::map<const FunctionDef *, Cfg> &cfgs,
         const HardwareSpec &hw, const AccessSets &access,
         const SharedSet &shared, const PointsTo &pts, MemLocTable &table,
         const EngineConfig &config)
      : prog_(prog), cfgs_(cfgs), hw_(hw), access_(access), shared_(shared),
        pts_(pts), table_(table), cfg_conf_(config) {}

  AnalysisResult run() {
    auto t0 = std::chrono::steady_clock::now();
    init();
    const FunctionDef *entry = prog_.entry_function();
    assert(entry);
    AbstractState in = initial_state(entry);
    analyze_fn(entry, Context{}, in);
    sweep_warnings();
    for (auto &[key, a] : analyses_) {
      FnCtxStates st;
      st.by_node = a.node_states;
      result_.states.emplace(key, std::move(st));
    }
    auto t1 = std::chrono::steady_clock::now();
    result_.stats.isr_fixpoint_sites = total_sites_;
    result_.stats.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    return std::move(result_);
  }

 private:
  struct FnInfo {
    const Cfg *cfg = nullptr;
    std::vector<MemLocId> interface_vars;         // numeric, sorted
    std::vector<MemLocId> inner_vars;             // locals/temps not in iface
    std::vector<char> loop_head;                  // by node id
    std::vector<std::set<MemLocId>> fe_shared;    // per full expr
  };

  struct Analysis {
    AbstractState input;
    bool has_input = false;
    int input_joins = 0;
    bool valid = false;
    bool running = false;
    AbstractState exit_state;  // over interface vars
    std::vector<NodeStates> node_states;
  };

  // --- setup ---

  void init() {
    // deterministic call-site ids
    int next_site = 0;
    for (const FunctionDef *f : prog_.all_functions()) {
      Cfg &cfg = cfgs_.at(f);
      for (auto &np : cfg.nodes)
        if (np->kind == NodeKind::Call && np->callee)
          call_site_id_[np.get()] = next_site++;
    }
    for (auto &isr : prog_.isrs) {
      isr_list_.push_back(isr.get());
      isr_site_id_[isr.get()] = next_site++;
      int src = hw_.agnostic ? -1 : hw_.source_for_vector(isr->name);
      isr_source_.push_back(src);
    }

    std::set<MemLocId> isr_globals;
    std::set<MemLocId> isr_written;
    for (const FunctionDef *isr : isr_list_) {
      const auto &fa = access_.of(isr);
      for (MemLocId id : fa.reads) add_if_numeric_global(isr_globals, id);
      for (MemLocId id : fa.writes) add_if_numeric_global(isr_globals, id);
      for (MemLocId id : fa.writes) add_if_numeric_global(isr_written, id);
    }
    isr_union_vars_.assign(isr_globals.begin(), isr_globals.end());
    isr_written_union_.assign(isr_written.begin(), isr_written.end());

    for (const FunctionDef *f : prog_.all_functions()) {
      FnInfo info;
      Cfg &cfg = cfgs_.at(f);
      info.cfg = &cfg;

      std::set<MemLocId> iface = isr_globals;
      const auto &fa = access_.of(f);
      for (MemLocId id : fa.reads) add_if_numeric_global(iface, id);
      for (MemLocId id : fa.writes) add_if_numeric_global(iface, id);
      for (auto &p : f->params) {
        MemLocId id = table_.lookup_decl(p.get());
        if (id != kNoMemLoc && table_.info(id).numeric()) iface.insert(id);
      }
      if (cfg.return_slot != kNoMemLoc) iface.insert(cfg.return_slot);
      info.interface_vars.assign(iface.begin(), iface.end());

      std::set<MemLocId> inner;
      for (MemLocId id : cfg.locals)
        if (table_.info(id).numeric() && !iface.count(id)) inner.insert(id);
      for (MemLocId id : cfg.temps)
        if (table_.info(id).numeric()) inner.insert(id);
      info.inner_vars.assign(inner.begin(), inner.end());

      info.loop_head = find_loop_heads(cfg);

      info.fe_shared.resize(cfg.full_exprs.size());
      for (auto &np : cfg.nodes) {
        if (np->full_expr_id < 0) continue;
        auto &dst = info.fe_shared[np->full_expr_id];
        for (MemLocId id : np->reads)
          if (race_relevant(id)) dst.insert(id);
        for (MemLocId id : np->writes)
          if (race_relevant(id)) dst.insert(id);
      }
      fn_info_.emplace(f, std::move(info));

      for (auto &np : cfg.nodes)
        if (np->kind == NodeKind::IsrFixpoint) ++total_sites_;
    }
  }

  bool race_relevant(MemLocId id) const {
    const SharedVar *v = shared_.find(id);
    return v && v->pattern() != SharedVar::Pattern::ReadOnly;
  }

  void add_if_numeric_global(std::set<MemLocId> &dst, MemLocId id) {
    const MemLoc &m = table_.info(id);
    if (!m.numeric()) return;
    if (m.kind == MemLocKind::Global || m.kind == MemLocKind::ArraySummary)
      dst.insert(id);
  }

  static std::vector<char> find_loop_heads(const Cfg &cfg) {
    std::vector<char> head(cfg.nodes.size(), 0);
    std::vector<int> state(cfg.nodes.size(), 0);  // 0 new 1 open 2 done
    std::vector<std::pair<int, size_t>> stack;
    stack.push_back({cfg.entry, 0});
    state[cfg.entry] = 1;
    while (!stack.empty()) {
      auto &[n, i] = stack.back();
      const CfgNode &node = cfg.node(n);
      if (i >= node.succ.size()) {
        state[n] = 2;
        stack.pop_back();
        continue;
      }
      int s = node.succ[i++];
      if (s < 0) continue;
      if (state[s] == 0) {
        state[s] = 1;
        stack.push_back({s, 0});
      } else if (state[s] == 1) {
        head[s] = 1;  // back edge target
      }
    }
    return head;
  }

  Octagon::VarInfo var_info(MemLocId id) const {
    const MemLoc &m = table_.info(id);
    return {id, type_min(m.base), type_max(m.base)};
  }

  std::vector<Octagon::VarInfo> var_infos(
      const std::vector<MemLocId> &ids) const {
    std::vector<Octagon::VarInfo> out;
    out.reserve(ids.size());
    for (MemLocId id : ids) out.push_back(var_info(id));
    return out;
  }

  AbstractState initial_state(const FunctionDef *entry) {
    const FnInfo &info = fn_info_.at(entry);
    Octagon oct = Octagon::top(var_infos(info.interface_vars));
    for (MemLocId id : info.interface_vars) {
      const MemLoc &m = table_.info(id);
      if (m.kind == MemLocKind::Global) {
        int64_t init = m.decl && m.decl->init_value ? *m.decl->init_value : 0;
        oct = oct.assign_const(id, init);
      } else if (m.kind == MemLocKind::ArraySummary) {
        oct = oct.assign_const(id, 0);
      }
    }
    return {std::move(oct), InterruptState::initial(hw_)};
  }

  // --- function-level analysis with memoization ---

  AbstractState analyze_fn(const FunctionDef *fn, const Context &ctx,
                           const AbstractState &in) {
    FnCtxKey key{fn, ctx};
    Analysis &a = shadow_ ? shadow_analyses_[key] : analyses_[key];
    assert(!a.running && "call cycle slipped past the frontend");
    if (a.has_input && a.valid && state_leq(in, a.input)) return a.exit_state;
    if (!a.has_input) {
      a.input = in;
      a.has_input = true;
    } else {
      // inputs are exact joins of what call sites supply; the lattice is
      // finite (type-clamped integer bounds), so the chain terminates
      a.input = state_join(a.input, in);
    }
    a.valid = false;
    a.running = true;
    ++result_.stats.fn_analyses;
    run_body(fn, ctx, a);
    a.running = false;
    a.valid = true;
    return a.exit_state;
  }

  void run_body(const FunctionDef *fn, const Context &ctx, Analysis &a) {
    const FnInfo &info = fn_info_.at(fn);
    const Cfg &cfg = *info.cfg;
    size_t n = cfg.nodes.size();
    if (a.node_states.size() < n) a.node_states.resize(n);

    AbstractState entry_state = a.input;
    entry_state.oct = entry_state.oct.extended(var_infos(info.inner_vars));

    std::vector<std::optional<AbstractState>> pre(n);
    std::vector<int> join_count(n, 0);
    pre[cfg.entry] = entry_state;

    std::set<int> work{cfg.entry};
    while (!work.empty()) {
      int id = *work.begin();
      work.erase(work.begin());
      const CfgNode &node = cfg.node(id);
      bump_visits();
      if (!pre[id] || pre[id]->is_bottom()) continue;
      for (size_t s = 0; s < node.succ.size(); ++s) {
        int succ = node.succ[s];
        if (succ < 0) continue;
        AbstractState post =
            transfer_edge(fn, ctx, node, *pre[id], (int)s, nullptr);
        if (post.is_bottom()) continue;
        if (!pre[succ]) {
          pre[succ] = post;
          work.insert(succ);
          continue;
        }
        if (state_leq(post, *pre[succ])) continue;
        AbstractState joined = state_join(*pre[succ], post);
        if (info.loop_head[succ] &&
            ++join_count[succ] > cfg_conf_.widening_delay) {
          joined.oct = Octagon::widen(pre[succ]->oct, joined.oct);
          if (Octagon::same_repr(joined.oct, pre[succ]->oct) &&
              joined.ints == pre[succ]->ints)
            continue;
        }
        pre[succ] = std::move(joined);
        work.insert(succ);
      }
    }

    // one descending sweep: recompute each pre from its predecessors' posts
    std::vector<std::vector<std::pair<int, int>>> preds(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t s = 0; s < cfg.node((int)i).succ.size(); ++s) {
        int t = cfg.node((int)i).succ[s];
        if (t >= 0) preds[t].push_back({(int)i, (int)s});
      }
    for (size_t i = 0; i < n; ++i) {
      int id = (int)i;
      if (id == cfg.entry) {
        pre[id] = entry_state;
        continue;
      }
      if (preds[id].empty()) continue;
      std::optional<AbstractState> np;
      for (auto &[p, slot] : preds[id]) {
        if (!pre[p] || pre[p]->is_bottom()) continue;
        AbstractState post =
            transfer_edge(fn, ctx, cfg.node(p), *pre[p], slot, nullptr);
        if (post.is_bottom()) continue;
        np = np ? state_join(*np, post) : post;
      }
      if (np && pre[id] && state_leq(*np, *pre[id])) pre[id] = np;
    }

    // record states and the exit join
    std::optional<AbstractState> exit;
    for (size_t i = 0; i < n; ++i) {
      if (!pre[i]) continue;
      const CfgNode &node = cfg.node((int)i);
      if (shadow_ && node.kind != NodeKind::Return)
        continue;  // summaries only need the exit join
      const AbstractState &post = *pre[i];
      std::optional<AbstractState> joined_post;
      if (!post.is_bottom()) {
        for (size_t s = 0; s < std::max<size_t>(node.succ.size(), 1); ++s) {
          AbstractState p = transfer_edge(fn, ctx, node, post, (int)s, nullptr);
          if (p.is_bottom()) continue;
          joined_post = joined_post ? state_join(*joined_post, p) : p;
        }
        if (joined_post && node.kind == NodeKind::Return)
          exit = exit ? state_join(*exit, *joined_post) : *joined_post;
      }
      if (!shadow_) {
        NodeStates &ns = a.node_states[i];
        ns.pre = ns.pre ? state_join(*ns.pre, *pre[i]) : *pre[i];
        if (joined_post)
          ns.post = ns.post ? state_join(*ns.post, *joined_post) : *joined_post;
      }
    }

    const std::vector<MemLocId> &iface = info.interface_vars;
    if (exit) {
      exit->oct = exit->oct.restrict_to(iface);
      a.exit_state = *exit;
    } else {
      a.exit_state = {Octagon::bottom(var_infos(iface)),
                      InterruptState::initial(hw_)};
    }
  }

  void bump_visits() {
    if (++result_.stats.node_visits > cfg_conf_.max_visits)
      throw Diag("Diverged", SourceLoc{},
                 "node visit budget exceeded (" +
                     std::to_string(cfg_conf_.max_visits) +
                     "); the widening should have converged");
  }

  // --- shared-access dispatch (Table-style rules) ---

  struct Dispatch {
    bool exposed = false;  // some access can race right here
    bool corrupt = false;  // values involved are unreliable (rows 3/4)
    const std::set<MemLocId> *havoc_set = nullptr;
  };

  // Can ISR i fire under state ints?
  bool isr_can_fire(size_t i, const InterruptState &ints) const {
    if (hw_.agnostic) return ints.global != Tri::Off;
    int src = isr_source_[i];
    return src >= 0 && ints.can_fire(src);
  }

  Dispatch dispatch_shared(const FunctionDef *fn, const CfgNode &node,
                           const AbstractState &s, WarnSink *sink) {
    Dispatch d;
    if (node.kind == NodeKind::IsrFixpoint) return d;
    if (node.full_expr_id < 0) return d;
    // inside an atomic section (or a handler) nothing can interleave
    if (s.ints.global == Tri::Off) return d;

    struct Acc {
      const SharedVar *v;
      bool write;
      bool is_volatile;
      SourceLoc loc;
      bool isr_writes_racing = false;
    };
    std::vector<Acc> exposed;

    auto racing = [&](const SharedVar &v, bool write, bool &isr_writes) {
      bool any = false;
      isr_writes = false;
      for (size_t i = 0; i < isr_list_.size(); ++i) {
        if (!isr_can_fire(i, s.ints)) continue;
        bool ir = v.isr_reads_by.size() > i && v.isr_reads_by[i];
        bool iw = v.isr_writes_by.size() > i && v.isr_writes_by[i];
        if (write ? (ir || iw) : iw) any = true;
        if (iw) isr_writes = true;
      }
      return any;
    };

    auto consider = [&](MemLocId id, bool write, bool vol, SourceLoc loc) {
      const SharedVar *v = shared_.find(id);
      if (!v || v->pattern() == SharedVar::Pattern::ReadOnly) return;
      bool isr_writes = false;
      if (!racing(*v, write, isr_writes)) return;
      exposed.push_back({v, write, vol, loc, isr_writes});
    };

    // direct accesses carry the volatile flag; expand pointers plainly
    for (const DirectAccess &acc : node.direct) {
      if (acc.via_ptr) {
        for (MemLocId t : pts_.targets(acc.via_ptr))
          consider(t, acc.write, false, acc.loc);
      } else if (acc.id != kNoMemLoc) {
        consider(acc.id, acc.write, acc.is_volatile, acc.loc);
      }
    }
    if (exposed.empty()) return d;
    d.exposed = true;

    const FnInfo &info = fn_info_.at(fn);
    const FullExpr &fe = info.cfg->full_exprs[node.full_expr_id];

    bool all_atomic = true;
    for (const Acc &a : exposed) {
      const MemLoc &m = table_.info(a.v->id);
      if (!is_atomic_access(CType::scalar(m.base), hw_)) all_atomic = false;
    }
    bool wf = fe.wf.well_formed;

    auto emit = [&](WarnKind kind, SourceLoc loc, std::string msg,
                    std::vector<MemLocId> ids, Severity sev) {
      if (!sink || !sink->out) return;
      if (kind == WarnKind::NonVolatileShared) {
        for (MemLocId id : ids)
          if (!sink->nonvol_seen->insert(id).second) return;
      }
      auto key = std::make_pair((int)kind, std::make_pair(loc.line, loc.col));
      if (!sink->seen->insert(key).second) return;
      sink->out->push_back({kind, loc, std::move(msg), std::move(ids), sev});
    };

    if (!all_atomic) {
      d.corrupt = true;
      for (const Acc &a : exposed) {
        const MemLoc &m = table_.info(a.v->id);
        if (is_atomic_access(CType::scalar(m.base), hw_)) continue;
        emit(WarnKind::NonAtomicAccess, a.loc,
             "access to shared '" + m.name + "' (" +
                 std::to_string(bit_width(m.base)) +
                 " bits) is not atomic on this target; an interrupt may "
                 "observe or produce a torn value",
             {a.v->id}, Severity::Warning);
      }
    } else if (!wf) {
      d.corrupt = true;
      emit(WarnKind::UnspecifiedOrder, fe.loc,
           "full expression is not well-formed (" + fe.wf.reason() +
               "); the order of its shared accesses is compiler-dependent, "
               "shared operands assumed to take any value",
           sorted_ids(info.fe_shared[node.full_expr_id]), Severity::Warning);
    } else {
      for (const Acc &a : exposed) {
        if (!a.write || !a.isr_writes_racing) continue;
        const MemLoc &m = table_.info(a.v->id);
        emit(WarnKind::DataLoss, a.loc,
             "write to shared '" + m.name +
                 "' races with an interrupt write; one store may immediately "
                 "overwrite the other",
             {a.v->id}, Severity::Warning);
      }
    }

    // volatile discipline: a racing access from interruptible code must be
    // volatile-qualified
    for (const Acc &a : exposed) {
      if (a.is_volatile) continue;
      const MemLoc &m = table_.info(a.v->id);
      emit(WarnKind::NonVolatileShared, a.loc,
           "shared '" + m.name +
               "' is accessed without a volatile qualification while an "
               "interrupt may touch it; the compiler may cache or reorder "
               "this access",
           {a.v->id}, Severity::Warning);
    }

    if (d.corrupt) d.havoc_set = &info.fe_shared[node.full_expr_id];
    return d;
  }

  static std::vector<MemLocId> sorted_ids(const std::set<MemLocId> &s) {
    return std::vector<MemLocId>(s.begin(), s.end());
  }

  // --- transfers ---

  struct ValueShape {
    enum Kind { ConstV, Affine, IntervalV } kind = IntervalV;
    MemLocId y = kNoMemLoc;
    int sign = 1;
    int64_t c = 0;
    Interval iv;
  };

  ValueShape shape_of(const RExpr &e, const Octagon &oct) {
    ValueShape v;
    auto affine_load = [&](const RExpr &l) -> MemLocId {
      if (l.kind != RExpr::Load || l.index || l.deref_ptr) return kNoMemLoc;
      const MemLoc &m = table_.info(l.id);
      if (m.kind == MemLocKind::Register || !m.numeric()) return kNoMemLoc;
      if (!oct.has_var(l.id)) return kNoMemLoc;
      return l.id;
    };
    if (e.kind == RExpr::Const) {
      v.kind = ValueShape::ConstV;
      v.c = e.value;
      return v;
    }
    if (MemLocId y = affine_load(e); y != kNoMemLoc) {
      v.kind = ValueShape::Affine;
      v.y = y;
      v.sign = 1;
      v.c = 0;
      return v;
    }
    if (e.kind == RExpr::Un && e.un == UnOp::Neg) {
      if (MemLocId y = affine_load(*e.a); y != kNoMemLoc) {
        v.kind = ValueShape::Affine;
        v.y = y;
        v.sign = -1;
        v.c = 0;
        return v;
      }
    }
    if (e.kind == RExpr::Bin &&
        (e.bin == BinOp::Add || e.bin == BinOp::Sub)) {
      const RExpr *l = e.a.get(), *r = e.b.get();
      if (e.bin == BinOp::Add && l->kind == RExpr::Const) std::swap(l, r);
      if (r->kind == RExpr::Const) {
        if (MemLocId y = affine_load(*l); y != kNoMemLoc) {
          v.kind = ValueShape::Affine;
          v.y = y;
          v.sign = 1;
          v.c = e.bin == BinOp::Add ? r->value : -r->value;
          return v;
        }
      }
      if (e.bin == BinOp::Sub && l->kind == RExpr::Const) {
        if (MemLocId y = affine_load(*r); y != kNoMemLoc) {
          v.kind = ValueShape::Affine;
          v.y = y;
          v.sign = -1;
          v.c = l->value;
          return v;
        }
      }
    }
    v.kind = ValueShape::IntervalV;
    return v;
  }

  Octagon assign_scalar(Octagon oct, MemLocId x, const RExpr &rhs,
                        bool corrupt) {
    const MemLoc &mx = table_.info(x);
    if (!mx.numeric() || !oct.has_var(x)) return oct;
    Interval tr = mx.type_range();
    if (corrupt) return oct.assign_interval(x, tr);
    ValueShape v = shape_of(rhs, oct);
    switch (v.kind) {
      case ValueShape::ConstV:
        if (v.c < tr.lo || v.c > tr.hi) return oct.assign_interval(x, tr);
        return oct.assign_const(x, v.c);
      case ValueShape::Affine:
        return oct.assign_affine(x, v.y, v.sign, v.c);
      case ValueShape::IntervalV: {
        Interval iv = eval_rexpr_interval(rhs, oct, table_, hw_, pts_);
        if (iv.is_empty()) return Octagon::bottom(oct.vars());
        if (!tr.contains(iv)) return oct.assign_interval(x, tr);
        return oct.assign_interval(x, iv);
      }
    }
    return oct;
  }

  Octagon store_transfer(Octagon oct, const CfgNode &node, bool corrupt) {
    const LValue &lv = node.lhs;
    const RExpr &rhs = *node.rhs;
    if (lv.kind == LValue::Scalar) {
      const MemLoc &m = table_.info(lv.id);
      if (m.kind == MemLocKind::Register) return oct;  // handled via enables
      return assign_scalar(std::move(oct), lv.id, rhs, corrupt);
    }
    // weak value for summary / multi-target stores
    auto weak_value = [&](MemLocId target) {
      const MemLoc &m = table_.info(target);
      Interval tr = m.type_range();
      if (corrupt) return tr;
      Interval iv = eval_rexpr_interval(rhs, oct, table_, hw_, pts_);
      if (iv.is_empty() || !tr.contains(iv)) return tr;
      return iv;
    };
    if (lv.kind == LValue::ArrayElem) {
      if (!oct.has_var(lv.id)) return oct;
      return oct.weak_update(lv.id, weak_value(lv.id));
    }
    // pointer store
    const auto &targets = pts_.targets(lv.ptr);
    std::vector<MemLocId> num;
    for (MemLocId t : targets)
      if (table_.info(t).numeric() && oct.has_var(t)) num.push_back(t);
    if (num.empty()) return oct;
    if (num.size() == 1 &&
        table_.info(num[0]).kind != MemLocKind::ArraySummary)
      return assign_scalar(std::move(oct), num[0], rhs, corrupt);
    for (MemLocId t : num) oct = oct.weak_update(t, weak_value(t));
    return oct;
  }

  Octagon apply_guard(Octagon oct, const RExpr &cond, bool truthy) {
    if (oct.is_bottom()) return oct;
    auto term_var = [&](const RExpr &t) -> MemLocId {
      if (t.kind != RExpr::Load || t.index || t.deref_ptr) return kNoMemLoc;
      const MemLoc &m = table_.info(t.id);
      if (m.kind == MemLocKind::Register || !m.numeric()) return kNoMemLoc;
      if (!oct.has_var(t.id)) return kNoMemLoc;
      return t.id;
    };

    if (cond.kind == RExpr::Un && cond.un == UnOp::Not)
      return apply_guard(std::move(oct), *cond.a, !truthy);

    // x != 0 / x == 0 refinement via the endpoint rule
    auto refine_ne_const = [&](Octagon o, MemLocId x, int64_t c) {
      Interval b = o.bounds(x);
      if (b.is_empty()) return o;
      if (b.lo == c) o = o.guard_le(x, -1, -(c + 1));  // x >= c+1
      if (b.hi == c) o = o.guard_le(x, 1, c - 1);      // x <= c-1
      return o;
    };

    if (cond.kind == RExpr::Load) {
      MemLocId x = term_var(cond);
      if (x == kNoMemLoc) return oct;
      if (truthy) return refine_ne_const(std::move(oct), x, 0);
      Octagon o = oct.guard_le(x, 1, 0);
      return o.guard_le(x, -1, 0);  // x == 0
    }

    if (cond.kind == RExpr::Bin) {
      BinOp op = cond.bin;
      bool is_cmp = op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt ||
                    op == BinOp::Ge || op == BinOp::Eq || op == BinOp::Ne;
      if (is_cmp) {
        if (!truthy) {
          switch (op) {
            case BinOp::Lt: op = BinOp::Ge; break;
            case BinOp::Le: op = BinOp::Gt; break;
            case BinOp::Gt: op = BinOp::Le; break;
            case BinOp::Ge: op = BinOp::Lt; break;
            case BinOp::Eq: op = BinOp::Ne; break;
            case BinOp::Ne: op = BinOp::Eq; break;
            default: break;
          }
        }
        MemLocId xl = term_var(*cond.a), xr = term_var(*cond.b);
        bool cl = cond.a->kind == RExpr::Const,
             cr = cond.b->kind == RExpr::Const;
        int64_t vl = cond.a->value, vr = cond.b->value;

        if (xl != kNoMemLoc && xr != kNoMemLoc && xl != xr) {
          switch (op) {
            case BinOp::Lt: return oct.guard_le2(xl, 1, xr, -1, -1);
            case BinOp::Le: return oct.guard_le2(xl, 1, xr, -1, 0);
            case BinOp::Gt: return oct.guard_le2(xr, 1, xl, -1, -1);
            case BinOp::Ge: return oct.guard_le2(xr, 1, xl, -1, 0);
            case BinOp::Eq: {
              Octagon o = oct.guard_le2(xl, 1, xr, -1, 0);
              return o.guard_le2(xr, 1, xl, -1, 0);
            }
            case BinOp::Ne:
              return oct;  // no octagonal refinement
            default:
              break;
          }
        }
        if (xl != kNoMemLoc && cr) {
          switch (op) {
            case BinOp::Lt: return oct.guard_le(xl, 1, vr - 1);
            case BinOp::Le: return oct.guard_le(xl, 1, vr);
            case BinOp::Gt: return oct.guard_le(xl, -1, -(vr + 1));
            case BinOp::Ge: return oct.guard_le(xl, -1, -vr);
            case BinOp::Eq: {
              Octagon o = oct.guard_le(xl, 1, vr);
              return o.guard_le(xl, -1, -vr);
            }
            case BinOp::Ne:
              return refine_ne_const(std::move(oct), xl, vr);
            default:
              break;
          }
        }
        if (cl && xr != kNoMemLoc) {
          switch (op) {
            case BinOp::Lt: return oct.guard_le(xr, -1, -(vl + 1));
            case BinOp::Le: return oct.guard_le(xr, -1, -vl);
            case BinOp::Gt: return oct.guard_le(xr, 1, vl - 1);
            case BinOp::Ge: return oct.guard_le(xr, 1, vl);
            case BinOp::Eq: {
              Octagon o = oct.guard_le(xr, 1, vl);
              return o.guard_le(xr, -1, -vl);
            }
            case BinOp::Ne:
              return refine_ne_const(std::move(oct), xr, vl);
            default:
              break;
          }
        }
      }
    }

    // fallback: decide by interval evaluation only
    Interval iv = eval_rexpr_interval(cond, oct, table_, hw_, pts_);
    if (truthy && iv == Interval::point(0))
      return Octagon::bottom(oct.vars());
    if (!truthy && !iv.contains(0)) return Octagon::bottom(oct.vars());
    return oct;
  }

  // --- ISR fixpoint ---

  AbstractState analyze_isr_once(size_t isr_idx, const AbstractState &s) {
    const FunctionDef *isr = isr_list_[isr_idx];
    ++result_.stats.isr_analyses;
    const FnInfo &info = fn_info_.at(isr);

    AbstractState in;
    in.oct = s.oct.closed().restrict_to(info.interface_vars);
    in.ints = s.ints;
    Tri saved_global = s.ints.global;
    in.ints.global = Tri::Off;  // a handler runs to completion

    ++isr_depth_;
    Context ctx{isr_site_id_.at(isr)};
    AbstractState out = analyze_fn(isr, ctx, in);
    --isr_depth_;

    if (out.is_bottom()) {
      // handler never returns (should not happen); keep the input
      return s;
    }
    std::vector<MemLocId> modified;
    for (MemLocId id : access_.of(isr).writes) {
      const MemLoc &m = table_.info(id);
      if (!m.numeric()) continue;
      if (m.kind == MemLocKind::Global || m.kind == MemLocKind::ArraySummary)
        modified.push_back(id);
    }
    AbstractState res;
    res.oct = s.oct.embed(out.oct, modified);
    res.ints = out.ints;
    res.ints.global = saved_global;  // restored on return from the handler
    return res;
  }

  AbstractState run_isr_fixpoint(const AbstractState &s) {
    if (s.is_bottom() || isr_list_.empty()) return s;
    if (isr_depth_ > 0) return s;  // handlers cannot nest

    // Handlers only touch their own access sets, so the fixpoint runs on
    // the projection to handler-relevant variables; everything else rides
    // along unchanged. Settled results are cached by projected input.
    AbstractState small;
    small.oct = s.oct.closed().restrict_to(isr_union_vars_);
    small.ints = s.ints;
    std::string key = fix_cache_key(small);
    auto hit = fix_cache_.find(key);
    AbstractState settled;
    if (hit != fix_cache_.end()) {
      settled = hit->second;
      for (size_t i = 0; i < isr_list_.size(); ++i)
        if (isr_can_fire(i, settled.ints)) ++result_.stats.isr_analyses;
    } else {
      settled = solve_isr_fixpoint(small);
      fix_cache_.emplace(std::move(key), settled);
    }
    if (state_leq(settled, small)) return s;  // nothing fired
    AbstractState r;
    r.oct = s.oct.embed(settled.oct, isr_written_union_);
    r.ints = settled.ints;
    return r;
  }

  AbstractState solve_isr_fixpoint(const AbstractState &s) {
    // Ascend with widening and then descend to an actual fixpoint of
    //   F(T) = S join (joins of every fireable handler applied to T),
    // all on the shadow side so the transient widened states never enter
    // the recorded results.
    AbstractState t = s;
    {
      ShadowScope shadow(*this);
      bool any = true;
      for (int round = 0; any; ++round) {
        AbstractState next = t;
        any = false;
        for (size_t i = 0; i < isr_list_.size(); ++i) {
          if (!isr_can_fire(i, t.ints)) continue;
          any = true;
          next = state_join(next, analyze_isr_once(i, t));
        }
        if (!any) return s;  // nothing can fire here
        if (state_leq(next, t)) break;
        if (round >= cfg_conf_.isr_widen_delay) {
          AbstractState w;
          w.oct = Octagon::widen(t.oct, next.oct);
          w.ints = next.ints;
          t = std::move(w);
        } else {
          t = std::move(next);
        }
      }
      for (int round = 0; round < 16; ++round) {
        AbstractState z = s;
        for (size_t i = 0; i < isr_list_.size(); ++i)
          if (isr_can_fire(i, t.ints))
            z = state_join(z, analyze_isr_once(i, t));
        if (state_leq(t, z) && state_leq(z, t)) break;
        if (!state_leq(z, t)) break;  // settled modulo join noise
        t = std::move(z);
      }
    }

    // one recording application at the settled state
    AbstractState r = s;
    for (size_t i = 0; i < isr_list_.size(); ++i)
      if (isr_can_fire(i, t.ints))
        r = state_join(r, analyze_isr_once(i, t));
    return r;
  }

  // --- calls ---

  AbstractState localize_call(const FunctionDef *fn, const Context &ctx,
                              const CfgNode &node, AbstractState s,
                              bool corrupt) {
    const FunctionDef *callee = node.callee;
    const FnInfo &cinfo = fn_info_.at(callee);
    const Cfg &ccfg = *cinfo.cfg;

    // extend with the callee's params and return slot, bind arguments
    std::vector<Octagon::VarInfo> extra;
    std::vector<MemLocId> param_ids(callee->params.size(), kNoMemLoc);
    for (size_t i = 0; i < callee->params.size(); ++i) {
      MemLocId id = table_.lookup_decl(callee->params[i].get());
      param_ids[i] = id;
      if (id != kNoMemLoc && table_.info(id).numeric() && !s.oct.has_var(id))
        extra.push_back(var_info(id));
    }
    if (ccfg.return_slot != kNoMemLoc && !s.oct.has_var(ccfg.return_slot))
      extra.push_back(var_info(ccfg.return_slot));
    Octagon oct = s.oct.extended(extra);

    for (size_t i = 0; i < callee->params.size(); ++i) {
      MemLocId id = param_ids[i];
      if (id == kNoMemLoc || !table_.info(id).numeric()) continue;
      oct = assign_scalar(std::move(oct), id, *node.args[i], corrupt);
    }

    AbstractState in;
    in.oct = oct.restrict_to(cinfo.interface_vars);
    in.ints = s.ints;
    bool atomic_fn = hw_.is_atomic_function(callee->name);
    Tri saved_global = s.ints.global;
    if (atomic_fn) in.ints.global = Tri::Off;

    Context cctx = ctx;
    cctx.push_back(call_site_id_.at(&node));
    while ((int)cctx.size() > cfg_conf_.context_depth)
      cctx.erase(cctx.begin());

    AbstractState out = analyze_fn(callee, cctx, in);
    if (out.is_bottom()) {
      // no return reachable: the call never comes back
      return {Octagon::bottom(s.oct.vars()), s.ints};
    }

    std::vector<MemLocId> modified;
    for (MemLocId id : access_.of(callee).writes) {
      const MemLoc &m = table_.info(id);
      if (!m.numeric() || !oct.has_var(id)) continue;
      if (m.kind == MemLocKind::Global ||
          m.kind == MemLocKind::ArraySummary || m.kind == MemLocKind::Local)
        modified.push_back(id);
    }
    if (ccfg.return_slot != kNoMemLoc) modified.push_back(ccfg.return_slot);
    std::sort(modified.begin(), modified.end());
    modified.erase(std::unique(modified.begin(), modified.end()),
                   modified.end());

    AbstractState res;
    res.oct = oct.embed(out.oct, modified);
    res.ints = out.ints;
    if (atomic_fn) res.ints.global = saved_global;

    if (node.result != kNoMemLoc && ccfg.return_slot != kNoMemLoc &&
        res.oct.has_var(node.result))
      res.oct = res.oct.assign_affine(node.result, ccfg.return_slot, 1, 0);

    // drop the callee frame
    std::vector<MemLocId> keep;
    for (const auto &v : s.oct.vars()) keep.push_back(v.id);
    res.oct = res.oct.restrict_to(keep);
    return res;
  }

  // --- per-edge transfer ---

  AbstractState transfer_edge(const FunctionDef *fn, const Context &ctx,
                              const CfgNode &node, const AbstractState &s,
                              int edge, WarnSink *sink) {
    if (s.is_bottom()) return s;
    Dispatch d = dispatch_shared(fn, node, s, sink);
    if (cfg_conf_.test_disable_corrupt_havoc) d.corrupt = false;

    AbstractState out = s;
    switch (node.kind) {
      case NodeKind::Nop:
        break;
      case NodeKind::Assign: {
        out.oct = store_transfer(std::move(out.oct), node, d.corrupt);
        EnableEffect eff = node_enable_effect(node, table_, hw_);
        if (!eff.empty()) out.ints = interrupt_transfer(out.ints, eff);
        break;
      }
      case NodeKind::Guard: {
        if (!d.corrupt) {
          bool truthy = (edge == 0) == node.sense;
          out.oct = apply_guard(std::move(out.oct), *node.rhs, truthy);
        }
        break;
      }
      case NodeKind::Call: {
        if (node.builtin == CfgNode::Builtin::Sei) {
          out.ints.global = Tri::On;
        } else if (node.builtin == CfgNode::Builtin::Cli) {
          out.ints.global = Tri::Off;
        } else {
          out = localize_call(fn, ctx, node, std::move(out), d.corrupt);
        }
        break;
      }
      case NodeKind::Return: {
        const Cfg &cfg = *fn_info_.at(fn).cfg;
        if (cfg.return_slot != kNoMemLoc) {
          if (node.rhs) {
            out.oct = d.corrupt
                          ? out.oct.assign_interval(
                                cfg.return_slot,
                                table_.info(cfg.return_slot).type_range())
                          : assign_scalar(std::move(out.oct), cfg.return_slot,
                                          *node.rhs, false);
          } else {
            out.oct = out.oct.assign_interval(
                cfg.return_slot, table_.info(cfg.return_slot).type_range());
          }
        }
        break;
      }
      case NodeKind::IsrFixpoint:
        out = run_isr_fixpoint(out);
        break;
    }

    if (d.corrupt && d.havoc_set) {
      for (MemLocId id : *d.havoc_set) {
        if (!out.oct.has_var(id)) continue;
        out.oct = out.oct.havoc(id, table_.info(id).type_range());
      }
    }
    return out;
  }

  // --- final deterministic warning sweep over the stored states ---

  void sweep_warnings() {
    std::set<std::pair<int, std::pair<int, int>>> seen;
    std::set<MemLocId> nonvol_seen;
    WarnSink sink{&result_.warnings, &seen, &nonvol_seen};
    for (const FunctionDef *f : prog_.all_functions()) {
      const Cfg &cfg = cfgs_.at(f);
      for (size_t id = 0; id < cfg.nodes.size(); ++id) {
        for (auto &[key, st] : analyses_) {
          if (key.first != f) continue;
          if (id >= st.node_states.size() || !st.node_states[id].pre) continue;
          const AbstractState &pre = *st.node_states[id].pre;
          if (pre.is_bottom()) continue;
          dispatch_shared(f, cfg.node((int)id), pre, &sink);
        }
      }
    }
    std::stable_sort(result_.warnings.begin(), result_.warnings.end(),
                     [](const Warning &a, const Warning &b) {
                       if (a.loc.line != b.loc.line)
                         return a.loc.line < b.loc.line;
                       if (a.loc.col != b.loc.col) return a.loc.col < b.loc.col;
                       return (int)a.kind < (int)b.kind;
                     });
  }

  const Program &prog_;
  std::map<const FunctionDef *, Cfg> &cfgs_;
  const HardwareSpec &hw_;
  const AccessSets &access_;
  const SharedSet &shared_;
  const PointsTo &pts_;
  MemLocTable &table_;
  EngineConfig cfg_conf_;

  std::map<const FunctionDef *, FnInfo> fn_info_;
  std::map<const CfgNode *, int> call_site_id_;
  std::map<const FunctionDef *, int> isr_site_id_;
  std::vector<const FunctionDef *> isr_list_;
  std::vector<int> isr_source_;
  std::string fix_cache_key(const AbstractState &st) const {
    std::string key;
    key.push_back(st.is_bottom() ? '1' : '0');
    key.push_back((char)('0' + (int)st.ints.global));
    for (Tri t : st.ints.sources) key.push_back((char)('0' + (int)t));
    if (!st.is_bottom()) {
      Octagon c = st.oct.closed();
      for (const std::string &line : c.describe(table_)) {
        key += line;
        key.push_back(';');
      }
    }
    return key;
  }

  std::map<FnCtxKey, Analysis> analyses_;
  std::map<FnCtxKey, Analysis> shadow_analyses_;
  std::map<std::string, AbstractState> fix_cache_;
  std::vector<MemLocId> isr_union_vars_;
  std::vector<MemLocId> isr_written_union_;
  bool shadow_ = false;

  struct ShadowScope {
    Engine &e;
    bool saved;
    explicit ShadowScope(Engine &eng) : e(eng), saved(eng.shadow_) {
      e.shadow_ = true;
    }
    ~ShadowScope() { e.shadow_ = saved; }
  };

  int isr_depth_ = 0;
  int total_sites_ = 0;

  AnalysisResult result_;
};

}  // namespace

AnalysisResult analyze_program(const Program &prog,
                               std::map<const FunctionDef *, Cfg> &cfgs,
                               const HardwareSpec &hw,
                               const AccessSets &access,
                               const SharedSet &shared, const PointsTo &pts,
                               MemLocTable &table, const EngineConfig &config) {
  Engine eng(prog, cfgs, hw, access, shared, pts, table, config);
  AnalysisResult out = eng.run();
  return out;
}

}  // namespace mca
