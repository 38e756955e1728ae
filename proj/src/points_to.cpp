#include "mca/points_to.hpp"

#include <algorithm>
#include <cassert>

namespace mca {

namespace {

MemLocId target_of_addr(const RExpr &addr, MemLocTable &table,
                        const HardwareSpec &hw) {
  assert(addr.kind == RExpr::Addr);
  return table.of_decl(addr.addr_target, hw);
}

}  // namespace

PointsTo compute_points_to(const Program &prog,
                           const std::map<const FunctionDef *, Cfg> &cfgs,
                           MemLocTable &table, const HardwareSpec &hw) {
  (void)prog;
  PointsTo out;
  // copy edges: dst ptr decl <- src ptr decl
  std::vector<std::pair<const VarDecl *, const VarDecl *>> copies;

  auto decl_of_memloc = [&](MemLocId id) { return table.info(id).decl; };

  auto handle_ptr_assign = [&](const VarDecl *dst, const RExpr &rhs) {
    if (rhs.kind == RExpr::Addr) {
      out.pts[dst].insert(target_of_addr(rhs, table, hw));
    } else if (rhs.kind == RExpr::Load && !rhs.index && !rhs.deref_ptr) {
      const VarDecl *src = decl_of_memloc(rhs.id);
      if (src && src->ctype.is_pointer) copies.push_back({dst, src});
    }
  };

  for (auto &[fn, cfg] : cfgs) {
    for (auto &np : cfg.nodes) {
      const CfgNode &n = *np;
      if (n.kind == NodeKind::Assign && n.lhs.kind == LValue::Scalar) {
        const VarDecl *d = table.info(n.lhs.id).decl;
        if (d && d->ctype.is_pointer) handle_ptr_assign(d, *n.rhs);
      }
      if (n.kind == NodeKind::Call && n.callee) {
        for (size_t i = 0; i < n.args.size(); ++i) {
          const VarDecl *p = n.callee->params[i].get();
          if (p->ctype.is_pointer) handle_ptr_assign(p, *n.args[i]);
        }
      }
    }
  }

  // inclusion fixpoint over the copy edges
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto &[dst, src] : copies) {
      auto it = out.pts.find(src);
      if (it == out.pts.end()) continue;
      auto &d = out.pts[dst];
      size_t before = d.size();
      d.insert(it->second.begin(), it->second.end());
      if (d.size() != before) changed = true;
    }
  }
  return out;
}

AccessSets compute_access_sets(const Program &prog,
                               std::map<const FunctionDef *, Cfg> &cfgs,
                               const PointsTo &pts, const MemLocTable &table) {
  AccessSets out;

  // per-node expansion
  for (auto &[fn, cfg] : cfgs) {
    auto &fa = out.per_fn[fn];
    for (auto &np : cfg.nodes) {
      CfgNode &n = *np;
      std::set<MemLocId> reads, writes;
      for (const DirectAccess &a : n.direct) {
        if (a.is_volatile) fa.volatile_side_effects = true;
        if (a.via_ptr) {
          for (MemLocId t : pts.targets(a.via_ptr))
            (a.write ? writes : reads).insert(t);
          continue;
        }
        if (a.id == kNoMemLoc) continue;
        if (table.info(a.id).kind == MemLocKind::Temp) continue;
        (a.write ? writes : reads).insert(a.id);
      }
      if (n.builtin != CfgNode::Builtin::None) fa.volatile_side_effects = true;
      n.reads.assign(reads.begin(), reads.end());
      n.writes.assign(writes.begin(), writes.end());
      fa.reads.insert(reads.begin(), reads.end());
      fa.writes.insert(writes.begin(), writes.end());
    }
  }

  // transitive closure over the (acyclic) call graph
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto &[fn, cfg] : cfgs) {
      auto &fa = out.per_fn[fn];
      for (auto &np : cfg.nodes) {
        if (np->kind != NodeKind::Call || !np->callee) continue;
        const auto &ca = out.per_fn[np->callee];
        size_t br = fa.reads.size(), bw = fa.writes.size();
        bool bv = fa.volatile_side_effects;
        fa.reads.insert(ca.reads.begin(), ca.reads.end());
        fa.writes.insert(ca.writes.begin(), ca.writes.end());
        fa.volatile_side_effects |= ca.volatile_side_effects;
        if (fa.reads.size() != br || fa.writes.size() != bw ||
            fa.volatile_side_effects != bv)
          changed = true;
      }
    }
  }
  (void)prog;
  return out;
}

std::set<const FunctionDef *> reachable_functions(
    const Program &prog, const std::map<const FunctionDef *, Cfg> &cfgs,
    const FunctionDef *from) {
  (void)prog;
  std::set<const FunctionDef *> seen;
  std::vector<const FunctionDef *> work{from};
  while (!work.empty()) {
    const FunctionDef *f = work.back();
    work.pop_back();
    if (!seen.insert(f).second) continue;
    auto it = cfgs.find(f);
    if (it == cfgs.end()) continue;
    for (auto &np : it->second.nodes)
      if (np->kind == NodeKind::Call && np->callee) work.push_back(np->callee);
  }
  return seen;
}

SharedSet compute_shared_set(const Program &prog,
                             const std::map<const FunctionDef *, Cfg> &cfgs,
                             const AccessSets &access,
                             const MemLocTable &table) {
  SharedSet out;
  const FunctionDef *entry = prog.entry_function();
  if (entry) out.main_side = reachable_functions(prog, cfgs, entry);
  for (auto &isr : prog.isrs) out.isrs.push_back(isr.get());

  auto touchable = [&](MemLocId id) {
    const MemLoc &m = table.info(id);
    return m.kind == MemLocKind::Global || m.kind == MemLocKind::ArraySummary;
  };

  // main-side accumulated access
  std::set<MemLocId> main_reads, main_writes;
  for (const FunctionDef *f : out.main_side) {
    const auto &fa = access.of(f);
    main_reads.insert(fa.reads.begin(), fa.reads.end());
    main_writes.insert(fa.writes.begin(), fa.writes.end());
  }

  for (size_t i = 0; i < out.isrs.size(); ++i) {
    const auto &ia = access.of(out.isrs[i]);
    auto consider = [&](MemLocId id, bool write) {
      if (!touchable(id)) return;
      bool in_main = main_reads.count(id) || main_writes.count(id);
      if (!in_main) return;
      SharedVar &v = out.vars[id];
      if (v.id == kNoMemLoc) {
        v.id = id;
        v.main_reads = main_reads.count(id) != 0;
        v.main_writes = main_writes.count(id) != 0;
        v.isr_reads_by.assign(out.isrs.size(), 0);
        v.isr_writes_by.assign(out.isrs.size(), 0);
      }
      (write ? v.isr_writes : v.isr_reads) = true;
      (write ? v.isr_writes_by : v.isr_reads_by)[i] = 1;
    };
    for (MemLocId id : ia.reads) consider(id, false);
    for (MemLocId id : ia.writes) consider(id, true);
  }

  // drop pairs where nobody writes? kept, flagged read-only (excluded from
  // race handling by pattern)
  // volatile uniformity: every access anywhere must be volatile-qualified
  for (auto &[fn, cfg] : cfgs) {
    for (auto &np : cfg.nodes) {
      for (const DirectAccess &a : np->direct) {
        if (a.via_ptr) {
          // accesses through pointers are never volatile-qualified
          continue;
        }
        if (a.id == kNoMemLoc) continue;
        auto it = out.vars.find(a.id);
        if (it != out.vars.end() && !a.is_volatile)
          it->second.uniformly_volatile = false;
      }
    }
  }
  return out;
}

SharedInfo build_shared_info(const Program &prog,
                             const std::map<const FunctionDef *, Cfg> &cfgs,
                             const AccessSets &access, const SharedSet &shared,
                             const PointsTo &pts, const MemLocTable &table) {
  SharedInfo info;
  for (auto &[id, v] : shared.vars) {
    const VarDecl *d = table.info(id).decl;
    if (d) info.shared_decls.insert(d);
  }
  std::set<MemLocId> shared_ids;
  for (auto &[id, v] : shared.vars) shared_ids.insert(id);

  for (const FunctionDef *f : prog.all_functions()) {
    const auto &fa = access.of(f);
    bool touches_shared = false;
    bool writes_shared = false;
    for (MemLocId id : fa.reads)
      if (shared_ids.count(id)) touches_shared = true;
    for (MemLocId id : fa.writes)
      if (shared_ids.count(id)) touches_shared = writes_shared = true;
    if (touches_shared || fa.volatile_side_effects)
      info.competing_fns.insert(f);
    if (writes_shared) info.shared_writing_fns.insert(f);
  }

  for (auto &[p, targets] : pts.pts) {
    for (MemLocId t : targets)
      if (shared_ids.count(t)) {
        info.ptrs_to_shared.insert(p);
        break;
      }
  }
  (void)cfgs;
  return info;
}

void annotate_wellformedness(std::map<const FunctionDef *, Cfg> &cfgs,
                             const SharedInfo &info) {
  for (auto &[fn, cfg] : cfgs) {
    for (FullExpr &fe : cfg.full_exprs) {
      if (fe.ast)
        fe.wf = is_well_formed(*fe.ast, info);
      else
        fe.wf = WfVerdict{};
    }
  }
}

std::string dump_access_sets(const Program &prog, const AccessSets &access,
                             const MemLocTable &table) {
  std::string out;
  auto dump_fn = [&](const FunctionDef *f) {
    const auto &fa = access.of(f);
    out += (f->is_isr ? "ISR(" + f->name + ")" : f->name) + ":\n";
    out += "  reads:";
    for (MemLocId id : fa.reads) out += " " + table.name(id);
    out += "\n  writes:";
    for (MemLocId id : fa.writes) out += " " + table.name(id);
    out += "\n";
  };
  for (auto &f : prog.functions) dump_fn(f.get());
  for (auto &f : prog.isrs) dump_fn(f.get());
  return out;
}

}  // namespace mca
