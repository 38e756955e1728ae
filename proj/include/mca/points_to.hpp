#pragma once

#include <map>
#include <set>
#include <vector>

#include "mca/cfg.hpp"
#include "mca/memloc.hpp"
#include "mca/wellformed.hpp"

namespace mca {

// Flow-insensitive may-point-to facts. Mini-C has no pointers to
// pointers, so the inclusion constraints are address-of seeds plus copy
// edges (assignments, argument binding), solved to a fixpoint.
struct PointsTo {
  std::map<const VarDecl *, std::set<MemLocId>> pts;

  const std::set<MemLocId> &targets(const VarDecl *p) const {
    static const std::set<MemLocId> kEmpty;
    auto it = pts.find(p);
    return it == pts.end() ? kEmpty : it->second;
  }
};

PointsTo compute_points_to(const Program &prog,
                           const std::map<const FunctionDef *, Cfg> &cfgs,
                           MemLocTable &table, const HardwareSpec &hw);

// Per-function read/write sets, transitively closed over callees; also
// expands each CFG node's direct accesses through the points-to relation
// into node.reads / node.writes.
struct AccessSets {
  struct FnAccess {
    std::set<MemLocId> reads, writes;
    bool volatile_side_effects = false;  // volatile access or sei/cli inside
  };
  std::map<const FunctionDef *, FnAccess> per_fn;

  const FnAccess &of(const FunctionDef *f) const {
    static const FnAccess kEmpty;
    auto it = per_fn.find(f);
    return it == per_fn.end() ? kEmpty : it->second;
  }
};

AccessSets compute_access_sets(const Program &prog,
                               std::map<const FunctionDef *, Cfg> &cfgs,
                               const PointsTo &pts, const MemLocTable &table);

// Call-graph reachability (the function itself included).
std::set<const FunctionDef *> reachable_functions(
    const Program &prog, const std::map<const FunctionDef *, Cfg> &cfgs,
    const FunctionDef *from);

// Variables accessed from both sides. Hardware-classified registers have
// their own semantics and are excluded from race handling.
struct SharedVar {
  MemLocId id = kNoMemLoc;
  bool main_reads = false, main_writes = false;
  bool isr_reads = false, isr_writes = false;
  std::vector<char> isr_reads_by, isr_writes_by;  // per program ISR index
  bool uniformly_volatile = true;  // every program access volatile-qualified

  enum class Pattern { MainReadsIsrWrites, MainWritesIsrReads, BothWrite,
                       ReadOnly };
  Pattern pattern() const {
    bool mw = main_writes, iw = isr_writes;
    if (mw && iw) return Pattern::BothWrite;
    if (mw) return Pattern::MainWritesIsrReads;
    if (iw) return Pattern::MainReadsIsrWrites;
    return Pattern::ReadOnly;
  }
};

struct SharedSet {
  std::map<MemLocId, SharedVar> vars;  // keyed by MemLocId: deterministic
  std::set<const FunctionDef *> main_side;
  std::vector<const FunctionDef *> isrs;  // program order

  bool is_shared(MemLocId id) const { return vars.count(id) != 0; }
  const SharedVar *find(MemLocId id) const {
    auto it = vars.find(id);
    return it == vars.end() ? nullptr : &it->second;
  }
};

SharedSet compute_shared_set(const Program &prog,
                             const std::map<const FunctionDef *, Cfg> &cfgs,
                             const AccessSets &access,
                             const MemLocTable &table);

// Facts for the expression-ordering rules, derived from the sets above.
SharedInfo build_shared_info(const Program &prog,
                             const std::map<const FunctionDef *, Cfg> &cfgs,
                             const AccessSets &access, const SharedSet &shared,
                             const PointsTo &pts, const MemLocTable &table);

// Fills every full expression's well-formedness verdict.
void annotate_wellformedness(std::map<const FunctionDef *, Cfg> &cfgs,
                             const SharedInfo &info);

std::string dump_access_sets(const Program &prog, const AccessSets &access,
                             const MemLocTable &table);

}  // namespace mca
