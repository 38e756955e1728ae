#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mca/cfg.hpp"
#include "mca/hardware.hpp"
#include "mca/octagon.hpp"
#include "mca/points_to.hpp"
#include "mca/warning.hpp"

namespace mca {

// Abstract state propagated along the CFG: value ranges plus the status
// of the interrupt enable bits.
struct AbstractState {
  Octagon oct;
  InterruptState ints;

  bool is_bottom() const { return oct.is_bottom(); }
};

AbstractState state_join(const AbstractState &a, const AbstractState &b);
bool state_leq(const AbstractState &a, const AbstractState &b);

struct EngineConfig {
  int context_depth = 1;  // call-string length
  // Joins at a loop head / plain ISR-fixpoint rounds before widening.
  // Bounded counter patterns (index wrap-around, tick counters) grow by
  // one step per round and must reach their guard bound before the jump
  // to type bounds; a narrowing pass cannot undo the jump across loop
  // paths that merely carry the value through. Raise for counters with
  // guards above 64; widening stays on as the termination guarantee.
  int widening_delay = 64;
  int isr_widen_delay = 64;
  long max_visits = 100000;  // node-visit budget; exceeding it is a bug
  // Fault-injection hook for the soundness harness: skips the
  // type-bound havoc of rows 3/4, which the containment check must then
  // catch as a violation. Never set outside tests.
  bool test_disable_corrupt_havoc = false;
};

struct AnalysisStats {
  long node_visits = 0;
  long isr_analyses = 0;  // ISR body analyses requested (memo hits included)
  int isr_fixpoint_sites = 0;
  long fn_analyses = 0;
  double wall_ms = 0.0;
};

// Call-string context: global ids of the call sites, innermost last,
// truncated to the configured depth. ISR bodies get a synthetic site.
using Context = std::vector<int>;

struct NodeStates {
  std::optional<AbstractState> pre, post;  // joined over analysis runs
};

struct FnCtxStates {
  std::vector<NodeStates> by_node;  // indexed by node id
};

struct AnalysisResult {
  std::map<std::pair<const FunctionDef *, Context>, FnCtxStates> states;
  std::vector<Warning> warnings;
  AnalysisStats stats;

  // Post state of a node joined over all contexts (empty if unreached).
  std::optional<AbstractState> post_joined(const FunctionDef *fn,
                                           int node) const;
  std::optional<AbstractState> pre_joined(const FunctionDef *fn,
                                          int node) const;
};

// Inserts the synthetic isr-fixpoint nodes: after every node that may set
// an enable flag and after every shared-access node, except where the
// global enable bit is provably cleared. Returns the number of inserted
// sites.
int schedule_isr_nodes(Cfg &cfg, const SharedSet &shared,
                       const HardwareSpec &hw, const AccessSets &access,
                       const MemLocTable &table, bool is_entry);

// Interval of a lowered expression under a state (used by the engine, the
// bounds checker and the dumps).
Interval eval_rexpr_interval(const RExpr &e, const Octagon &oct,
                             const MemLocTable &table, const HardwareSpec &hw,
                             const PointsTo &pts);

// The fixed point: flow- and context-sensitive propagation with
// access-based localization, ISR fixpoints and the shared-access rules.
// Prepasses must be complete: cfgs carry expanded access sets and
// well-formedness verdicts; schedule_isr_nodes has run.
AnalysisResult analyze_program(const Program &prog,
                               std::map<const FunctionDef *, Cfg> &cfgs,
                               const HardwareSpec &hw,
                               const AccessSets &access,
                               const SharedSet &shared, const PointsTo &pts,
                               MemLocTable &table,
                               const EngineConfig &config = {});

}  // namespace mca
