#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mca/ast.hpp"
#include "mca/memloc.hpp"
#include "mca/wellformed.hpp"

namespace mca {

// Lowered pure expression: an operator tree over loads and constants.
// Calls, assignments and sequence points never appear here; the lowering
// hoists them into separate nodes.
struct RExpr;
using RExprPtr = std::unique_ptr<RExpr>;

struct RExpr {
  enum Kind : uint8_t { Const, Load, Un, Bin, Addr } kind = Const;
  Base type = Base::U8;
  SourceLoc loc;

  int64_t value = 0;  // Const

  // Load: a scalar/temp (id), an array element (id = summary, index set),
  // or a pointer deref (deref_ptr set, id unused).
  MemLocId id = kNoMemLoc;
  RExprPtr index;                      // array element load
  const VarDecl *deref_ptr = nullptr;  // pointer deref load
  bool is_volatile = false;

  const VarDecl *addr_target = nullptr;  // Addr: &var / &arr[...] target

  UnOp un{};
  BinOp bin{};
  RExprPtr a, b;

  static RExprPtr constant(int64_t v, Base t, SourceLoc l);
  static RExprPtr load(MemLocId id, Base t, bool vol, SourceLoc l);
};

RExprPtr clone_rexpr(const RExpr &e);
std::string rexpr_str(const RExpr &e, const MemLocTable &t);

// Store target.
struct LValue {
  enum Kind : uint8_t { Scalar, ArrayElem, PtrDeref } kind = Scalar;
  MemLocId id = kNoMemLoc;             // Scalar target or array summary
  RExprPtr index;                      // ArrayElem
  const VarDecl *ptr = nullptr;        // PtrDeref
  bool is_volatile = false;
  SourceLoc loc;
};

// One syntactic access performed by a node, before points-to expansion.
struct DirectAccess {
  MemLocId id = kNoMemLoc;             // kNoMemLoc for deref accesses
  const VarDecl *via_ptr = nullptr;    // set for deref accesses
  bool write = false;
  bool is_volatile = false;
  SourceLoc loc;
};

enum class NodeKind : uint8_t {
  Nop,
  Assign,
  Guard,
  Call,
  Return,
  IsrFixpoint,  // synthetic, inserted by the engine scheduler
};

struct CfgNode {
  int id = -1;
  NodeKind kind = NodeKind::Nop;
  int full_expr_id = -1;  // -1 only for synthetic nodes
  SourceLoc loc;

  LValue lhs;        // Assign
  RExprPtr rhs;      // Assign value / Guard condition / Return value
  bool sense = true; // Guard: succ[0] taken when (cond != 0) == sense

  const FunctionDef *callee = nullptr;  // Call; null for built-ins
  enum class Builtin : uint8_t { None, Sei, Cli } builtin = Builtin::None;
  std::vector<RExprPtr> args;
  MemLocId result = kNoMemLoc;  // Call result temp (void: kNoMemLoc)

  std::vector<int> succ;

  // Accesses: direct from lowering; reads/writes filled by the pointer
  // prepass (deref accesses expanded, sorted, deduplicated).
  std::vector<DirectAccess> direct;
  std::vector<MemLocId> reads;
  std::vector<MemLocId> writes;
};

struct FullExpr {
  int id = -1;
  const Expr *ast = nullptr;  // null for empty statements
  const FunctionDef *fn = nullptr;
  SourceLoc loc;
  std::vector<int> nodes;  // member nodes in emission (evaluation) order
  WfVerdict wf;            // filled once the shared set is known
};

struct Cfg {
  const FunctionDef *fn = nullptr;
  std::vector<std::unique_ptr<CfgNode>> nodes;
  int entry = 0;
  std::vector<FullExpr> full_exprs;
  std::vector<MemLocId> temps;   // lowering-introduced
  std::vector<MemLocId> locals;  // declared locals + params
  MemLocId return_slot = kNoMemLoc;

  CfgNode &node(int id) { return *nodes[id]; }
  const CfgNode &node(int id) const { return *nodes[id]; }
};

// Lowers one function to sequence-point granularity: one memory store per
// node, short-circuit operators as guard diamonds, loops with back edges.
// Every node carries its full-expression id.
Cfg lower_function(const FunctionDef &fn, MemLocTable &table,
                   const HardwareSpec &hw);

std::map<const FunctionDef *, Cfg> lower_program(const Program &prog,
                                                 MemLocTable &table,
                                                 const HardwareSpec &hw);

// Validates the full-expression partition (each non-synthetic node in
// exactly one full expression) and returns it.
const std::vector<FullExpr> &mark_full_expressions(const Cfg &cfg);

// Nodes of a full expression whose successors leave the expression (the
// state after them is the state at the closing sequence point).
std::vector<int> full_expr_boundary(const Cfg &cfg, const FullExpr &fe);

std::string cfg_to_dot(const Cfg &cfg, const MemLocTable &table);

}  // namespace mca
