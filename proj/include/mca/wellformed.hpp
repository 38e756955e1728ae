#pragma once

#include <set>
#include <string>

#include "mca/ast.hpp"

namespace mca {

// Facts the expression-ordering rules need about the rest of the program.
// Filled by the pointer prepass; tests can populate it by hand.
struct SharedInfo {
  // Variables accessed by both the main program and some ISR with at
  // least one writer (hardware-classified registers excluded).
  std::set<const VarDecl *> shared_decls;
  // Functions whose body (transitively) accesses shared data or performs
  // volatile accesses; calls to them are competing.
  std::set<const FunctionDef *> competing_fns;
  // Functions whose body (transitively) writes shared data.
  std::set<const FunctionDef *> shared_writing_fns;
  // Pointers that may target shared data (derefs of them compete, stores
  // through them count as shared writes).
  std::set<const VarDecl *> ptrs_to_shared;

  bool is_shared(const VarDecl *d) const { return shared_decls.count(d) != 0; }
};

// Outcome of the ordering check for one full expression.
struct WfVerdict {
  bool well_formed = true;
  bool competing = false;
  int writes_shared = 0;     // shared stores in this full expression
  std::string rule;          // violated rule, e.g. "3b", "5", "6", "two-writes"
  SourceLoc offender;        // where the violation sits

  std::string reason() const {
    if (well_formed) return "";
    return "rule " + rule + " at " + offender.str();
  }
};

// An expression competes when its evaluation touches volatile data or
// calls a function that accesses shared data; competing evaluations must
// be ordered by sequence points.
bool classify_competing(const Expr &e, const SharedInfo &info);

// The inductive well-formedness rules over one full expression:
//   1. constants and variable reads are well-formed
//   2. unary operators preserve well-formedness
//   3. binary operators allow at most one competing operand
//   4. comma and short-circuit operators only need both sides well-formed
//   5. calls allow at most one competing argument
//   6. an assignment needs a non-competing lvalue, or a right side that
//      writes no shared data (not looking through calls that merely read)
// plus the derived requirement of at most one shared write per full
// expression.
WfVerdict is_well_formed(const Expr &full_expr, const SharedInfo &info);

// Rule-by-rule derivation as text (one line per subexpression).
std::string explain_wf(const Expr &full_expr, const SharedInfo &info);

}  // namespace mca
