#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mca/ctype.hpp"
#include "mca/source.hpp"

namespace mca {

struct VarDecl;
struct FunctionDef;

enum class ExprKind : uint8_t {
  Const,
  Var,
  Unary,
  Binary,
  Logic,   // && ||, sequence points
  Comma,   // sequence point
  Call,
  Assign,
  Index,   // base[index]
  AddrOf,
  Deref,
  VolatileCast,  // vu8/vi8/vu16/vi16 around an lvalue
};

enum class UnOp : uint8_t { Neg, Not, BitNot };

enum class BinOp : uint8_t {
  Add, Sub, Mul, Div, Mod, Shl, Shr, BitOr, BitAnd, BitXor,
  Lt, Le, Gt, Ge, Eq, Ne,
};

enum class LogicOp : uint8_t { And, Or };

// ++/--/op= are desugared into Assign nodes; the sugar tag records the
// surface form (the lvalue is both read and written) for printing and
// for the expression-ordering rules.
enum class Sugar : uint8_t {
  None, PreInc, PreDec, PostInc, PostDec,
  AddA, SubA, MulA, DivA, ModA, ShlA, ShrA, AndA, OrA, XorA,
};

struct Expr {
  ExprKind kind;
  SourceLoc loc;
  CType type;  // filled by resolve

  int64_t value = 0;           // Const
  std::string name;            // Var / Call
  UnOp un_op{};                // Unary
  BinOp bin_op{};              // Binary
  LogicOp logic_op{};          // Logic
  Sugar sugar = Sugar::None;   // Assign
  Base cast_base{};            // VolatileCast

  const VarDecl *decl = nullptr;       // Var, resolved
  const FunctionDef *callee = nullptr; // Call, resolved

  std::vector<std::unique_ptr<Expr>> kids;

  Expr(ExprKind k, SourceLoc l) : kind(k), loc(l) {}

  Expr *kid(size_t i) const { return kids[i].get(); }
  // Assign accessors
  Expr *lhs() const { return kids[0].get(); }
  Expr *rhs() const { return kids[1].get(); }

  // True for an expression that denotes a memory location.
  bool is_lvalue() const {
    return kind == ExprKind::Var || kind == ExprKind::Index ||
           kind == ExprKind::Deref || kind == ExprKind::VolatileCast;
  }
};

using ExprPtr = std::unique_ptr<Expr>;

enum class Storage : uint8_t { Global, Local, Param };

struct VarDecl {
  std::string name;
  CType ctype;
  bool is_volatile = false;
  Storage storage = Storage::Global;
  std::optional<int64_t> absolute_address;  // memory-mapped binding (@ addr)
  std::optional<int64_t> init_value;        // globals: constant initializer
  const FunctionDef *owner = nullptr;       // locals/params
  SourceLoc loc;
  int uid = -1;  // assigned by resolve, unique across the program
};

enum class StmtKind : uint8_t {
  Expr,      // expression statement; expr == null for empty `;`
  Block,
  If,
  While,
  DoWhile,
  For,
  Return,
  Break,
  Continue,
  LocalDecl,
};

struct Stmt {
  StmtKind kind;
  SourceLoc loc;

  ExprPtr expr;   // Expr stmt / If cond / While cond / Return value / For cond
  ExprPtr expr2;  // For init
  ExprPtr expr3;  // For step
  std::vector<std::unique_ptr<Stmt>> body;   // Block members / loop+if then
  std::vector<std::unique_ptr<Stmt>> body2;  // If else
  std::unique_ptr<VarDecl> decl;             // LocalDecl
  ExprPtr init;                              // LocalDecl initializer

  Stmt(StmtKind k, SourceLoc l) : kind(k), loc(l) {}
};

using StmtPtr = std::unique_ptr<Stmt>;

struct FunctionDef {
  std::string name;        // ISRs: vector name
  CType return_type;
  bool is_isr = false;
  std::vector<std::unique_ptr<VarDecl>> params;
  StmtPtr body;  // Block
  SourceLoc loc;

  // Filled by resolve: every local declared anywhere in the body.
  std::vector<VarDecl *> locals;
};

struct Program {
  std::vector<std::unique_ptr<VarDecl>> globals;
  std::vector<std::unique_ptr<FunctionDef>> functions;
  std::vector<std::unique_ptr<FunctionDef>> isrs;
  std::string entry = "main";

  const FunctionDef *find_function(const std::string &n) const {
    for (auto &f : functions)
      if (f->name == n) return f.get();
    return nullptr;
  }
  const FunctionDef *find_isr(const std::string &vec) const {
    for (auto &f : isrs)
      if (f->name == vec) return f.get();
    return nullptr;
  }
  const VarDecl *find_global(const std::string &n) const {
    for (auto &g : globals)
      if (g->name == n) return g.get();
    return nullptr;
  }
  const FunctionDef *entry_function() const { return find_function(entry); }

  // All function definitions, entry/helpers first, then ISRs.
  std::vector<const FunctionDef *> all_functions() const {
    std::vector<const FunctionDef *> out;
    for (auto &f : functions) out.push_back(f.get());
    for (auto &f : isrs) out.push_back(f.get());
    return out;
  }
};

const char *un_op_str(UnOp op);
const char *bin_op_str(BinOp op);

}  // namespace mca
