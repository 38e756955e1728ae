#pragma once

#include <string>

#include "mca/ast.hpp"

namespace mca {

// Source-level rendering of the AST. Desugared assignments are printed in
// their surface form (x++, x += 1, ...), so print -> parse round-trips to
// a structurally identical tree.
std::string print_expr(const Expr &e);
std::string print_stmt(const Stmt &s, int indent = 0);
std::string print_program(const Program &p);

// Structural comparison ignoring resolution results (used by round-trip
// tests).
bool same_shape(const Expr &a, const Expr &b);
bool same_shape(const Program &a, const Program &b);

}  // namespace mca
