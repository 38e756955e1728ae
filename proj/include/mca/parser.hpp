#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mca/ast.hpp"
#include "mca/token.hpp"

namespace mca {

// Parses a token sequence into an unresolved Program. Precedence and the
// sequence-point-relevant structure (comma, &&, ||, calls) are preserved
// exactly; ++/--/op= are desugared into tagged assignments. Throws
// Diag("ParseError") with position and the expected token on failure.
Program parse_program(std::vector<Token> tokens);

// Convenience: tokenize + parse.
Program parse_source(const std::string &source);

// Deep copy (used for desugaring and by tests).
ExprPtr clone_expr(const Expr &e);

}  // namespace mca
