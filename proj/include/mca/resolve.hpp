#pragma once

#include "mca/ast.hpp"

namespace mca {

// Symbol resolution and type checking, in place. Links every variable
// access to its declaration, assigns declaration uids, computes static
// types with the widening promotion rule, validates Mini-C restrictions
// (no recursion, no interrupt enabling inside ISRs, lvalue shapes), and
// collects per-function local lists.
//
// Throws Diag with kinds UndeclaredIdentifier, TypeMismatch,
// RecursionUnsupported, UnsupportedConstruct, DuplicateDefinition.
void resolve_symbols(Program &prog);

// Entry validation (separate so a symbol-clean library of functions can
// still be inspected): exactly one `main`, taking no parameters.
void check_entry(const Program &prog);

// Whether this expression node is a volatile access: a volatile-cast, or
// a variable/array/pointer access whose declaration is volatile.
bool is_volatile_access(const Expr &e);

// True for calls to the interrupt built-ins.
bool is_sei_call(const Expr &e);
bool is_cli_call(const Expr &e);

}  // namespace mca
