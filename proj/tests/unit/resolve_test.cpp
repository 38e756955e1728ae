#include <doctest.h>

#include "mca/parser.hpp"
#include "mca/resolve.hpp"
#include "test_util.hpp"

using namespace mca;

namespace {

Program resolved(const std::string &src) {
  Program p = parse_source(src);
  resolve_symbols(p);
  return p;
}

}  // namespace

TEST_CASE("volatile cast marks the access, not the declaration") {
  Program p = resolved("uint8 rx_in; void main() { uint8 x; x = vu8(rx_in); }");
  const VarDecl *d = p.find_global("rx_in");
  CHECK_FALSE(d->is_volatile);
  const Expr &rhs = *p.functions[0]->body->body[1]->expr->rhs();
  CHECK(rhs.kind == ExprKind::VolatileCast);
  CHECK(is_volatile_access(rhs));
  CHECK(rhs.kid(0)->decl == d);
}

TEST_CASE("undeclared identifiers are rejected") {
  try {
    resolved("void main() { foo = 1; }");
    FAIL("should throw");
  } catch (const Diag &d) {
    CHECK(d.kind() == "UndeclaredIdentifier");
  }
}

TEST_CASE("mixed widths promote to the wider type") {
  Program p = resolved(
      "uint8 a; uint16 b; uint16 c; void main() { c = a + b; }");
  const Expr &sum = *p.functions[0]->body->body[0]->expr->rhs();
  CHECK(sum.type.base == Base::U16);
  CHECK(promote(Base::U8, Base::I16) == Base::I16);
  CHECK(promote(Base::U8, Base::I8) == Base::U8);
}

TEST_CASE("comparisons yield byte-sized flags") {
  Program p = resolved("uint16 a; uint8 f; void main() { f = a < 500; }");
  CHECK(p.functions[0]->body->body[0]->expr->rhs()->type.base == Base::U8);
}

TEST_CASE("recursion is rejected") {
  try {
    resolved("uint8 f() { return f(); } void main() { f(); }");
    FAIL("should throw");
  } catch (const Diag &d) {
    CHECK(d.kind() == "RecursionUnsupported");
  }
  // mutual recursion: g is not yet defined at the call site
  CHECK_THROWS_AS(resolved("uint8 f() { return g(); } uint8 g() { return "
                           "f(); } void main() { }"),
                  Diag);
}

TEST_CASE("interrupt enabling inside handlers is rejected") {
  CHECK_THROWS_AS(resolved("ISR(T_vect) { sei(); } void main() { }"), Diag);
  CHECK_THROWS_AS(
      resolved("void on() { sei(); } ISR(T_vect) { on(); } void main() { }"),
      Diag);
  // cli() inside a handler is harmless
  Program p = resolved("ISR(T_vect) { cli(); } void main() { }");
  CHECK(p.isrs.size() == 1);
}

TEST_CASE("type shape errors") {
  CHECK_THROWS_AS(resolved("uint8 a[4]; uint8 b; void main() { b = a; }"),
                  Diag);
  CHECK_THROWS_AS(resolved("uint8 a[4]; void main() { a = 1; }"), Diag);
  CHECK_THROWS_AS(resolved("uint8 x; void main() { x = *x; }"), Diag);
  CHECK_THROWS_AS(resolved("uint16 x; void main() { x = vu8(x); }"), Diag);
  CHECK_THROWS_AS(resolved("void main() { main(1); }"), Diag);
  CHECK_THROWS_AS(resolved("uint8 x; uint8 x; void main() { }"), Diag);
}

TEST_CASE("entry must take no parameters") {
  Program p = parse_source("void main(uint8 x) { }");
  resolve_symbols(p);
  CHECK_THROWS_AS(check_entry(p), Diag);
}

TEST_CASE("locals shadow globals per scope") {
  Program p = resolved(
      "uint8 x; void main() { uint8 x; x = 1; { uint8 y; y = x; } }");
  const Stmt &assign = *p.functions[0]->body->body[1];
  CHECK(assign.expr->lhs()->decl->storage == Storage::Local);
}
