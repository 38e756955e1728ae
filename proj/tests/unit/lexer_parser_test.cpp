#include <doctest.h>

#include "mca/lexer.hpp"
#include "mca/parser.hpp"
#include "mca/printer.hpp"
#include "mca/resolve.hpp"
#include "test_util.hpp"

using namespace mca;

TEST_CASE("tokenize basics") {
  auto toks = tokenize("rx_in++;");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].kind == Tok::Ident);
  CHECK(toks[0].text == "rx_in");
  CHECK(toks[1].kind == Tok::PlusPlus);
  CHECK(toks[2].kind == Tok::Semi);

  CHECK(tokenize("").empty());

  auto hex = tokenize("0x5F");
  REQUIRE(hex.size() == 1);
  CHECK(hex[0].kind == Tok::IntLit);
  CHECK(hex[0].value == 0x5F);
}

TEST_CASE("tokens carry positions, comments are dropped") {
  auto toks = tokenize("a // comment\n  /* block\n */ b");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].loc.line == 1);
  CHECK(toks[0].loc.col == 1);
  CHECK(toks[1].text == "b");
  CHECK(toks[1].loc.line == 3);
}

TEST_CASE("lex errors carry positions") {
  CHECK_THROWS_AS(tokenize("a $ b"), Diag);
  CHECK_THROWS_AS(tokenize("/* unterminated"), Diag);
  CHECK_THROWS_AS(tokenize("0xZZ"), Diag);
}

TEST_CASE("parse the receiver program") {
  Program p = parse_source(read_file(test::corpus_path("uart.mc")));
  CHECK(p.functions.size() == 4);  // getNextPos isEmpty getByte main
  CHECK(p.isrs.size() == 1);
  CHECK(p.isrs[0]->name == "USART0_RX_vect");
  const VarDecl *buff = p.find_global("rx_buff");
  REQUIRE(buff != nullptr);
  CHECK(buff->ctype.is_array);
  CHECK(buff->ctype.array_len == 16);
  const VarDecl *ien = p.find_global("URX0_IEN");
  REQUIRE(ien != nullptr);
  CHECK(ien->is_volatile);
  CHECK(ien->absolute_address == 0x2B);
}

TEST_CASE("globals alone parse; entry check rejects later") {
  Program p = parse_source("uint8 x;");
  CHECK(p.globals.size() == 1);
  CHECK(p.functions.empty());
  resolve_symbols(p);
  CHECK_THROWS_AS(check_entry(p), Diag);
}

TEST_CASE("assignment is right-associative") {
  Program p = parse_source("uint8 a; uint8 b; void main() { a = b = 0; }");
  const Stmt &s = *p.functions[0]->body->body[0];
  const Expr &e = *s.expr;
  REQUIRE(e.kind == ExprKind::Assign);
  CHECK(e.lhs()->name == "a");
  REQUIRE(e.rhs()->kind == ExprKind::Assign);
  CHECK(e.rhs()->lhs()->name == "b");
}

TEST_CASE("inc/dec and compound assignments desugar with their tag") {
  Program p = parse_source(
      "uint8 x; void main() { x++; --x; x += 3; x <<= 1; }");
  auto &body = p.functions[0]->body->body;
  const Expr &post = *body[0]->expr;
  CHECK(post.kind == ExprKind::Assign);
  CHECK(post.sugar == Sugar::PostInc);
  CHECK(post.rhs()->kind == ExprKind::Binary);
  CHECK(post.rhs()->bin_op == BinOp::Add);
  CHECK(body[1]->expr->sugar == Sugar::PreDec);
  CHECK(body[2]->expr->sugar == Sugar::AddA);
  CHECK(body[3]->expr->sugar == Sugar::ShlA);
}

TEST_CASE("parse errors carry expectation and position") {
  try {
    parse_source("void main( { }");
    FAIL("should throw");
  } catch (const Diag &d) {
    CHECK(d.kind() == "ParseError");
    CHECK(d.loc().line == 1);
  }
  CHECK_THROWS_AS(parse_source("uint8 a[0];"), Diag);
  CHECK_THROWS_AS(parse_source("void main() { 1 = 2; }"), Diag);
}

TEST_CASE("print/parse round-trips to the same shape") {
  const char *sources[] = {
      "uint8 x; void main() { x = (x + 1) * 2; }",
      "uint8 a; uint8 b; void main() { a = b && !a || b; }",
      "uint8 n; void main() { for (n = 0; n < 8; n++) { n += 2; } }",
      "uint8 v[4]; void main() { uint8 i; i = 0; do { v[i] = i; i++; } "
      "while (i < 4); }",
      "uint8 x; uint8 *p; void main() { p = &x; *p = vu8(x) + 1; }",
  };
  for (const char *src : sources) {
    CAPTURE(src);
    Program a = parse_source(src);
    Program b = parse_source(print_program(a));
    CHECK(same_shape(a, b));
  }
}

TEST_CASE("corpus programs round-trip") {
  for (const char *f : {"uart.mc", "rgb_led.mc", "traffic_light.mc"}) {
    Program a = parse_source(read_file(test::corpus_path(f)));
    Program b = parse_source(print_program(a));
    CHECK(same_shape(a, b));
  }
}

TEST_CASE("parsing is deterministic") {
  std::string src = read_file(test::corpus_path("uart.mc"));
  Program a = parse_source(src);
  Program b = parse_source(src);
  CHECK(same_shape(a, b));
  CHECK(print_program(a) == print_program(b));
}
