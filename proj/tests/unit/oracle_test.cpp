#include <doctest.h>

#include "mca/oracle.hpp"
#include "mca/parser.hpp"
#include "mca/resolve.hpp"
#include "test_util.hpp"

using namespace mca;

namespace {

struct Loaded {
  Program prog;
  HardwareSpec hw;

  Loaded(const std::string &src, HardwareSpec h) : hw(std::move(h)) {
    prog = parse_source(src);
    resolve_symbols(prog);
  }

  const Expr &stmt(size_t i) const {
    return *prog.entry_function()->body->body[i]->expr;
  }
};

int store_count(const Schedule &s) {
  int n = 0;
  for (auto &mi : s.instrs)
    if (mi.kind == MicroInstr::StoreByte) ++n;
  return n;
}

// order fingerprint over variable-store names
std::string store_order(const Schedule &s) {
  std::string out;
  for (auto &mi : s.instrs)
    if (mi.kind == MicroInstr::StoreByte && mi.var)
      out += mi.var->name + " ";
  return out;
}

}  // namespace

TEST_CASE("a constant store compiles to exactly one schedule") {
  Loaded l("uint8 x; void main() { x = 1; }", test::mini_hw());
  auto s = compile_schedules(l.stmt(0), l.hw);
  REQUIRE(s.size() == 1);
  CHECK(store_count(s[0]) == 1);
}

TEST_CASE("both stores of a chained update may land in either order") {
  Loaded l("volatile uint8 a; volatile uint8 b; void main() { a = ++b; }",
           test::mini_hw());
  auto scheds = compile_schedules(l.stmt(0), l.hw);
  std::set<std::string> orders;
  for (auto &s : scheds) orders.insert(store_order(s));
  CHECK(orders.count("b a "));
  CHECK(orders.count("a b "));
}

TEST_CASE("independent loads commute") {
  Loaded l("uint8 a; uint8 b; uint8 c; void main() { a = b + c; }",
           test::mini_hw());
  auto scheds = compile_schedules(l.stmt(0), l.hw);
  std::set<std::string> load_orders;
  for (auto &s : scheds) {
    std::string o;
    for (auto &mi : s.instrs)
      if (mi.kind == MicroInstr::LoadByte) o += mi.var->name + " ";
    load_orders.insert(o);
  }
  CHECK(load_orders.size() == 2);
  CHECK(load_orders.count("b c "));
  CHECK(load_orders.count("c b "));
}

TEST_CASE("wide accesses split into unordered byte stores") {
  Loaded l("uint16 w; void main() { w = 300; }", test::mini_hw());
  auto scheds = compile_schedules(l.stmt(0), l.hw);
  CHECK(scheds.size() == 2);  // low/high in either order
  CHECK(store_count(scheds[0]) == 2);
}

TEST_CASE("the schedule cap trips on oversized expressions") {
  Loaded l(
      "uint8 a; uint8 b; uint8 c; uint8 d; uint8 e; uint8 f; uint8 g;\n"
      "void main() { a = b + c + d + e + f + g + b * c + d * e + f * g; }",
      test::mini_hw());
  CHECK_THROWS_AS(compile_schedules(l.stmt(0), l.hw, 8), Diag);
}

TEST_CASE("sequentially disabled programs explore one trace per input") {
  Loaded l(
      "uint8 x; uint8 y; volatile uint8 EN @ 0x30;\n"
      "ISR(TICK_vect) { x = 5; }\n"
      "void main() { EN = 1; y = x; }",
      test::mini_hw(/*initial_on=*/false));
  OracleResult r = enumerate_executions(l.prog, l.hw, {4, 100000});
  CHECK(r.traces_completed == 1);
  const VarDecl *y = l.prog.find_global("y");
  CHECK(r.observed(y) == std::set<int64_t>{0});
}

TEST_CASE("fires consume budget and handlers run to completion") {
  Loaded l(
      "volatile uint8 n; uint8 seen; volatile uint8 EN @ 0x30;\n"
      "ISR(TICK_vect) { n = n + 1; }\n"
      "void main() { sei(); EN = 1; seen = vu8(n); }",
      test::mini_hw());
  OracleResult r = enumerate_executions(l.prog, l.hw, {3, 100000});
  const VarDecl *n = l.prog.find_global("n");
  CHECK(r.observed(n) == std::set<int64_t>{0, 1, 2, 3});
}

TEST_CASE("enumeration produces identical sets across runs") {
  std::string src = read_file(test::corpus_path("oracle/o1_counter.mc"));
  Loaded a(src, test::tick_hw());
  Loaded b(src, test::tick_hw());
  OracleResult ra = enumerate_executions(a.prog, a.hw, {4, 1000000});
  OracleResult rb = enumerate_executions(b.prog, b.hw, {4, 1000000});
  REQUIRE(ra.at_seqpoint.size() == rb.at_seqpoint.size());
  const VarDecl *na = a.prog.find_global("n");
  const VarDecl *nb = b.prog.find_global("n");
  CHECK(ra.observed(na) == rb.observed(nb));
  CHECK(ra.traces_completed == rb.traces_completed);
}

TEST_CASE("the receiver's read index never leaves the buffer") {
  Loaded l(read_file(test::corpus_path("uart_small.mc")),
           load_hw_spec_file(test::corpus_path("uart_small.hw")));
  OracleResult r = enumerate_executions(l.prog, l.hw, {6, 2000000});
  const VarDecl *rx_out = l.prog.find_global("rx_out");
  const VarDecl *rx_in = l.prog.find_global("rx_in");
  for (int64_t v : r.observed(rx_out)) CHECK(v <= 3);
  for (int64_t v : r.observed(rx_in)) CHECK(v <= 3);
  CHECK(r.traps == 0);
}

TEST_CASE("the state budget trips instead of hanging") {
  Loaded l(read_file(test::corpus_path("uart_small.mc")),
           load_hw_spec_file(test::corpus_path("uart_small.hw")));
  try {
    enumerate_executions(l.prog, l.hw, {6, 500});
    FAIL("should throw");
  } catch (const Diag &d) {
    CHECK(d.kind() == "StateBudgetExceeded");
  }
}

TEST_CASE("torn wide reads are concretely observable") {
  Loaded l(read_file(test::corpus_path("oracle/o3_torn16.mc")),
           test::tick_hw());
  OracleResult r = enumerate_executions(l.prog, l.hw, {4, 1000000});
  const VarDecl *snap = l.prog.find_global("snap");
  std::set<int64_t> seen = r.observed(snap);
  bool torn = false;
  for (int64_t v : seen)
    if (v > 300) torn = true;  // mixed old/new halves escape the range
  CHECK(torn);
}
