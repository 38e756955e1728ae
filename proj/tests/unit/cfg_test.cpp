#include <doctest.h>

#include "mca/cfg.hpp"
#include "mca/parser.hpp"
#include "mca/resolve.hpp"
#include "test_util.hpp"

using namespace mca;

namespace {

struct Lowered {
  Program prog;
  MemLocTable table;
  HardwareSpec hw;
  std::map<const FunctionDef *, Cfg> cfgs;
};

Lowered lower(const std::string &src) {
  Lowered out;
  out.hw = test::mini_hw();
  out.prog = parse_source(src);
  resolve_symbols(out.prog);
  out.cfgs = lower_program(out.prog, out.table, out.hw);
  return out;
}

int count_kind(const Cfg &cfg, NodeKind k) {
  int n = 0;
  for (auto &np : cfg.nodes)
    if (np->kind == k) ++n;
  return n;
}

}  // namespace

TEST_CASE("a busy-wait loop lowers to call, guard and a back edge") {
  Lowered l = lower(
      "uint8 f() { return 1; } void main() { while (f()) { } }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  REQUIRE(count_kind(cfg, NodeKind::Call) == 1);
  REQUIRE(count_kind(cfg, NodeKind::Guard) == 1);
  int call = -1, guard = -1;
  for (auto &np : cfg.nodes) {
    if (np->kind == NodeKind::Call) call = np->id;
    if (np->kind == NodeKind::Guard) guard = np->id;
  }
  // guard true-edge loops back to the call (the condition's first node)
  CHECK(cfg.node(call).succ[0] == guard);
  CHECK(cfg.node(guard).succ[0] == call);
}

TEST_CASE("a statement increment is one store node") {
  Lowered l = lower("uint8 pos; void main() { pos++; }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  CHECK(count_kind(cfg, NodeKind::Assign) == 1);
  for (auto &np : cfg.nodes) {
    if (np->kind != NodeKind::Assign) continue;
    CHECK(np->lhs.kind == LValue::Scalar);
    REQUIRE(np->rhs != nullptr);
    CHECK(np->rhs->kind == RExpr::Bin);
    CHECK(np->rhs->bin == BinOp::Add);
  }
}

TEST_CASE("short-circuit lowers into a guard diamond inside one full expr") {
  Lowered l = lower("uint8 a; uint8 b; uint8 c; void main() { a = b && c; }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  CHECK(count_kind(cfg, NodeKind::Guard) >= 1);
  // all non-synthetic nodes of the statement share one full expression
  int fe = -1;
  for (auto &np : cfg.nodes) {
    if (np->kind == NodeKind::Guard) fe = np->full_expr_id;
  }
  REQUIRE(fe >= 0);
  const FullExpr &full = cfg.full_exprs[fe];
  CHECK(full.nodes.size() >= 4);  // guard + both arms + final store
  // exactly one store to a lands in the expression
  int stores_to_a = 0;
  for (int id : full.nodes) {
    const CfgNode &n = cfg.node(id);
    if (n.kind == NodeKind::Assign && n.lhs.kind == LValue::Scalar &&
        l.table.name(n.lhs.id) == "a")
      ++stores_to_a;
  }
  CHECK(stores_to_a == 1);
}

TEST_CASE("call plus store spans one full expression") {
  Lowered l = lower(
      "uint8 g(uint8 v) { return v; } uint8 i; "
      "void main() { i = g(i); }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  int fe = -1;
  for (auto &np : cfg.nodes)
    if (np->kind == NodeKind::Call) fe = np->full_expr_id;
  REQUIRE(fe >= 0);
  const FullExpr &full = cfg.full_exprs[fe];
  bool has_call = false, has_store = false;
  for (int id : full.nodes) {
    if (cfg.node(id).kind == NodeKind::Call) has_call = true;
    if (cfg.node(id).kind == NodeKind::Assign) has_store = true;
  }
  CHECK(has_call);
  CHECK(has_store);
}

TEST_CASE("empty statement gets its own nop full expression") {
  Lowered l = lower("void main() { ; }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  bool found = false;
  for (const FullExpr &fe : cfg.full_exprs) {
    if (fe.ast == nullptr && fe.nodes.size() == 1 &&
        cfg.node(fe.nodes[0]).kind == NodeKind::Nop)
      found = true;
  }
  CHECK(found);
}

TEST_CASE("full expressions partition the non-synthetic nodes") {
  for (const char *f : {"uart.mc", "rgb_led.mc", "traffic_light.mc"}) {
    Lowered l = lower(read_file(test::corpus_path(f)));
    for (auto &[fn, cfg] : l.cfgs) {
      const auto &fes = mark_full_expressions(cfg);  // asserts internally
      size_t member_count = 0;
      for (auto &fe : fes) member_count += fe.nodes.size();
      size_t non_synth = 0;
      for (auto &np : cfg.nodes)
        if (np->kind != NodeKind::IsrFixpoint) ++non_synth;
      CHECK(member_count == non_synth);
    }
  }
}

TEST_CASE("nodes perform at most one memory store") {
  Lowered l = lower(read_file(test::corpus_path("uart.mc")));
  for (auto &[fn, cfg] : l.cfgs) {
    for (auto &np : cfg.nodes) {
      int writes = 0;
      for (const DirectAccess &a : np->direct)
        if (a.write) ++writes;
      CHECK(writes <= 1);
    }
  }
}

TEST_CASE("every node reaches a return or a back edge") {
  Lowered l = lower(read_file(test::corpus_path("traffic_light.mc")));
  for (auto &[fn, cfg] : l.cfgs) {
    // reachability from entry
    std::set<int> seen;
    std::vector<int> work{cfg.entry};
    while (!work.empty()) {
      int id = work.back();
      work.pop_back();
      if (!seen.insert(id).second) continue;
      for (int s : cfg.node(id).succ)
        if (s >= 0) work.push_back(s);
    }
    for (auto &np : cfg.nodes) CHECK(seen.count(np->id));
  }
}

TEST_CASE("break and continue wire to the right targets") {
  Lowered l = lower(
      "uint8 n; void main() { while (1) { n++; if (n > 4) { break; } "
      "continue; } n = 0; }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  // the trailing n = 0 must be reachable (break wired out of the loop)
  std::set<int> seen;
  std::vector<int> work{cfg.entry};
  while (!work.empty()) {
    int id = work.back();
    work.pop_back();
    if (!seen.insert(id).second) continue;
    for (int s : cfg.node(id).succ)
      if (s >= 0) work.push_back(s);
  }
  bool final_store_reached = false;
  for (auto &np : cfg.nodes)
    if (np->kind == NodeKind::Assign && np->rhs->kind == RExpr::Const &&
        np->rhs->value == 0 && seen.count(np->id))
      final_store_reached = true;
  CHECK(final_store_reached);
}

TEST_CASE("dot dump names every node") {
  Lowered l = lower(read_file(test::corpus_path("uart.mc")));
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  std::string dot = cfg_to_dot(cfg, l.table);
  CHECK(dot.find("digraph") != std::string::npos);
  for (auto &np : cfg.nodes)
    CHECK(dot.find("n" + std::to_string(np->id) + " ") != std::string::npos);
}

TEST_CASE("full-expression boundaries leave the expression") {
  Lowered l = lower("uint8 a; uint8 b; uint8 c; void main() { a = b && c; }");
  const Cfg &cfg = l.cfgs.at(l.prog.entry_function());
  for (const FullExpr &fe : cfg.full_exprs) {
    std::set<int> members(fe.nodes.begin(), fe.nodes.end());
    for (int b : full_expr_boundary(cfg, fe)) {
      const CfgNode &n = cfg.node(b);
      bool leaves = n.succ.empty();
      for (int s : n.succ)
        if (s < 0 || !members.count(s)) leaves = true;
      CHECK(leaves);
    }
  }
}
