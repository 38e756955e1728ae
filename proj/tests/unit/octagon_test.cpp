#include <doctest.h>

#include "mca/octagon.hpp"

using namespace mca;

namespace {

Octagon::VarInfo u8var(MemLocId id) { return {id, 0, 255}; }

Octagon top3() { return Octagon::top({u8var(0), u8var(1), u8var(2)}); }

}  // namespace

TEST_CASE("top carries only type bounds") {
  Octagon t = Octagon::top({u8var(0)});
  CHECK(t.bounds(0) == Interval{0, 255});
  Octagon i16 = Octagon::top({{1, -32768, 32767}});
  CHECK(i16.bounds(1) == Interval{-32768, 32767});
  Octagon empty = Octagon::top({});
  CHECK_FALSE(empty.is_bottom());
  CHECK(Octagon::leq(empty, empty));
}

TEST_CASE("bottom is least") {
  Octagon b = Octagon::bottom({u8var(0), u8var(1)});
  Octagon t = Octagon::top({u8var(0), u8var(1)});
  CHECK(b.is_bottom());
  CHECK(Octagon::leq(b, t));
  CHECK(Octagon::leq(b, b));
  CHECK_FALSE(Octagon::leq(t, b));
  CHECK(b.bounds(0).is_empty());
}

TEST_CASE("closure adds transitive differences") {
  // x - y <= 0, y - z <= 0  implies  x - z <= 0
  Octagon o = top3();
  o = o.guard_le2(0, 1, 1, -1, 0);
  o = o.guard_le2(1, 1, 2, -1, 0);
  Octagon c = o.closed();
  // x <= z everywhere: guard the opposite and meet emptiness via bounds
  Octagon contra = c.guard_le2(2, 1, 0, -1, -1);  // z - x <= -1, i.e. z < x
  CHECK(contra.is_bottom());
}

TEST_CASE("contradiction closes to bottom") {
  Octagon o = Octagon::top({u8var(0), u8var(1)});
  o = o.guard_le2(0, 1, 1, -1, -1);  // x - y <= -1
  o = o.guard_le2(1, 1, 0, -1, -1);  // y - x <= -1
  CHECK(o.closed().is_bottom());
}

TEST_CASE("assignment transfers") {
  Octagon t = top3();
  Octagon a = t.assign_const(0, 5);
  CHECK(a.bounds(0) == Interval{5, 5});

  // x := y gives the exact relational copy
  Octagon b = t.assign_interval(1, {2, 3}).assign_affine(0, 1, 1, 0);
  CHECK(b.bounds(0) == Interval{2, 3});
  CHECK(b.guard_le2(0, 1, 1, -1, -1).is_bottom());  // x < y impossible
  CHECK(b.guard_le2(1, 1, 0, -1, -1).is_bottom());  // y < x impossible

  // pos := pos + 1 on [0,15]
  Octagon c = t.assign_interval(0, {0, 15}).assign_affine(0, 0, 1, 1);
  CHECK(c.bounds(0) == Interval{1, 16});

  // x := -y + 10 over y in [2,3]
  Octagon d = t.assign_interval(1, {2, 3}).assign_affine(0, 1, -1, 10);
  CHECK(d.bounds(0) == Interval{7, 8});

  // overflow takes the whole type range
  Octagon e = t.assign_interval(0, {250, 255}).assign_affine(0, 0, 1, 10);
  CHECK(e.bounds(0) == Interval{0, 255});
}

TEST_CASE("guards refine and detect emptiness") {
  Octagon t = top3();
  Octagon pos = t.assign_interval(0, {1, 16});
  CHECK(pos.guard_le(0, -1, -16).bounds(0) == Interval{16, 16});  // pos >= 16
  CHECK(pos.guard_le(0, 1, 15).bounds(0) == Interval{1, 15});     // pos <= 15
  CHECK(t.assign_interval(0, {0, 255}).guard_le(0, 1, -1).is_bottom());
}

TEST_CASE("havoc drops relations and bounds the variable") {
  Octagon t = top3();
  Octagon o = t.assign_interval(1, {3, 7}).assign_affine(0, 1, 1, 0);
  Octagon h = o.havoc(0, {0, 255});
  CHECK(h.bounds(0) == Interval{0, 255});
  CHECK(h.bounds(1) == Interval{3, 7});  // frame preserved
  // the old x == y relation must be gone: x < y is feasible now
  CHECK_FALSE(h.guard_le2(0, 1, 1, -1, -1).is_bottom());
  // havoc on bottom stays bottom
  CHECK(Octagon::bottom({u8var(0)}).havoc(0, {0, 255}).is_bottom());
}

TEST_CASE("join is an upper bound; widen jumps to type bounds") {
  Octagon t = Octagon::top({u8var(0)});
  Octagon a = t.assign_const(0, 0);
  Octagon b = t.assign_const(0, 1);
  Octagon j = Octagon::join(a, b);
  CHECK(j.bounds(0) == Interval{0, 1});
  CHECK(Octagon::leq(a, j));
  CHECK(Octagon::leq(b, j));

  Octagon w = Octagon::widen(j, t.assign_interval(0, {0, 2}));
  CHECK(w.bounds(0) == Interval{0, 255});

  Octagon stable = Octagon::widen(j, j);
  CHECK(Octagon::same_repr(stable, j));
}

TEST_CASE("restrict projects exactly; embed drops stale relations") {
  Octagon t = top3();
  // x - y <= 3, y - z <= 1 (as guards on fresh top)
  Octagon o = t.guard_le2(0, 1, 1, -1, 3).guard_le2(1, 1, 2, -1, 1);
  Octagon r = o.restrict_to({0, 2});
  CHECK(r.num_vars() == 2);
  // x - z <= 4 came through the projection
  CHECK(r.guard_le2(2, 1, 0, -1, -5).is_bottom());
  CHECK(r.bounds(0) == o.bounds(0));
  CHECK(r.bounds(2) == o.bounds(2));

  // restrict-then-embed with no change stays leq-equal on kept dims
  Octagon back = o.embed(r, {});
  CHECK(Octagon::leq(back, o));
  CHECK(Octagon::leq(o, back));

  // after a callee modified x, relations from x to retained vars drop
  Octagon small = r.assign_const(0, 9);
  Octagon emb = o.embed(small, {0});
  CHECK(emb.bounds(0) == Interval{9, 9});
  CHECK_FALSE(emb.guard_le2(0, 1, 1, -1, -1).is_bottom());
}

TEST_CASE("extended adds fresh dimensions at type bounds") {
  Octagon t = Octagon::top({u8var(0)});
  Octagon o = t.assign_const(0, 3).extended({u8var(5)});
  CHECK(o.bounds(0) == Interval{3, 3});
  CHECK(o.bounds(5) == Interval{0, 255});
  CHECK(o.has_var(5));
}
