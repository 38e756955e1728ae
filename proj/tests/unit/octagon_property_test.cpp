// Randomized octagon properties, checked against independent oracles:
// a chaotic single-step rewriting closure and brute-force integer point
// enumeration on small boxes.

#include <doctest.h>

#include <random>

#include "mca/octagon.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mca;
using dbm::kInf;

namespace {

// ---- chaotic closure oracle: apply single triangle/coherence/tighten/
// strengthen steps until nothing changes ----

bool oracle_close(std::vector<int64_t> &m, int n2) {
  auto at = [&](int i, int j) -> int64_t & { return m[(size_t)i * n2 + j]; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n2; ++i)
      if (at(i, i) < 0) return false;
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n2; ++j) {
        int64_t co = at(j ^ 1, i ^ 1);
        if (co < at(i, j)) {
          at(i, j) = co;
          changed = true;
        }
        for (int k = 0; k < n2; ++k) {
          int64_t v = dbm::add(at(i, k), at(k, j));
          if (v < at(i, j)) {
            at(i, j) = v;
            changed = true;
          }
        }
      }
    for (int i = 0; i < n2; ++i) {
      int64_t &u = at(i, i ^ 1);
      if (u < kInf && (u & 1)) {
        u = 2 * dbm::floor_div2(u);
        changed = true;
      }
    }
    for (int i = 0; i < n2; ++i) {
      int64_t a = at(i, i ^ 1), b = at(i ^ 1, i);
      if (a < kInf && b < kInf && a + b < 0) return false;
    }
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n2; ++j) {
        if (i == j) continue;
        int64_t hi = at(i, i ^ 1), hj = at(j ^ 1, j);
        if (hi >= kInf || hj >= kInf) continue;
        int64_t v = dbm::floor_div2(hi) + dbm::floor_div2(hj);
        if (v < at(i, j)) {
          at(i, j) = v;
          changed = true;
        }
      }
  }
  return true;
}

// random coherent DBM over n vars with small entries
std::vector<int64_t> random_dbm(std::mt19937 &rng, int n, int span) {
  int n2 = 2 * n;
  std::vector<int64_t> m((size_t)n2 * n2, kInf);
  auto at = [&](int i, int j) -> int64_t & { return m[(size_t)i * n2 + j]; };
  for (int i = 0; i < n2; ++i) at(i, i) = 0;
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_int_distribution<int> val(-span, 2 * span);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) {
      if (i == j) continue;
      if (coin(rng) == 0) {
        int64_t v = val(rng);
        at(i, j) = std::min(at(i, j), v);
        at(j ^ 1, i ^ 1) = at(i, j);
      }
    }
  return m;
}

std::vector<Octagon::VarInfo> small_vars(int n, int64_t lo, int64_t hi) {
  std::vector<Octagon::VarInfo> v;
  for (int i = 0; i < n; ++i) v.push_back({i, lo, hi});
  return v;
}

// random non-bottom octagon built from random transfers on top
Octagon random_octagon(std::mt19937 &rng, int n) {
  Octagon o = Octagon::top(small_vars(n, 0, 255));
  std::uniform_int_distribution<int> var(0, n - 1);
  std::uniform_int_distribution<int> cv(0, 255);
  std::uniform_int_distribution<int> op(0, 3);
  for (int step = 0; step < 6; ++step) {
    int x = var(rng), y = var(rng);
    switch (op(rng)) {
      case 0:
        o = o.assign_const(x, cv(rng));
        break;
      case 1: {
        int64_t a = cv(rng), b = cv(rng);
        o = o.assign_interval(x, {std::min(a, b), std::max(a, b)});
        break;
      }
      case 2:
        if (x != y) o = o.assign_affine(x, y, rng() & 1 ? 1 : -1,
                                        (int64_t)(rng() % 17) - 8);
        break;
      case 3: {
        Octagon g = o.guard_le(x, rng() & 1 ? 1 : -1, cv(rng));
        if (!g.is_bottom()) o = std::move(g);
        break;
      }
    }
  }
  return o;
}

bool sat_point(const std::vector<int64_t> &m, int n2,
               const std::vector<int64_t> &pt) {
  auto v = [&](int i) { return (i & 1) ? -pt[i / 2] : pt[i / 2]; };
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) {
      int64_t bound = m[(size_t)i * n2 + j];
      if (bound >= kInf) continue;
      if (v(j) - v(i) > bound) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("tight closure equals the chaotic rewriting oracle") {
  const int kCases = 10000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 64)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(7000 + c);
    int n = 2 + (int)(rng() % 3);  // 2..4 vars
    std::vector<int64_t> a = random_dbm(rng, n, 8);
    std::vector<int64_t> b = a;
    bool fa = dbm::tight_close_serial(a, 2 * n);
    bool fb = oracle_close(b, 2 * n);
    if (fa != fb) {
      ++failures;
      continue;
    }
    if (fa && a != b) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("serial and parallel closures produce identical matrices") {
  const int kCases = 2000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 16)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(9100 + c);
    int n = 2 + (int)(rng() % 6);
    std::vector<int64_t> a = random_dbm(rng, n, 12);
    std::vector<int64_t> b = a;
    bool fa = dbm::tight_close_serial(a, 2 * n);
    bool fb = dbm::tight_close_parallel(b, 2 * n);
    if (fa != fb || (fa && a != b)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("closure is idempotent") {
  const int kCases = 10000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 64)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(100 + c);
    int n = 2 + (int)(rng() % 3);
    std::vector<int64_t> a = random_dbm(rng, n, 10);
    if (!dbm::tight_close_serial(a, 2 * n)) continue;
    std::vector<int64_t> again = a;
    bool ok = dbm::tight_close_serial(again, 2 * n);
    if (!ok || again != a) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("closure preserves the integer concretization") {
  const int kCases = 2000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 16)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(4200 + c);
    int n = 2;
    std::vector<int64_t> a = random_dbm(rng, n, 5);
    std::vector<int64_t> closed = a;
    bool feasible = dbm::tight_close_serial(closed, 2 * n);
    bool any = false;
    for (int64_t x = -6; x <= 6; ++x) {
      for (int64_t y = -6; y <= 6; ++y) {
        bool in_a = sat_point(a, 2 * n, {x, y});
        if (in_a) any = true;
        bool in_c = feasible && sat_point(closed, 2 * n, {x, y});
        if (in_a != in_c && (x > -6 && x < 6 && y > -6 && y < 6)) {
          // interior points must be preserved exactly (the box edge may
          // be cut by constraints beyond the sampled window)
          ++failures;
        }
      }
    }
    if (!feasible && any) {
      // a system declared infeasible must have no integer points at all
      // within any window
      ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("join is the least octagon upper bound") {
  const int kCases = 10000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 64)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(31000 + c);
    int n = 2 + (int)(rng() % 2);
    Octagon a = random_octagon(rng, n);
    Octagon b = random_octagon(rng, n);
    Octagon j = Octagon::join(a, b);
    if (!Octagon::leq(a, j) || !Octagon::leq(b, j)) {
      ++failures;
      continue;
    }
    // any other upper bound dominates the join
    Octagon c2 = Octagon::join(j, random_octagon(rng, n));
    if (!Octagon::leq(j, c2)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("widening chains stabilize within (2n)^2 + 1 steps") {
  const int kCases = 10000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 64)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(5150 + c);
    int n = 2 + (int)(rng() % 2);
    int limit = (2 * n) * (2 * n) + 1;
    Octagon x = random_octagon(rng, n);
    int steps = 0;
    for (; steps <= limit + 1; ++steps) {
      Octagon grow = Octagon::join(x, random_octagon(rng, n));
      Octagon next = Octagon::widen(x, grow);
      if (Octagon::same_repr(next, x)) break;
      x = std::move(next);
    }
    if (steps > limit) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("restriction is exact on kept variables") {
  const int kCases = 10000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 64)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(880 + c);
    Octagon a = random_octagon(rng, 3);
    if (a.is_bottom()) continue;
    Octagon r = a.restrict_to({0, 2});
    if (a.bounds(0) != r.bounds(0) || a.bounds(2) != r.bounds(2)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("random transfers stay sound on concrete states") {
  // concrete points tracked through assign/guard must stay inside the
  // abstract result
  const int kCases = 10000;
  int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : failures) schedule(dynamic, 64)
#endif
  for (int c = 0; c < kCases; ++c) {
    std::mt19937 rng(60000 + c);
    int n = 3;
    Octagon o = Octagon::top(small_vars(n, 0, 255));
    std::vector<int64_t> pt = {(int64_t)(rng() % 256), (int64_t)(rng() % 256),
                               (int64_t)(rng() % 256)};
    for (int i = 0; i < n; ++i)
      o = o.assign_interval(
          i, {std::max<int64_t>(0, pt[i] - (int64_t)(rng() % 5)),
              std::min<int64_t>(255, pt[i] + (int64_t)(rng() % 5))});
    for (int step = 0; step < 5; ++step) {
      int x = (int)(rng() % n), y = (int)(rng() % n);
      int kind = (int)(rng() % 3);
      if (kind == 0) {
        int64_t cv = (int64_t)(rng() % 256);
        o = o.assign_const(x, cv);
        pt[x] = cv;
      } else if (kind == 1 && x != y) {
        int sign = (rng() & 1) ? 1 : -1;
        int64_t cv = (int64_t)(rng() % 9) - 4;
        o = o.assign_affine(x, y, sign, cv);
        int64_t value = sign * pt[y] + cv;
        if (value < 0 || value > 255) {
          // overflow: the abstract side takes type bounds; any concrete
          // wrap stays inside them
          value = ((value % 256) + 256) % 256;
        }
        pt[x] = value;
      } else {
        int64_t cv = pt[x] + (int64_t)(rng() % 3);  // satisfied guard
        o = o.guard_le(x, 1, cv);
      }
      if (o.is_bottom()) {
        ++failures;
        break;
      }
      for (int i = 0; i < n; ++i)
        if (!o.bounds(i).contains(pt[i])) {
          ++failures;
          break;
        }
    }
  }
  CHECK(failures == 0);
}
