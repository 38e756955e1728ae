#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mca/interval.hpp"
#include "mca/memloc.hpp"

namespace mca {

// Octagon bound. INF is the absent constraint; arithmetic saturates so a
// bound never silently wraps.
namespace dbm {
inline constexpr int64_t kInf = int64_t(1) << 60;
inline int64_t add(int64_t a, int64_t b) {
  if (a >= kInf || b >= kInf) return kInf;
  int64_t s = a + b;
  return s >= kInf ? kInf : s;
}
inline int64_t floor_div2(int64_t a) {
  // floor division, also for negatives
  return a >= 0 ? a / 2 : -((-a + 1) / 2);
}

enum class Mode { Auto, Serial, Parallel };
void set_closure_mode(Mode m);
Mode closure_mode();

// Tight closure of a coherent octagonal DBM over 2n vertices (integer
// solutions): all-pairs shortest paths, unary tightening, then a
// strengthening pass, repeated until stable. Returns false on an
// infeasible system. The serial variant is the reference; the parallel
// variant distributes the row loops with OpenMP and produces bit-identical
// matrices.
bool tight_close_serial(std::vector<int64_t> &m, int n2);
bool tight_close_parallel(std::vector<int64_t> &m, int n2);
bool tight_close(std::vector<int64_t> &m, int n2);  // mode dispatch
}  // namespace dbm

// Relational domain of constraints (+/-)x (+/-)y <= c over a fixed,
// ordered set of numeric memory locations. Representation: a coherent
// 2n x 2n bound matrix over the doubled variable set, vertex 2k carrying
// +x_k and vertex 2k+1 carrying -x_k; m[i][j] bounds V_j - V_i.
//
// Unary bounds are clamped to each variable's type range, so every
// non-bottom octagon concretizes inside the type box. Value semantics;
// every operation returns a new octagon.
class Octagon {
 public:
  struct VarInfo {
    MemLocId id = kNoMemLoc;
    int64_t tmin = 0;
    int64_t tmax = 255;
  };

  Octagon() = default;

  static Octagon top(std::vector<VarInfo> vars);
  static Octagon bottom(std::vector<VarInfo> vars);

  bool is_bottom() const { return bottom_; }
  size_t num_vars() const { return vars_.size(); }
  const std::vector<VarInfo> &vars() const { return vars_; }
  bool has_var(MemLocId id) const { return index_of(id) >= 0; }

  // Tightest interval for one variable (closes if needed).
  Interval bounds(MemLocId id) const;

  // Canonical form; detects infeasibility. Idempotent.
  Octagon closed() const;
  bool is_closed() const { return closed_ || bottom_; }

  // Transfer functions. Every result is re-closed.
  Octagon assign_const(MemLocId x, int64_t c) const;
  //   x := sign*y + c   (sign in {+1,-1}); exact, handles x == y.
  Octagon assign_affine(MemLocId x, MemLocId y, int sign, int64_t c) const;
  //   x := any value in [lo, hi]; drops relations on x (also the havoc op).
  Octagon assign_interval(MemLocId x, Interval v) const;
  Octagon havoc(MemLocId x, Interval v) const { return assign_interval(x, v); }
  //   Weak update: x may or may not take the value (array summaries).
  Octagon weak_update(MemLocId x, Interval v) const;

  //   Constraint sign_x*x <= c   or   sign_x*x + sign_y*y <= c.
  Octagon guard_le(MemLocId x, int sign_x, int64_t c) const;
  Octagon guard_le2(MemLocId x, int sign_x, MemLocId y, int sign_y,
                    int64_t c) const;

  static Octagon join(const Octagon &a, const Octagon &b);
  // Widening with type-bound thresholds; the result is intentionally kept
  // un-closed so repeated widening ratchets entry-wise.
  static Octagon widen(const Octagon &a, const Octagon &b);
  static bool leq(const Octagon &a, const Octagon &b);
  static bool same_repr(const Octagon &a, const Octagon &b);

  // Projection onto a subset of the variables (exact).
  Octagon restrict_to(const std::vector<MemLocId> &keep) const;
  // Adds fresh variables at their type bounds.
  Octagon extended(const std::vector<VarInfo> &extra) const;
  // Replaces this octagon's constraints on small's variables: relations of
  // `modified` variables to retained ones are dropped, then small's
  // constraints are met in and the result re-closed. small.vars must be a
  // subset of this octagon's vars.
  Octagon embed(const Octagon &small,
                const std::vector<MemLocId> &modified) const;

  // Non-trivial constraints, for dumps: "lo <= x <= hi" and "x - y <= c"
  // style lines rendered with the given namer.
  std::vector<std::string> describe(const MemLocTable &t) const;

  friend bool operator==(const Octagon &a, const Octagon &b);

 private:
  int index_of(MemLocId id) const;
  int64_t &at(int i, int j) { return m_[(size_t)i * n2() + j]; }
  int64_t at(int i, int j) const { return m_[(size_t)i * n2() + j]; }
  int n2() const { return (int)vars_.size() * 2; }
  void set_entry(int i, int j, int64_t v);  // keeps coherence
  void forget(int k);                       // drop all constraints on var k
  void clamp_to_types();
  void ensure_closed_inplace();
  Interval bounds_by_index(int k) const;
  int64_t threshold(int i, int j) const;

  std::vector<VarInfo> vars_;  // sorted by MemLocId
  std::vector<int64_t> m_;
  bool bottom_ = false;
  bool closed_ = false;
};

}  // namespace mca
