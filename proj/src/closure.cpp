#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "mca/octagon.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mca {
namespace dbm {

namespace {

Mode g_mode = Mode::Auto;
bool g_mode_read = false;

// Under Auto, matrices below this vertex count stay serial: the analyzer's
// localized octagons are far below the crossover, and the barrier per
// pivot step only pays off on big systems (measure with closure_bench).
constexpr int kParallelThreshold = 384;

// One Floyd-Warshall pivot step against a snapshot of row/col k, then the
// integer tightening + strengthening passes. Snapshotting makes the pivot
// loop order-free, so the serial and parallel kernels produce identical
// matrices even on infeasible systems.
struct Scratch {
  std::vector<int64_t> row, col;
};

inline void pivot_serial(std::vector<int64_t> &m, int n2, int k,
                         Scratch &s) {
  s.row.assign(m.begin() + (size_t)k * n2, m.begin() + (size_t)(k + 1) * n2);
  s.col.resize(n2);
  for (int i = 0; i < n2; ++i) s.col[i] = m[(size_t)i * n2 + k];
  for (int i = 0; i < n2; ++i) {
    int64_t mik = s.col[i];
    if (mik >= kInf) continue;
    int64_t *mi = &m[(size_t)i * n2];
    for (int j = 0; j < n2; ++j) {
      int64_t v = add(mik, s.row[j]);
      if (v < mi[j]) mi[j] = v;
    }
  }
}

#ifdef _OPENMP
// One parallel region for the whole pivot sweep; threads share each k
// step with a snapshot taken once per step.
inline void fw_sweep_parallel(std::vector<int64_t> &m, int n2, Scratch &s) {
  s.row.resize(n2);
  s.col.resize(n2);
#pragma omp parallel
  for (int k = 0; k < n2; ++k) {
#pragma omp single
    {
      std::copy(m.begin() + (size_t)k * n2, m.begin() + (size_t)(k + 1) * n2,
                s.row.begin());
      for (int i = 0; i < n2; ++i) s.col[i] = m[(size_t)i * n2 + k];
    }  // implicit barrier
#pragma omp for schedule(static)
    for (int i = 0; i < n2; ++i) {
      int64_t mik = s.col[i];
      if (mik >= kInf) continue;
      int64_t *mi = &m[(size_t)i * n2];
      for (int j = 0; j < n2; ++j) {
        int64_t v = add(mik, s.row[j]);
        if (v < mi[j]) mi[j] = v;
      }
    }  // implicit barrier keeps step k+1 honest
  }
}
#endif

// Returns false on a negative cycle. `changed` reports whether the
// tighten/strengthen passes found anything new (another round needed).
template <bool Parallel>
bool close_rounds(std::vector<int64_t> &m, int n2) {
  Scratch s;
  for (int round = 0;; ++round) {
#ifdef _OPENMP
    if constexpr (Parallel) {
      fw_sweep_parallel(m, n2, s);
    } else {
      for (int k = 0; k < n2; ++k) pivot_serial(m, n2, k, s);
    }
#else
    for (int k = 0; k < n2; ++k) pivot_serial(m, n2, k, s);
#endif
    for (int i = 0; i < n2; ++i) {
      if (m[(size_t)i * n2 + i] < 0) return false;
      m[(size_t)i * n2 + i] = 0;
    }
    // Integer tightening of the unary bounds.
    for (int i = 0; i < n2; ++i) {
      int64_t &u = m[(size_t)i * n2 + (i ^ 1)];
      if (u < kInf) u = 2 * floor_div2(u);
    }
    for (int i = 0; i < n2; ++i) {
      int64_t a = m[(size_t)i * n2 + (i ^ 1)];
      int64_t b = m[(size_t)(i ^ 1) * n2 + i];
      if (a < kInf && b < kInf && a + b < 0) return false;
    }
    // Strengthen binary bounds through the unary ones.
    bool changed = false;
    for (int i = 0; i < n2; ++i) {
      int64_t half_i = m[(size_t)i * n2 + (i ^ 1)];
      if (half_i < kInf) half_i = floor_div2(half_i);
      int64_t *mi = &m[(size_t)i * n2];
      for (int j = 0; j < n2; ++j) {
        if (i == j) continue;
        int64_t half_j = m[(size_t)(j ^ 1) * n2 + j];
        if (half_i >= kInf || half_j >= kInf) continue;
        int64_t v = half_i + floor_div2(half_j);
        if (v < mi[j]) {
          mi[j] = v;
          changed = true;
        }
      }
    }
    if (!changed) return true;
    // Strengthening can seed new shortest paths; go again. Every pass
    // preserves the integer solution set exactly, so stopping at the cap
    // is sound (just possibly non-canonical); in practice two rounds
    // settle everything.
    if (round >= 16) return true;
  }
}

}  // namespace

void set_closure_mode(Mode m) {
  g_mode = m;
  g_mode_read = true;
}

Mode closure_mode() {
  if (!g_mode_read) {
    g_mode_read = true;
    if (const char *env = std::getenv("MCA_CLOSURE")) {
      if (std::strcmp(env, "serial") == 0) g_mode = Mode::Serial;
      else if (std::strcmp(env, "parallel") == 0) g_mode = Mode::Parallel;
    }
  }
  return g_mode;
}

bool tight_close_serial(std::vector<int64_t> &m, int n2) {
  return close_rounds<false>(m, n2);
}

bool tight_close_parallel(std::vector<int64_t> &m, int n2) {
#ifdef _OPENMP
  return close_rounds<true>(m, n2);
#else
  return close_rounds<false>(m, n2);
#endif
}

bool tight_close(std::vector<int64_t> &m, int n2) {
  switch (closure_mode()) {
    case Mode::Serial:
      return tight_close_serial(m, n2);
    case Mode::Parallel:
      return tight_close_parallel(m, n2);
    case Mode::Auto:
    default:
      if (n2 >= kParallelThreshold) return tight_close_parallel(m, n2);
      return tight_close_serial(m, n2);
  }
}

}  // namespace dbm
}  // namespace mca
