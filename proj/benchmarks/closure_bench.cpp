// Compares the serial reference closure against the OpenMP kernel on
// random octagonal systems of growing size.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "mca/octagon.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mca;
using dbm::kInf;

namespace {

std::vector<int64_t> random_dbm(std::mt19937 &rng, int n) {
  int n2 = 2 * n;
  std::vector<int64_t> m((size_t)n2 * n2, kInf);
  std::uniform_int_distribution<int> coin(0, 7);
  std::uniform_int_distribution<int> val(-64, 256);
  for (int i = 0; i < n2; ++i) m[(size_t)i * n2 + i] = 0;
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) {
      if (i == j || coin(rng)) continue;
      int64_t v = val(rng);
      size_t a = (size_t)i * n2 + j, b = (size_t)(j ^ 1) * n2 + (i ^ 1);
      m[a] = std::min(m[a], v);
      m[b] = m[a];
    }
  return m;
}

double run(bool parallel, int n, int reps, std::uint64_t &sink) {
  std::mt19937 rng(42);
  double total = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<int64_t> m = random_dbm(rng, n);
    auto t0 = std::chrono::steady_clock::now();
    bool ok = parallel ? dbm::tight_close_parallel(m, 2 * n)
                       : dbm::tight_close_serial(m, 2 * n);
    auto t1 = std::chrono::steady_clock::now();
    total += std::chrono::duration<double, std::milli>(t1 - t0).count();
    sink += ok ? (std::uint64_t)m[1] : 1;
  }
  return total / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP: %d threads\n", omp_get_max_threads());
#else
  std::printf("OpenMP: unavailable (serial twice)\n");
#endif
  std::printf("%8s %6s %14s %14s %9s\n", "vars", "reps", "serial ms",
              "parallel ms", "speedup");
  std::uint64_t sink = 0;
  for (int n : {16, 32, 64, 128, 256, 512}) {
    int reps = n >= 256 ? 3 : 10;
    double s = run(false, n, reps, sink);
    double p = run(true, n, reps, sink);
    std::printf("%8d %6d %14.3f %14.3f %8.2fx\n", n, reps, s, p, s / p);
  }
  std::printf("(checksum %llu)\n", (unsigned long long)sink);
  return 0;
}
