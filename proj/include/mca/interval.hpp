#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

namespace mca {

// Closed integer interval [lo, hi]; empty iff lo > hi. Bounds stay well
// inside int64, callers clamp to type ranges.
struct Interval {
  int64_t lo = 0;
  int64_t hi = -1;

  static Interval make(int64_t lo, int64_t hi) { return {lo, hi}; }
  static Interval point(int64_t v) { return {v, v}; }
  static Interval empty() { return {0, -1}; }

  bool is_empty() const { return lo > hi; }
  bool contains(int64_t v) const { return v >= lo && v <= hi; }
  bool contains(const Interval &o) const {
    return o.is_empty() || (lo <= o.lo && o.hi <= hi);
  }
  bool is_point() const { return lo == hi; }

  Interval join(const Interval &o) const {
    if (is_empty()) return o;
    if (o.is_empty()) return *this;
    return {std::min(lo, o.lo), std::max(hi, o.hi)};
  }
  Interval meet(const Interval &o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }

  std::string str() const {
    if (is_empty()) return "[]";
    return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }
  friend bool operator==(const Interval &, const Interval &) = default;
};

}  // namespace mca
