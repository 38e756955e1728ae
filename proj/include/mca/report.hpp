#pragma once

#include <string>
#include <vector>

#include "mca/engine.hpp"
#include "mca/warning.hpp"

namespace mca {

// One array access with the index range the analysis derived for it.
struct BoundsVerdict {
  SourceLoc loc;
  MemLocId array = kNoMemLoc;
  Interval index;
  int64_t length = 0;
  bool safe = false;
  bool reached = true;
};

// For every array-index node, compares the derived index interval against
// [0, length-1]. Unreached accesses are reported as safe-by-unreachability.
std::vector<BoundsVerdict> check_array_bounds(
    const AnalysisResult &result,
    const std::map<const FunctionDef *, Cfg> &cfgs, const MemLocTable &table,
    const HardwareSpec &hw, const PointsTo &pts);

struct Report {
  std::vector<Warning> warnings;  // analysis warnings + bounds errors, sorted
  std::vector<BoundsVerdict> array_checks;
  AnalysisStats stats;

  int exit_code() const { return warnings.empty() ? 0 : 1; }
  size_t shared_warning_count() const {
    size_t n = 0;
    for (auto &w : warnings)
      if (w.kind != WarnKind::ArrayOutOfBounds) ++n;
    return n;
  }
};

Report build_report(const AnalysisResult &result,
                    std::vector<BoundsVerdict> bounds,
                    const MemLocTable &table);

enum class ReportFormat { Text, Json };

// text: one `file:line:col: KIND: message` line per finding plus a summary
// line; json: stable schema with deterministic key order.
std::string render_report(const Report &report, ReportFormat fmt,
                          const std::string &file, const MemLocTable &table,
                          bool with_stats);

}  // namespace mca
