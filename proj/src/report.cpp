#include "mca/report.hpp"

#include <algorithm>

#include <json.hpp>

namespace mca {

namespace {

void collect_index_loads(const RExpr &e, std::vector<const RExpr *> &out) {
  if (e.kind == RExpr::Load && e.index) out.push_back(&e);
  if (e.index) collect_index_loads(*e.index, out);
  if (e.a) collect_index_loads(*e.a, out);
  if (e.b) collect_index_loads(*e.b, out);
}

}  // namespace

std::vector<BoundsVerdict> check_array_bounds(
    const AnalysisResult &result,
    const std::map<const FunctionDef *, Cfg> &cfgs, const MemLocTable &table,
    const HardwareSpec &hw, const PointsTo &pts) {
  std::vector<BoundsVerdict> out;
  for (const auto &[fn, cfg] : cfgs) {
    for (const auto &np : cfg.nodes) {
      const CfgNode &n = *np;
      // gather (array, index) pairs of this node
      std::vector<std::pair<MemLocId, const RExpr *>> accesses;
      std::vector<const RExpr *> loads;
      if (n.rhs) collect_index_loads(*n.rhs, loads);
      for (auto &a : n.args) collect_index_loads(*a, loads);
      for (const RExpr *l : loads) accesses.push_back({l->id, l->index.get()});
      if (n.kind == NodeKind::Assign && n.lhs.kind == LValue::ArrayElem) {
        collect_index_loads(*n.lhs.index, loads);
        accesses.push_back({n.lhs.id, n.lhs.index.get()});
      }
      if (accesses.empty()) continue;

      auto pre = result.pre_joined(fn, n.id);
      for (auto &[arr, idx] : accesses) {
        BoundsVerdict v;
        v.loc = idx->loc.valid() ? idx->loc : n.loc;
        v.array = arr;
        v.length = table.info(arr).array_len;
        if (!pre || pre->is_bottom()) {
          v.reached = false;
          v.safe = true;
          v.index = Interval::empty();
        } else {
          v.index = eval_rexpr_interval(*idx, pre->oct.closed(), table, hw,
                                        pts);
          v.safe = !v.index.is_empty() && v.index.lo >= 0 &&
                   v.index.hi <= v.length - 1;
        }
        out.push_back(v);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BoundsVerdict &a, const BoundsVerdict &b) {
                     if (a.loc.line != b.loc.line) return a.loc.line < b.loc.line;
                     return a.loc.col < b.loc.col;
                   });
  return out;
}

Report build_report(const AnalysisResult &result,
                    std::vector<BoundsVerdict> bounds,
                    const MemLocTable &table) {
  Report rep;
  rep.stats = result.stats;
  rep.warnings = result.warnings;
  std::set<std::pair<int, int>> seen;
  for (const BoundsVerdict &v : bounds) {
    if (!v.safe) {
      if (seen.insert({v.loc.line, v.loc.col}).second) {
        Warning w;
        w.kind = WarnKind::ArrayOutOfBounds;
        w.loc = v.loc;
        w.severity = Severity::Error;
        w.memlocs = {v.array};
        std::string name = table.name(v.array);
        w.message = "index into '" + name.substr(0, name.size() - 2) +
                    "' may take values " + v.index.str() +
                    " but the array has bounds [0, " +
                    std::to_string(v.length - 1) + "]";
        rep.warnings.push_back(std::move(w));
      }
    }
  }
  rep.array_checks = std::move(bounds);
  std::stable_sort(rep.warnings.begin(), rep.warnings.end(),
                   [](const Warning &a, const Warning &b) {
                     if (a.loc.line != b.loc.line) return a.loc.line < b.loc.line;
                     if (a.loc.col != b.loc.col) return a.loc.col < b.loc.col;
                     return (int)a.kind < (int)b.kind;
                   });
  return rep;
}

std::string render_report(const Report &report, ReportFormat fmt,
                          const std::string &file, const MemLocTable &table,
                          bool with_stats) {
  if (fmt == ReportFormat::Text) {
    std::string out;
    for (const Warning &w : report.warnings) {
      out += file + ":" + w.loc.str() + ": " + warn_kind_str(w.kind) + ": " +
             w.message + "\n";
    }
    size_t unsafe = 0;
    for (auto &v : report.array_checks)
      if (!v.safe) ++unsafe;
    out += std::to_string(report.warnings.size()) + " warning" +
           (report.warnings.size() == 1 ? "" : "s") + ", " +
           std::to_string(report.array_checks.size()) + " array access" +
           (report.array_checks.size() == 1 ? "" : "es") + " checked (" +
           std::to_string(unsafe) + " possibly out of bounds)\n";
    if (with_stats) {
      out += "stats: isr_analyses=" + std::to_string(report.stats.isr_analyses) +
             " isr_fixpoint_sites=" +
             std::to_string(report.stats.isr_fixpoint_sites) +
             " fn_analyses=" + std::to_string(report.stats.fn_analyses) +
             " node_visits=" + std::to_string(report.stats.node_visits) +
             " wall_ms=" + std::to_string(report.stats.wall_ms) + "\n";
    }
    return out;
  }

  nlohmann::ordered_json j;
  j["file"] = file;
  j["warnings"] = nlohmann::ordered_json::array();
  for (const Warning &w : report.warnings) {
    nlohmann::ordered_json jw;
    jw["kind"] = warn_kind_str(w.kind);
    jw["loc"] = {{"line", w.loc.line}, {"col", w.loc.col}};
    jw["message"] = w.message;
    jw["memlocs"] = nlohmann::ordered_json::array();
    for (MemLocId id : w.memlocs) jw["memlocs"].push_back(table.name(id));
    jw["severity"] = w.severity == Severity::Error ? "error" : "warning";
    j["warnings"].push_back(std::move(jw));
  }
  j["array_checks"] = nlohmann::ordered_json::array();
  for (const BoundsVerdict &v : report.array_checks) {
    nlohmann::ordered_json jv;
    jv["loc"] = {{"line", v.loc.line}, {"col", v.loc.col}};
    jv["array"] = table.name(v.array);
    jv["verdict"] = v.safe ? "safe" : "possibly-out-of-bounds";
    if (v.reached && !v.index.is_empty()) {
      jv["index_min"] = v.index.lo;
      jv["index_max"] = v.index.hi;
    }
    jv["length"] = v.length;
    j["array_checks"].push_back(std::move(jv));
  }
  j["stats"] = {{"isr_analyses", report.stats.isr_analyses},
                {"isr_fixpoint_sites", report.stats.isr_fixpoint_sites},
                {"fn_analyses", report.stats.fn_analyses},
                {"node_visits", report.stats.node_visits},
                {"wall_ms", report.stats.wall_ms}};
  j["exit_code"] = report.exit_code();
  return j.dump(2) + "\n";
}

}  // namespace mca
