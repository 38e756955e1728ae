#include "mca/driver.hpp"

#include <fstream>
#include <sstream>

#include "mca/parser.hpp"
#include "mca/resolve.hpp"

namespace mca {

std::string read_file(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw Diag("IoError", SourceLoc{}, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

AnalysisSession analyze_source(const std::string &source, HardwareSpec hw,
                               const DriverOptions &opts) {
  AnalysisSession s;
  s.hw = std::move(hw);
  s.prog = parse_source(source);

  // functions promoted to interrupt handlers by name (hardware-agnostic
  // runs, where the memory model cannot discover the vectors)
  for (const std::string &name : opts.isr_functions) {
    bool found = false;
    for (auto it = s.prog.functions.begin(); it != s.prog.functions.end();
         ++it) {
      if ((*it)->name == name) {
        (*it)->is_isr = true;
        s.prog.isrs.push_back(std::move(*it));
        s.prog.functions.erase(it);
        found = true;
        break;
      }
    }
    if (!found)
      throw Diag("UndeclaredIdentifier", SourceLoc{},
                 "--isr " + name + ": no such function");
  }

  resolve_symbols(s.prog);
  check_entry(s.prog);
  check_program_against_hw(s.prog, s.hw);

  s.cfgs = lower_program(s.prog, s.table, s.hw);
  s.pts = compute_points_to(s.prog, s.cfgs, s.table, s.hw);
  s.access = compute_access_sets(s.prog, s.cfgs, s.pts, s.table);
  s.shared = compute_shared_set(s.prog, s.cfgs, s.access, s.table);
  s.shared_info = build_shared_info(s.prog, s.cfgs, s.access, s.shared, s.pts,
                                    s.table);
  annotate_wellformedness(s.cfgs, s.shared_info);

  const FunctionDef *entry = s.prog.entry_function();
  for (auto &[fn, cfg] : s.cfgs) {
    if (!s.shared.main_side.count(fn)) continue;  // handlers cannot nest
    if (s.hw.is_atomic_function(fn->name)) continue;
    schedule_isr_nodes(cfg, s.shared, s.hw, s.access, s.table, fn == entry);
  }

  s.result = analyze_program(s.prog, s.cfgs, s.hw, s.access, s.shared, s.pts,
                             s.table, opts.engine);
  auto bounds = check_array_bounds(s.result, s.cfgs, s.table, s.hw, s.pts);
  s.report = build_report(s.result, std::move(bounds), s.table);
  return s;
}

AnalysisSession analyze_file(const std::string &path, HardwareSpec hw,
                             const DriverOptions &opts) {
  return analyze_source(read_file(path), std::move(hw), opts);
}

}  // namespace mca
