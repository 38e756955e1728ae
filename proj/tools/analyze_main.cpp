#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mca/driver.hpp"
#include "mca/printer.hpp"
#include "mca/wellformed.hpp"

using namespace mca;

namespace {

// "LINE" or "LINE:COL"
bool parse_loc(const std::string &s, int &line, int &col) {
  try {
    size_t colon = s.find(':');
    line = std::stoi(s.substr(0, colon));
    col = colon == std::string::npos ? -1 : std::stoi(s.substr(colon + 1));
    return line > 0;
  } catch (...) {
    return false;
  }
}

int run(int argc, char **argv) {
  CLI::App app{"value-range and interrupt-race analysis for Mini-C"};
  app.name("analyze");

  std::string file, hw_arg, format = "text";
  std::string dump_state_loc, explain_loc;
  bool dump_cfg = false, dump_access = false, dump_stats = false;
  DriverOptions opts;

  app.add_option("file", file, "Mini-C translation unit")->required();
  app.add_option("--hw", hw_arg,
                 "hardware description file, or 'none' for the "
                 "hardware-agnostic mode")
      ->required();
  app.add_option("--format", format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--dump-cfg", dump_cfg, "emit the CFGs as DOT and exit");
  app.add_option("--dump-state", dump_state_loc,
                 "print derived ranges at LINE[:COL] after analyzing");
  app.add_flag("--dump-access-sets", dump_access,
               "print per-function read/write sets after the prepass");
  app.add_option("--explain-wf", explain_loc,
                 "print the ordering-rule derivation for the full "
                 "expression at LINE[:COL]");
  app.add_option("--context-depth", opts.engine.context_depth,
                 "call-string length (default 1)");
  app.add_option("--widening-delay", opts.engine.widening_delay,
                 "joins before widening at loop heads (default 2)");
  app.add_option("--max-visits", opts.engine.max_visits,
                 "node-visit budget (default 100000)");
  app.add_flag("--dump-stats", dump_stats, "append analysis statistics");
  app.add_option("--isr", opts.isr_functions,
                 "treat this function as an interrupt handler "
                 "(hardware-agnostic runs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    HardwareSpec hw =
        hw_arg == "none" ? HardwareSpec::none() : load_hw_spec_file(hw_arg);
    AnalysisSession s = analyze_file(file, std::move(hw), opts);

    if (dump_cfg) {
      for (const FunctionDef *fn : s.prog.all_functions())
        std::cout << cfg_to_dot(s.cfgs.at(fn), s.table);
      return 0;
    }
    if (dump_access) {
      std::cout << dump_access_sets(s.prog, s.access, s.table);
    }
    if (!explain_loc.empty()) {
      int line, col;
      if (!parse_loc(explain_loc, line, col)) {
        std::cerr << "bad --explain-wf location\n";
        return 2;
      }
      bool found = false;
      for (auto &[fn, cfg] : s.cfgs) {
        for (const FullExpr &fe : cfg.full_exprs) {
          if (!fe.ast || fe.loc.line != line) continue;
          if (col > 0 && fe.loc.col != col) continue;
          std::cout << "full expression at " << fe.loc.str() << ":\n"
                    << explain_wf(*fe.ast, s.shared_info);
          found = true;
        }
      }
      if (!found) std::cout << "no full expression at " << explain_loc << "\n";
    }
    if (!dump_state_loc.empty()) {
      int line, col;
      if (!parse_loc(dump_state_loc, line, col)) {
        std::cerr << "bad --dump-state location\n";
        return 2;
      }
      bool found = false;
      for (auto &[fn, cfg] : s.cfgs) {
        for (auto &np : cfg.nodes) {
          if (np->loc.line != line) continue;
          if (col > 0 && np->loc.col != col) continue;
          auto post = s.result.post_joined(fn, np->id);
          if (!post) continue;
          found = true;
          std::cout << "state after " << np->loc.str() << " (" << fn->name
                    << ", node " << np->id << "):\n";
          for (const std::string &l : post->oct.describe(s.table))
            std::cout << "  " << l << "\n";
        }
      }
      if (!found) std::cout << "no analyzed node at " << dump_state_loc << "\n";
    }

    ReportFormat fmt =
        format == "json" ? ReportFormat::Json : ReportFormat::Text;
    std::cout << render_report(s.report, fmt, file, s.table, dump_stats);
    return s.report.exit_code();
  } catch (const Diag &d) {
    std::cerr << "analyze: " << file << ": " << d.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char **argv) { return run(argc, argv); }
