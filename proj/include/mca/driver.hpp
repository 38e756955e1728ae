#pragma once

#include <map>
#include <string>
#include <vector>

#include "mca/engine.hpp"
#include "mca/report.hpp"

namespace mca {

struct DriverOptions {
  std::vector<std::string> isr_functions;  // functions to treat as handlers
  EngineConfig engine;
};

// Everything one analysis run produces, kept alive together because the
// CFGs and results point into the Program.
struct AnalysisSession {
  Program prog;
  HardwareSpec hw;
  MemLocTable table;
  std::map<const FunctionDef *, Cfg> cfgs;
  PointsTo pts;
  AccessSets access;
  SharedSet shared;
  SharedInfo shared_info;
  AnalysisResult result;
  Report report;
};

// parse -> resolve -> prepasses -> isr scheduling -> fixed point -> bounds
// check. Throws Diag on malformed input.
AnalysisSession analyze_source(const std::string &source, HardwareSpec hw,
                               const DriverOptions &opts = {});

AnalysisSession analyze_file(const std::string &path, HardwareSpec hw,
                             const DriverOptions &opts = {});

std::string read_file(const std::string &path);

}  // namespace mca
