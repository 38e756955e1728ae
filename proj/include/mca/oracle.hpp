#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mca/ast.hpp"
#include "mca/driver.hpp"
#include "mca/hardware.hpp"

namespace mca {

// ---------------------------------------------------------------------------
// Bounded concrete interpreter, independent of the analyzer's lowering.
//
// Full expressions compile into micro-instruction DAGs (loads, stores,
// arithmetic, call markers, sequence-point markers); a schedule is one
// topological order of that DAG, i.e. the orders a compiler may choose.
// Accesses wider than the platform's atomic width split into single-byte
// sub-instructions, so torn reads and writes are concretely observable.
// Execution explores every schedule, every interrupt placement (bounded
// fires per trace) and every declared input value, deduplicating visited
// configurations, and records each variable's values at every
// sequence-point boundary.
// ---------------------------------------------------------------------------

struct MicroInstr {
  enum Kind : uint8_t {
    ConstV,      // temp := imm
    LoadByte,    // temp := one byte of a location
    StoreByte,   // one byte of a location := byte of temp
    Compose,     // temp := args[0] | args[1]<<8 ... (little endian)
    Op,          // temp := expr-op(args)
    AddrOfV,     // temp := address of a global
    CallMarker,  // invoke callee / builtin; temp := return value
    SeqPoint,    // logic/comma barrier; may skip one side
  } kind = ConstV;

  int temp = -1;
  int64_t imm = 0;

  // location forms for LoadByte/StoreByte
  const VarDecl *var = nullptr;  // direct target (scalar or array)
  int index_temp = -1;           // array element index (element units)
  int ptr_temp = -1;             // indirect: temp holding an address
  int byte = 0;                  // which byte of the scalar
  bool is_volatile = false;
  bool is_input = false;    // reads fork over declared input values
  int src_temp = -1;        // StoreByte source temp

  const Expr *expr = nullptr;  // Op / CallMarker / SeqPoint origin
  std::vector<int> args;

  // SeqPoint: if short-circuit decides to skip, instructions whose
  // dag_index lies in [skip_begin, skip_end) are dead for this execution.
  int skip_begin = -1, skip_end = -1;
  bool skip_when_true = false;  // || skips its right side when left is true

  int dag_index = -1;  // position in the dependency DAG (creation order)
  SourceLoc loc;
};

struct Schedule {
  std::vector<MicroInstr> instrs;  // one topological order
  int result_temp = -1;
  int temp_count = 0;
};

// All compiler-permitted orders of one full expression, deduplicated and
// capped. Throws Diag("ScheduleExplosion") past the cap.
std::vector<Schedule> compile_schedules(const Expr &full_expr,
                                        const HardwareSpec &hw,
                                        size_t cap = 64);

struct OracleConfig {
  int isr_fires_max = 4;
  long max_configs = 2000000;  // explored-configuration budget
};

struct OracleResult {
  // Observed values per full expression completion point. Scalars map to
  // their value set; arrays map to the union of their cells' values.
  std::map<const Expr *, std::map<const VarDecl *, std::set<int64_t>>>
      at_seqpoint;
  long configs_explored = 0;
  long traces_completed = 0;
  long traps = 0;  // undefined behavior hit (array overrun, bad deref)

  std::set<int64_t> observed(const VarDecl *d) const {
    std::set<int64_t> out;
    for (auto &[e, m] : at_seqpoint) {
      auto it = m.find(d);
      if (it != m.end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
  }
};

// Exhaustive bounded exploration of a resolved program. Local variables
// start at zero; stores wrap modulo the type width (two's complement for
// signed types). Throws Diag("StateBudgetExceeded") past max_configs.
OracleResult enumerate_executions(const Program &prog, const HardwareSpec &hw,
                                  const OracleConfig &config = {});

struct ContainmentViolation {
  const Expr *at = nullptr;
  SourceLoc loc;
  std::string var;
  int64_t value = 0;
  Interval bounds;
  std::string detail;
};

struct ContainmentReport {
  long points_checked = 0;
  long values_checked = 0;
  std::vector<ContainmentViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Every concrete value the oracle observed at a sequence point must lie
// within the ranges the analysis derived there.
ContainmentReport check_containment(const OracleResult &oracle,
                                    const AnalysisSession &session);

// Requirement check for one-expression interrupt placements: states
// reachable with fires inside a full expression must already be reachable
// with fires at its boundary sequence points only.
struct Req1Finding {
  const Expr *expr = nullptr;
  SourceLoc loc;
  bool well_formed = false;
  bool holds = false;
  std::string witness;  // a state in A \ B, when !holds
};

std::vector<Req1Finding> check_requirement1(const Program &prog,
                                            const HardwareSpec &hw,
                                            const SharedInfo &info,
                                            const OracleConfig &config = {});

// Text dump for the oracle CLI: per sequence point, one line per variable.
std::string render_oracle_result(const OracleResult &result);

}  // namespace mca
