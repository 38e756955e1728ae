#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mca/ast.hpp"
#include "mca/ctype.hpp"
#include "mca/source.hpp"

namespace mca {

// Three-valued interrupt-enable flag.
enum class Tri : uint8_t { Off, On, Unknown };

inline Tri tri_join(Tri a, Tri b) { return a == b ? a : Tri::Unknown; }
inline bool tri_leq(Tri a, Tri b) { return a == b || b == Tri::Unknown; }
inline const char *tri_str(Tri t) {
  return t == Tri::Off ? "off" : t == Tri::On ? "on" : "unknown";
}

struct InterruptSource {
  std::string name;
  int64_t enable_reg = 0;
  int enable_bit = 0;
  std::string vector;  // ISR vector handling this source
};

struct InputRegister {
  std::string name;
  int64_t address = 0;
  int64_t min = 0;
  int64_t max = 255;
  std::vector<int64_t> test_values;  // bounded-interpreter sample set
};

// Declarative description of the platform: which absolute addresses carry
// interrupt-enable bits, which are external inputs, and how wide an access
// the bus performs atomically.
struct HardwareSpec {
  bool agnostic = false;  // --hw none: no register semantics, nothing atomic
  int atomic_bits = 8;
  int64_t global_enable_reg = 0;
  int global_enable_bit = 7;
  bool global_enable_initial = false;
  std::vector<InterruptSource> sources;
  std::vector<InputRegister> inputs;
  std::vector<std::string> atomic_functions;

  static HardwareSpec none() {
    HardwareSpec hw;
    hw.agnostic = true;
    hw.atomic_bits = 0;
    return hw;
  }

  int source_index(const std::string &name) const {
    for (size_t i = 0; i < sources.size(); ++i)
      if (sources[i].name == name) return (int)i;
    return -1;
  }
  int source_for_vector(const std::string &vec) const {
    for (size_t i = 0; i < sources.size(); ++i)
      if (sources[i].vector == vec) return (int)i;
    return -1;
  }
  bool is_atomic_function(const std::string &fn) const {
    for (auto &a : atomic_functions)
      if (a == fn) return true;
    return false;
  }
};

enum class RegClass : uint8_t {
  PlainMemory,
  GlobalEnable,
  SourceEnable,
  Input,
};

struct RegisterSemantics {
  RegClass cls = RegClass::PlainMemory;
  int source = -1;           // SourceEnable
  int64_t min = 0, max = 0;  // Input
};

// Abstract enable-bit status carried along the CFG.
struct InterruptState {
  Tri global = Tri::Off;
  std::vector<Tri> sources;  // indexed like HardwareSpec::sources

  static InterruptState initial(const HardwareSpec &hw) {
    InterruptState s;
    if (hw.agnostic) {
      s.global = Tri::Unknown;
      s.sources.assign(hw.sources.size(), Tri::Unknown);
      return s;
    }
    s.global = hw.global_enable_initial ? Tri::On : Tri::Off;
    s.sources.assign(hw.sources.size(), Tri::Off);
    return s;
  }

  bool can_fire(int source) const {
    return global != Tri::Off && sources[source] != Tri::Off;
  }
  bool any_can_fire() const {
    if (global == Tri::Off) return false;
    for (Tri t : sources)
      if (t != Tri::Off) return true;
    return false;
  }

  friend bool operator==(const InterruptState &, const InterruptState &) =
      default;
};

InterruptState ints_join(const InterruptState &a, const InterruptState &b);
bool ints_leq(const InterruptState &a, const InterruptState &b);

// What a store does to enable bits. `value` per affected bit.
struct EnableEffect {
  bool touches_global = false;
  Tri global = Tri::Unknown;
  std::vector<std::pair<int, Tri>> sources;  // (source index, new flag)
  bool empty() const { return !touches_global && sources.empty(); }
};

// Shape of a store's right-hand side as far as enable-bit tracking cares.
struct StoreValue {
  enum Kind { Const, OrConst, AndConst, Opaque } kind = Opaque;
  int64_t value = 0;  // the constant / mask
};

// Hardware spec text: line-based `key = value` under [global],
// [source <name>], [input <name>] and [atomic_fn <name>] sections;
// addresses in hex or decimal. Throws Diag("SpecError") on duplicate
// addresses, unknown keys or a missing [global] section.
HardwareSpec parse_hw_spec(const std::string &text);
HardwareSpec load_hw_spec_file(const std::string &path);

// Register semantics of a declaration (or raw address) under a spec.
// Unmapped addresses and ordinary globals are plain memory.
RegisterSemantics classify_access(const VarDecl &decl, const HardwareSpec &hw);
RegisterSemantics classify_address(int64_t address, const HardwareSpec &hw);

// True iff a scalar of this type is read/written in one uninterruptible
// access on this platform.
bool is_atomic_access(const CType &t, const HardwareSpec &hw);

// Effect of writing `value` to `address` on the enable bits.
// sei()/cli() are handled by the caller (global := On/Off).
EnableEffect enable_effect_of_store(int64_t address, const StoreValue &value,
                                    const HardwareSpec &hw);

// Applies an effect to the abstract state.
InterruptState interrupt_transfer(const InterruptState &in,
                                  const EnableEffect &eff);

// Cross-check program ISRs against the spec (every ISR needs exactly one
// source; rejects ISR bodies writing the global enable register).
void check_program_against_hw(const Program &prog, const HardwareSpec &hw);

}  // namespace mca
