#pragma once

#include <string>

#include "mca/driver.hpp"

namespace mca::test {

inline std::string corpus_path(const std::string &name) {
  return std::string(MCA_CORPUS_DIR) + "/" + name;
}

inline HardwareSpec tick_hw() {
  return load_hw_spec_file(corpus_path("oracle/tick.hw"));
}

// Minimal spec: one source TICK at 0x30 bit 0, global enable 0x5F.7,
// initially off; atomic width 8.
inline HardwareSpec mini_hw(bool initial_on = false) {
  std::string text =
      "[global]\n"
      "atomic_bits = 8\n"
      "reg = 0x5F\n"
      "bit = 7\n";
  text += std::string("initial = ") + (initial_on ? "on" : "off") + "\n";
  text +=
      "[source TICK]\n"
      "reg = 0x30\n"
      "bit = 0\n"
      "vector = TICK_vect\n";
  return parse_hw_spec(text);
}

inline AnalysisSession analyze_str(const std::string &src, HardwareSpec hw,
                                   const DriverOptions &opts = {}) {
  return analyze_source(src, std::move(hw), opts);
}

}  // namespace mca::test
