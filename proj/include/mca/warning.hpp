#pragma once

#include <string>
#include <vector>

#include "mca/memloc.hpp"
#include "mca/source.hpp"

namespace mca {

enum class WarnKind : uint8_t {
  NonVolatileShared,
  DataLoss,
  UnspecifiedOrder,
  NonAtomicAccess,
  ArrayOutOfBounds,
};

inline const char *warn_kind_str(WarnKind k) {
  switch (k) {
    case WarnKind::NonVolatileShared: return "NonVolatileShared";
    case WarnKind::DataLoss: return "DataLoss";
    case WarnKind::UnspecifiedOrder: return "UnspecifiedOrder";
    case WarnKind::NonAtomicAccess: return "NonAtomicAccess";
    case WarnKind::ArrayOutOfBounds: return "ArrayOutOfBounds";
  }
  return "?";
}

enum class Severity : uint8_t { Warning, Error };

struct Warning {
  WarnKind kind;
  SourceLoc loc;
  std::string message;
  std::vector<MemLocId> memlocs;
  Severity severity = Severity::Warning;
};

}  // namespace mca
