#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mca/ast.hpp"
#include "mca/hardware.hpp"
#include "mca/interval.hpp"

namespace mca {

using MemLocId = int32_t;
inline constexpr MemLocId kNoMemLoc = -1;

enum class MemLocKind : uint8_t {
  Global,
  Local,         // includes params
  ArraySummary,  // one location per array, weak updates
  Register,      // absolute address with hardware semantics
  Temp,          // lowering-introduced scratch
};

struct MemLoc {
  MemLocKind kind;
  std::string name;  // display name; locals/temps prefixed with function
  const VarDecl *decl = nullptr;        // null for temps
  const FunctionDef *owner = nullptr;   // locals/temps
  Base base = Base::U8;
  bool is_pointer = false;
  RegClass reg_class = RegClass::PlainMemory;
  Interval input_range{0, 255};  // Register+Input only
  int64_t array_len = 0;         // ArraySummary only

  bool numeric() const {
    return !is_pointer && kind != MemLocKind::Register;
  }
  Interval type_range() const {
    return {type_min(base), type_max(base)};
  }
};

// Interner for memory locations; one table per analysis session. Ids are
// dense and allocation order is deterministic (declaration uid order for
// program variables, creation order for temps).
class MemLocTable {
 public:
  MemLocId of_decl(const VarDecl *d, const HardwareSpec &hw) {
    auto it = by_decl_.find(d);
    if (it != by_decl_.end()) return it->second;
    MemLoc m;
    m.decl = d;
    m.base = d->ctype.base;
    m.is_pointer = d->ctype.is_pointer;
    if (d->storage == Storage::Global) {
      m.name = d->name;
      m.kind = MemLocKind::Global;
      if (d->ctype.is_array) {
        m.kind = MemLocKind::ArraySummary;
        m.name = d->name + "[]";
        m.array_len = d->ctype.array_len;
      } else if (d->absolute_address) {
        RegisterSemantics rs = classify_access(*d, hw);
        if (rs.cls != RegClass::PlainMemory) {
          m.kind = MemLocKind::Register;
          m.reg_class = rs.cls;
          if (rs.cls == RegClass::Input) m.input_range = {rs.min, rs.max};
        }
      }
    } else {
      m.owner = d->owner;
      m.kind = MemLocKind::Local;
      m.name = (d->owner ? d->owner->name : "?") + "::" + d->name;
      if (d->ctype.is_array) {
        m.kind = MemLocKind::ArraySummary;
        m.name += "[]";
        m.array_len = d->ctype.array_len;
      }
    }
    MemLocId id = (MemLocId)locs_.size();
    locs_.push_back(std::move(m));
    by_decl_[d] = id;
    return id;
  }

  MemLocId make_temp(const FunctionDef *fn, Base base, int index) {
    MemLoc m;
    m.kind = MemLocKind::Temp;
    m.owner = fn;
    m.base = base;
    m.name = (fn ? fn->name : "?") + "::t" + std::to_string(index);
    MemLocId id = (MemLocId)locs_.size();
    locs_.push_back(std::move(m));
    return id;
  }

  MemLocId make_return_slot(const FunctionDef *fn, Base base) {
    MemLoc m;
    m.kind = MemLocKind::Temp;
    m.owner = fn;
    m.base = base;
    m.name = (fn ? fn->name : "?") + "::<ret>";
    MemLocId id = (MemLocId)locs_.size();
    locs_.push_back(std::move(m));
    return id;
  }

  const MemLoc &info(MemLocId id) const {
    assert(id >= 0 && (size_t)id < locs_.size());
    return locs_[id];
  }
  const std::string &name(MemLocId id) const { return info(id).name; }
  size_t size() const { return locs_.size(); }

  MemLocId lookup_decl(const VarDecl *d) const {
    auto it = by_decl_.find(d);
    return it == by_decl_.end() ? kNoMemLoc : it->second;
  }

 private:
  std::vector<MemLoc> locs_;
  std::map<const VarDecl *, MemLocId> by_decl_;
};

}  // namespace mca
