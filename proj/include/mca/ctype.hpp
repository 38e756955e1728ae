#pragma once

#include <cassert>
#include <cstdint>
#include <string>

namespace mca {

// Scalar base types of Mini-C. Pointers and arrays are carried as
// separate shape info in CType.
enum class Base : uint8_t { U8, I8, U16, I16, Void };

struct CType {
  Base base = Base::Void;
  bool is_pointer = false;  // pointer to `base`
  bool is_array = false;    // array of `base`, length `array_len`
  int64_t array_len = 0;

  static CType scalar(Base b) { return CType{b, false, false, 0}; }
  static CType pointer(Base b) { return CType{b, true, false, 0}; }
  static CType array(Base b, int64_t n) { return CType{b, false, true, n}; }
  static CType void_type() { return CType{}; }

  bool is_scalar() const {
    return !is_pointer && !is_array && base != Base::Void;
  }
  bool is_void() const {
    return base == Base::Void && !is_pointer && !is_array;
  }
  friend bool operator==(const CType &, const CType &) = default;
};

inline int bit_width(Base b) {
  switch (b) {
    case Base::U8:
    case Base::I8:
      return 8;
    case Base::U16:
    case Base::I16:
      return 16;
    default:
      return 0;
  }
}

inline bool is_signed(Base b) { return b == Base::I8 || b == Base::I16; }

inline int64_t type_min(Base b) {
  switch (b) {
    case Base::U8:
    case Base::U16:
      return 0;
    case Base::I8:
      return -128;
    case Base::I16:
      return -32768;
    default:
      return 0;
  }
}

inline int64_t type_max(Base b) {
  switch (b) {
    case Base::U8:
      return 255;
    case Base::U16:
      return 65535;
    case Base::I8:
      return 127;
    case Base::I16:
      return 32767;
    default:
      return 0;
  }
}

// Mixed-width operands promote to the wider type; equal widths prefer
// the unsigned flavor. There is no implicit promotion to a 32-bit int.
inline Base promote(Base a, Base b) {
  int wa = bit_width(a), wb = bit_width(b);
  if (wa != wb) return wa > wb ? a : b;
  if (!is_signed(a)) return a;
  return b;
}

inline std::string type_name(const CType &t) {
  std::string n;
  switch (t.base) {
    case Base::U8: n = "uint8"; break;
    case Base::I8: n = "int8"; break;
    case Base::U16: n = "uint16"; break;
    case Base::I16: n = "int16"; break;
    case Base::Void: n = "void"; break;
  }
  if (t.is_pointer) n += "*";
  if (t.is_array) n += "[" + std::to_string(t.array_len) + "]";
  return n;
}

}  // namespace mca
