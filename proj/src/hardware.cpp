#include "mca/hardware.hpp"

#include <cassert>
#include <fstream>
#include <set>
#include <sstream>

namespace mca {

InterruptState ints_join(const InterruptState &a, const InterruptState &b) {
  assert(a.sources.size() == b.sources.size());
  InterruptState out;
  out.global = tri_join(a.global, b.global);
  out.sources.resize(a.sources.size());
  for (size_t i = 0; i < a.sources.size(); ++i)
    out.sources[i] = tri_join(a.sources[i], b.sources[i]);
  return out;
}

bool ints_leq(const InterruptState &a, const InterruptState &b) {
  assert(a.sources.size() == b.sources.size());
  if (!tri_leq(a.global, b.global)) return false;
  for (size_t i = 0; i < a.sources.size(); ++i)
    if (!tri_leq(a.sources[i], b.sources[i])) return false;
  return true;
}

namespace {

struct Line {
  std::string key, value;
};

std::string trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int64_t parse_int_value(const std::string &v, const std::string &what) {
  try {
    size_t used = 0;
    int64_t x = std::stoll(v, &used, 0);  // base 0: 0x.. hex, else decimal
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception &) {
    throw spec_error("bad integer for " + what + ": '" + v + "'");
  }
}

}  // namespace

HardwareSpec parse_hw_spec(const std::string &text) {
  HardwareSpec hw;
  hw.global_enable_reg = -1;

  enum class Sec { None, Global, Source, Input, AtomicFn };
  Sec sec = Sec::None;
  InterruptSource *cur_src = nullptr;
  InputRegister *cur_in = nullptr;
  bool have_global = false;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw spec_error("line " + std::to_string(lineno) +
                         ": unterminated section header");
      std::string head = trim(line.substr(1, line.size() - 2));
      if (head == "global") {
        sec = Sec::Global;
        have_global = true;
      } else if (head.rfind("source ", 0) == 0) {
        sec = Sec::Source;
        hw.sources.push_back({trim(head.substr(7)), -1, 0, ""});
        cur_src = &hw.sources.back();
        if (cur_src->name.empty())
          throw spec_error("line " + std::to_string(lineno) +
                           ": source needs a name");
      } else if (head.rfind("input ", 0) == 0) {
        sec = Sec::Input;
        hw.inputs.push_back({trim(head.substr(6)), -1, 0, 255, {}});
        cur_in = &hw.inputs.back();
        if (cur_in->name.empty())
          throw spec_error("line " + std::to_string(lineno) +
                           ": input needs a name");
      } else if (head.rfind("atomic_fn ", 0) == 0) {
        sec = Sec::AtomicFn;
        std::string fn = trim(head.substr(10));
        if (fn.empty())
          throw spec_error("line " + std::to_string(lineno) +
                           ": atomic_fn needs a name");
        hw.atomic_functions.push_back(fn);
      } else {
        throw spec_error("line " + std::to_string(lineno) +
                         ": unknown section [" + head + "]");
      }
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw spec_error("line " + std::to_string(lineno) +
                       ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    switch (sec) {
      case Sec::Global:
        if (key == "atomic_bits") {
          hw.atomic_bits = (int)parse_int_value(val, key);
        } else if (key == "reg") {
          hw.global_enable_reg = parse_int_value(val, key);
        } else if (key == "bit") {
          hw.global_enable_bit = (int)parse_int_value(val, key);
        } else if (key == "initial") {
          if (val == "on")
            hw.global_enable_initial = true;
          else if (val == "off")
            hw.global_enable_initial = false;
          else
            throw spec_error("initial must be on|off, got '" + val + "'");
        } else {
          throw spec_error("unknown key '" + key + "' in [global]");
        }
        break;
      case Sec::Source:
        if (key == "reg")
          cur_src->enable_reg = parse_int_value(val, key);
        else if (key == "bit")
          cur_src->enable_bit = (int)parse_int_value(val, key);
        else if (key == "vector")
          cur_src->vector = val;
        else
          throw spec_error("unknown key '" + key + "' in [source]");
        break;
      case Sec::Input:
        if (key == "addr")
          cur_in->address = parse_int_value(val, key);
        else if (key == "min")
          cur_in->min = parse_int_value(val, key);
        else if (key == "max")
          cur_in->max = parse_int_value(val, key);
        else if (key == "values") {
          std::istringstream vs(val);
          std::string item;
          while (std::getline(vs, item, ','))
            cur_in->test_values.push_back(parse_int_value(trim(item), key));
        } else {
          throw spec_error("unknown key '" + key + "' in [input]");
        }
        break;
      case Sec::AtomicFn:
        throw spec_error("[atomic_fn] sections take no keys");
      case Sec::None:
        throw spec_error("line " + std::to_string(lineno) +
                         ": key outside any section");
    }
  }

  if (!have_global || hw.global_enable_reg < 0)
    throw spec_error("missing [global] section with the enable register");
  if (hw.atomic_bits != 8 && hw.atomic_bits != 16 && hw.atomic_bits != 32)
    throw spec_error("atomic_bits must be 8, 16 or 32");
  if (hw.global_enable_bit < 0 || hw.global_enable_bit > 31)
    throw spec_error("global enable bit out of range");

  std::set<std::pair<int64_t, int>> bits;
  bits.insert({hw.global_enable_reg, hw.global_enable_bit});
  for (auto &s : hw.sources) {
    if (s.enable_reg < 0)
      throw spec_error("source " + s.name + " is missing its enable reg");
    if (s.vector.empty())
      throw spec_error("source " + s.name + " is missing its vector");
    if (!bits.insert({s.enable_reg, s.enable_bit}).second)
      throw spec_error("enable bit of source " + s.name +
                       " collides with another enable bit");
  }
  std::set<std::string> vecs;
  for (auto &s : hw.sources)
    if (!vecs.insert(s.vector).second)
      throw spec_error("two sources share vector " + s.vector);

  std::set<int64_t> in_addrs;
  for (auto &i : hw.inputs) {
    if (i.address < 0)
      throw spec_error("input " + i.name + " is missing its address");
    if (i.min > i.max)
      throw spec_error("input " + i.name + " has an empty range");
    if (!in_addrs.insert(i.address).second)
      throw spec_error("two inputs share address " + std::to_string(i.address));
    for (auto &b : bits)
      if (b.first == i.address)
        throw spec_error("input " + i.name +
                         " overlaps an interrupt enable register");
    if (i.test_values.empty()) {
      i.test_values.push_back(i.min);
      if (i.max != i.min) i.test_values.push_back(i.max);
    }
    for (int64_t v : i.test_values)
      if (v < i.min || v > i.max)
        throw spec_error("input " + i.name + " test value out of range");
  }
  return hw;
}

HardwareSpec load_hw_spec_file(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw spec_error("cannot open hardware spec '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_hw_spec(ss.str());
}

RegisterSemantics classify_address(int64_t address, const HardwareSpec &hw) {
  RegisterSemantics out;
  if (hw.agnostic) return out;
  if (address == hw.global_enable_reg) {
    out.cls = RegClass::GlobalEnable;
    return out;
  }
  for (size_t i = 0; i < hw.sources.size(); ++i)
    if (hw.sources[i].enable_reg == address) {
      out.cls = RegClass::SourceEnable;
      out.source = (int)i;
      return out;
    }
  for (auto &in : hw.inputs)
    if (in.address == address) {
      out.cls = RegClass::Input;
      out.min = in.min;
      out.max = in.max;
      return out;
    }
  return out;
}

RegisterSemantics classify_access(const VarDecl &decl, const HardwareSpec &hw) {
  if (!decl.absolute_address) return RegisterSemantics{};
  return classify_address(*decl.absolute_address, hw);
}

bool is_atomic_access(const CType &t, const HardwareSpec &hw) {
  int width = bit_width(t.base);
  if (t.is_pointer) width = 16;  // one data-pointer-sized access
  return width > 0 && width <= hw.atomic_bits;
}

EnableEffect enable_effect_of_store(int64_t address, const StoreValue &value,
                                    const HardwareSpec &hw) {
  EnableEffect eff;
  if (hw.agnostic) return eff;

  auto bit_value = [&](int bit) -> Tri {
    int64_t mask = int64_t(1) << bit;
    switch (value.kind) {
      case StoreValue::Const:
        return (value.value & mask) ? Tri::On : Tri::Off;
      case StoreValue::OrConst:
        return (value.value & mask) ? Tri::On : Tri::Unknown;
      case StoreValue::AndConst:
        return (value.value & mask) ? Tri::Unknown : Tri::Off;
      case StoreValue::Opaque:
        return Tri::Unknown;
    }
    return Tri::Unknown;
  };
  // Or/And with a mask leaves the untouched bits alone.
  auto bit_known_unchanged = [&](int bit) {
    int64_t mask = int64_t(1) << bit;
    if (value.kind == StoreValue::OrConst) return (value.value & mask) == 0;
    if (value.kind == StoreValue::AndConst) return (value.value & mask) != 0;
    return false;
  };

  if (address == hw.global_enable_reg &&
      !bit_known_unchanged(hw.global_enable_bit)) {
    eff.touches_global = true;
    eff.global = bit_value(hw.global_enable_bit);
  }
  for (size_t i = 0; i < hw.sources.size(); ++i) {
    const auto &s = hw.sources[i];
    if (s.enable_reg == address && !bit_known_unchanged(s.enable_bit))
      eff.sources.push_back({(int)i, bit_value(s.enable_bit)});
  }
  return eff;
}

InterruptState interrupt_transfer(const InterruptState &in,
                                  const EnableEffect &eff) {
  InterruptState out = in;
  if (eff.touches_global) out.global = eff.global;
  for (auto &[idx, v] : eff.sources) out.sources[idx] = v;
  return out;
}

void check_program_against_hw(const Program &prog, const HardwareSpec &hw) {
  if (hw.agnostic) return;
  for (auto &isr : prog.isrs) {
    if (hw.source_for_vector(isr->name) < 0)
      throw spec_error("ISR vector '" + isr->name +
                       "' has no interrupt source in the hardware spec");
  }
}

}  // namespace mca
