#include <doctest.h>

#include "mca/hardware.hpp"
#include "test_util.hpp"

using namespace mca;

TEST_CASE("parse an AVR-like description") {
  HardwareSpec hw = load_hw_spec_file(test::corpus_path("avr8_uart.hw"));
  CHECK(hw.atomic_bits == 8);
  CHECK(hw.global_enable_reg == 0x5F);
  CHECK(hw.global_enable_bit == 7);
  CHECK(hw.global_enable_initial);
  REQUIRE(hw.sources.size() == 1);
  CHECK(hw.sources[0].name == "USART0_RX");
  CHECK(hw.sources[0].vector == "USART0_RX_vect");
  REQUIRE(hw.inputs.size() == 1);
  CHECK(hw.inputs[0].min == 0);
  CHECK(hw.inputs[0].max == 255);
  CHECK(hw.inputs[0].test_values == std::vector<int64_t>{0, 1});
}

TEST_CASE("a spec without sources is valid") {
  HardwareSpec hw = parse_hw_spec(
      "[global]\natomic_bits = 16\nreg = 0x5F\nbit = 7\n");
  CHECK(hw.sources.empty());
  CHECK(hw.atomic_bits == 16);
  CHECK_FALSE(hw.global_enable_initial);
}

TEST_CASE("spec validation errors") {
  // two sources on one enable bit
  CHECK_THROWS_AS(parse_hw_spec("[global]\nreg = 0x5F\nbit = 7\n"
                                "[source A]\nreg = 1\nbit = 0\nvector = a\n"
                                "[source B]\nreg = 1\nbit = 0\nvector = b\n"),
                  Diag);
  CHECK_THROWS_AS(parse_hw_spec("[source A]\nreg = 1\nbit = 0\nvector=a\n"),
                  Diag);  // missing [global]
  CHECK_THROWS_AS(parse_hw_spec("[global]\nreg = 0x5F\nbogus = 1\n"), Diag);
  CHECK_THROWS_AS(parse_hw_spec("[global]\nreg = 0x5F\natomic_bits = 12\n"),
                  Diag);
  CHECK_THROWS_AS(
      parse_hw_spec("[global]\nreg = 0x5F\n"
                    "[input A]\naddr = 2\n[input B]\naddr = 2\n"),
      Diag);
}

TEST_CASE("classification of addresses") {
  HardwareSpec hw = load_hw_spec_file(test::corpus_path("avr8_uart.hw"));
  CHECK(classify_address(0x5F, hw).cls == RegClass::GlobalEnable);
  RegisterSemantics src = classify_address(0x2B, hw);
  CHECK(src.cls == RegClass::SourceEnable);
  CHECK(src.source == 0);
  RegisterSemantics in = classify_address(0x2C, hw);
  CHECK(in.cls == RegClass::Input);
  CHECK(in.min == 0);
  CHECK(in.max == 255);
  CHECK(classify_address(0x99, hw).cls == RegClass::PlainMemory);

  VarDecl plain;
  plain.name = "rx_out";
  plain.ctype = CType::scalar(Base::U8);
  CHECK(classify_access(plain, hw).cls == RegClass::PlainMemory);
}

TEST_CASE("atomic access widths") {
  HardwareSpec hw8 = test::mini_hw();
  CHECK(is_atomic_access(CType::scalar(Base::U8), hw8));
  CHECK(is_atomic_access(CType::scalar(Base::I8), hw8));
  CHECK_FALSE(is_atomic_access(CType::scalar(Base::U16), hw8));
  HardwareSpec hw16 = parse_hw_spec(
      "[global]\natomic_bits = 16\nreg = 0x5F\nbit = 7\n");
  CHECK(is_atomic_access(CType::scalar(Base::U16), hw16));
  HardwareSpec none = HardwareSpec::none();
  CHECK_FALSE(is_atomic_access(CType::scalar(Base::U8), none));
}

TEST_CASE("enable-bit transfer") {
  HardwareSpec hw = test::mini_hw();
  InterruptState s = InterruptState::initial(hw);
  CHECK(s.global == Tri::Off);
  CHECK(s.sources[0] == Tri::Off);

  StoreValue one{StoreValue::Const, 1};
  InterruptState after =
      interrupt_transfer(s, enable_effect_of_store(0x30, one, hw));
  CHECK(after.sources[0] == Tri::On);

  StoreValue zero{StoreValue::Const, 0};
  after = interrupt_transfer(after, enable_effect_of_store(0x30, zero, hw));
  CHECK(after.sources[0] == Tri::Off);

  // unknown write: three-valued join of both constant cases
  StoreValue opaque{StoreValue::Opaque, 0};
  after = interrupt_transfer(s, enable_effect_of_store(0x30, opaque, hw));
  CHECK(after.sources[0] == Tri::Unknown);

  // read-modify-write masks
  StoreValue setbit{StoreValue::OrConst, 0x80};
  after = interrupt_transfer(s, enable_effect_of_store(0x5F, setbit, hw));
  CHECK(after.global == Tri::On);
  StoreValue keep{StoreValue::OrConst, 0x01};  // bit 7 untouched
  after = interrupt_transfer(s, enable_effect_of_store(0x5F, keep, hw));
  CHECK(after.global == Tri::Off);
  StoreValue clear{StoreValue::AndConst, 0x7F};
  InterruptState on = s;
  on.global = Tri::On;
  after = interrupt_transfer(on, enable_effect_of_store(0x5F, clear, hw));
  CHECK(after.global == Tri::Off);
}

TEST_CASE("flag lattice is monotone") {
  CHECK(tri_join(Tri::On, Tri::Off) == Tri::Unknown);
  CHECK(tri_join(Tri::On, Tri::On) == Tri::On);
  CHECK(tri_leq(Tri::On, Tri::Unknown));
  CHECK(tri_leq(Tri::Off, Tri::Unknown));
  CHECK_FALSE(tri_leq(Tri::Unknown, Tri::On));
}

TEST_CASE("program/spec cross-check") {
  HardwareSpec hw = test::mini_hw();
  Program p;
  auto isr = std::make_unique<FunctionDef>();
  isr->name = "OTHER_vect";
  isr->is_isr = true;
  p.isrs.push_back(std::move(isr));
  CHECK_THROWS_AS(check_program_against_hw(p, hw), Diag);
}
