#include <doctest.h>

#include <json.hpp>

#include "mca/driver.hpp"
#include "test_util.hpp"

using namespace mca;
using test::analyze_str;

TEST_CASE("exit code follows the warning set") {
  AnalysisSession clean =
      analyze_str("uint8 x; void main() { x = 1; }", test::mini_hw());
  CHECK(clean.report.exit_code() == 0);
  AnalysisSession noisy = analyze_str(
      "volatile uint16 w; uint16 s; volatile uint8 EN @ 0x30;\n"
      "ISR(TICK_vect) { w = w + 1; }\n"
      "void main() { sei(); EN = 1; s = w; }",
      test::mini_hw());
  CHECK(noisy.report.exit_code() == 1);
}

TEST_CASE("constant indices are proven safe") {
  AnalysisSession s = analyze_str(
      "uint8 a[4]; void main() { a[0] = 1; a[3] = 2; }", test::mini_hw());
  REQUIRE(s.report.array_checks.size() == 2);
  for (auto &v : s.report.array_checks) CHECK(v.safe);
  CHECK(s.report.exit_code() == 0);
}

TEST_CASE("an unbounded index is flagged with its interval") {
  AnalysisSession s = analyze_str(
      "uint8 a[4]; uint8 i; void main() { a[i + 200] = 1; }",
      test::mini_hw());
  REQUIRE(s.report.array_checks.size() == 1);
  CHECK_FALSE(s.report.array_checks[0].safe);
  CHECK(s.report.array_checks[0].index == Interval{200, 200});
  bool has_oob = false;
  for (auto &w : s.report.warnings)
    if (w.kind == WarnKind::ArrayOutOfBounds) {
      has_oob = true;
      CHECK(w.severity == Severity::Error);
      CHECK(w.message.find("[200, 200]") != std::string::npos);
      CHECK(w.message.find("[0, 3]") != std::string::npos);
    }
  CHECK(has_oob);
}

TEST_CASE("guarded indices are proven safe") {
  AnalysisSession s = analyze_str(
      "uint8 a[8]; uint8 i; void main() { if (i < 8) { a[i] = 1; } }",
      test::mini_hw());
  REQUIRE(s.report.array_checks.size() == 1);
  CHECK(s.report.array_checks[0].safe);
}

TEST_CASE("json output round-trips the findings") {
  AnalysisSession s = analyze_str(
      "uint8 a[4]; uint8 i; void main() { a[i + 200] = 1; }",
      test::mini_hw());
  std::string text =
      render_report(s.report, ReportFormat::Json, "prog.mc", s.table, true);
  nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j["file"] == "prog.mc");
  REQUIRE(j["warnings"].size() == s.report.warnings.size());
  for (size_t i = 0; i < s.report.warnings.size(); ++i) {
    const Warning &w = s.report.warnings[i];
    CHECK(j["warnings"][i]["kind"] == warn_kind_str(w.kind));
    CHECK(j["warnings"][i]["loc"]["line"] == w.loc.line);
    CHECK(j["warnings"][i]["loc"]["col"] == w.loc.col);
    CHECK(j["warnings"][i]["message"] == w.message);
  }
  CHECK(j["array_checks"].size() == s.report.array_checks.size());
  CHECK(j["stats"]["isr_analyses"] == s.report.stats.isr_analyses);
  CHECK(j["exit_code"] == s.report.exit_code());
}

TEST_CASE("text output is one line per finding") {
  AnalysisSession s = analyze_str(
      "uint8 a[4]; uint8 i; void main() { a[i + 200] = 1; }",
      test::mini_hw());
  std::string text =
      render_report(s.report, ReportFormat::Text, "prog.mc", s.table, false);
  CHECK(text.find("prog.mc:") != std::string::npos);
  CHECK(text.find("ArrayOutOfBounds") != std::string::npos);
  CHECK(text.find("1 warning") != std::string::npos);
}

TEST_CASE("named handler functions support the agnostic mode") {
  DriverOptions opts;
  opts.isr_functions = {"on_tick"};
  AnalysisSession s = analyze_str(
      "uint8 n; uint8 seen;\n"
      "void on_tick() { n = n + 1; }\n"
      "void main() { seen = n; }",
      HardwareSpec::none(), opts);
  CHECK(s.prog.isrs.size() == 1);
  bool nonatomic = false;
  for (auto &w : s.report.warnings)
    if (w.kind == WarnKind::NonAtomicAccess) nonatomic = true;
  CHECK(nonatomic);  // nothing is atomic without a hardware model
}

TEST_CASE("the agnostic mode reports a superset of the aware findings") {
  struct Case {
    const char *mc;
    const char *hw;
  };
  const Case cases[] = {
      {"uart.mc", "avr8_uart.hw"},
      {"rgb_led.mc", "avr8_timer.hw"},
      {"traffic_light.mc", "avr8_timer.hw"},
  };
  for (const Case &c : cases) {
    CAPTURE(c.mc);
    std::string src = read_file(test::corpus_path(c.mc));
    AnalysisSession aware =
        analyze_str(src, load_hw_spec_file(test::corpus_path(c.hw)));
    AnalysisSession agnostic = analyze_str(src, HardwareSpec::none());
    std::set<std::pair<int, std::pair<int, int>>> agn;
    for (auto &w : agnostic.report.warnings)
      agn.insert({(int)w.kind, {w.loc.line, w.loc.col}});
    for (auto &w : aware.report.warnings) {
      CAPTURE(w.message);
      CHECK(agn.count({(int)w.kind, {w.loc.line, w.loc.col}}));
    }
  }
}
