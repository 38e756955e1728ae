#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mca/driver.hpp"
#include "mca/oracle.hpp"
#include "mca/parser.hpp"
#include "mca/resolve.hpp"

using namespace mca;

int main(int argc, char **argv) {
  CLI::App app{"bounded exhaustive interpreter for Mini-C"};
  app.name("oracle");

  std::string file, hw_arg;
  OracleConfig cfg;
  app.add_option("file", file, "Mini-C translation unit")->required();
  app.add_option("--hw", hw_arg, "hardware description file")->required();
  app.add_option("--isr-max", cfg.isr_fires_max,
                 "interrupt fires per trace (default 4)");
  app.add_option("--max-states", cfg.max_configs,
                 "configuration budget (default 2000000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    HardwareSpec hw = load_hw_spec_file(hw_arg);
    Program prog = parse_source(read_file(file));
    resolve_symbols(prog);
    check_entry(prog);
    check_program_against_hw(prog, hw);
    OracleResult r = enumerate_executions(prog, hw, cfg);
    std::cout << render_oracle_result(r);
    return 0;
  } catch (const Diag &d) {
    std::cerr << "oracle: " << file << ": " << d.what() << "\n";
    return 2;
  }
}
