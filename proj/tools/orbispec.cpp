// orbispec: run a built-in or user scenario and write report.json,
// spectra.csv and summary.md.  Exit status 0 when every check passes, 1 when
// a check fails, 2 on usage or configuration errors.

#include <iostream>

#include "CLI11.hpp"
#include "orbi/scenarios.hpp"

using namespace orbi;

int main(int argc, char** argv) {
  CLI::App app{"orbifold spectral-geometry scenario runner"};
  std::string name, config, out = "orbispec-out";
  std::vector<std::string> registries;
  int modes = 0, buffer = -1;
  bool list = false, force = false;

  auto* scen = app.add_option("--scenario", name, "built-in or registered scenario name");
  auto* conf = app.add_option("--config", config, "scenario file (JSON)");
  scen->excludes(conf);
  app.add_option("--modes", modes, "mode cutoff M")->check(CLI::PositiveNumber);
  app.add_option("--buffer", buffer, "interior band buffer B")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "output directory");
  app.add_option("--registry", registries, "directory of user scenario files (repeatable)");
  app.add_flag("--list", list, "list registered scenarios");
  app.add_flag("--force", force, "allow tolerances looser than 10x the defaults");
  CLI11_PARSE(app, argc, argv);

  try {
    scenario::Registry reg;
    for (const auto& dir : registries) reg.add_directory(dir);
    if (list) {
      for (const auto& c : reg.entries()) std::cout << c.name << "  " << c.description << "\n";
      return 0;
    }
    scenario::Config cfg;
    if (!config.empty())
      cfg = scenario::load_config(config, reg);
    else if (!name.empty())
      cfg = reg.find(name);
    else
      throw Error("give --scenario NAME or --config FILE (or --list)");

    scenario::RunOptions opt;
    if (modes > 0) opt.modes = modes;
    if (buffer >= 0) opt.buffer = buffer;
    opt.force = force;
    const auto rep = scenario::run_scenario(cfg, opt);
    scenario::write_outputs(rep, out);
    for (const auto& c : rep.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    std::cout << rep.scenario << ": " << (rep.passed() ? "passed" : "failed") << " (" << out << ")\n";
    return rep.exit_status();
  } catch (const std::exception& e) {
    std::cerr << "orbispec: " << e.what() << "\n";
    return 2;
  }
}
