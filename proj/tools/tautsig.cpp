// tautsig: batch verification of the sign, genus, spectral-flow and kappa suites.
//
//   tautsig run --suite lusztig --cutoff 8 --format json --out report.json
//   tautsig run --descriptor data/lusztig_family.json
//   tautsig describe clifford-signs
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad arguments or input.

#include "report.hpp"
#include "suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int run(tautsig::cli::SuiteConfig cfg) {
  using namespace tautsig::cli;
  std::vector<const SuiteInfo*> selected;
  try {
    if (cfg.suites.empty() && !cfg.descriptor) cfg.suites = {"all"};
    cfg.validate();
    selected = resolve_suites(cfg.suites);
    if (cfg.descriptor) tautsig::io::load_descriptor(*cfg.descriptor);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  Report report;
  report.config = cfg.to_json();
  for (const auto* s : selected) report.suites.push_back(s->run(cfg));
  if (cfg.descriptor) report.suites.push_back(run_descriptor(cfg));

  if (cfg.out.empty()) {
    write_report(std::cout, report, cfg.format);
  } else {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "error: cannot write '" << cfg.out << "'\n";
      return 2;
    }
    write_report(out, report, cfg.format);
    write_text(std::cout, report);
  }

  std::string suite;
  if (const auto* a = report.first_failure(&suite)) {
    std::cerr << "first failing certificate:\n" << Json{{"suite", suite}, {"assertion", a->to_json()}}.dump(2) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and numerical verification suites for tautological classes and twisted signature operators"};
  app.require_subcommand(1);

  tautsig::cli::SuiteConfig cfg;
  auto* run_cmd = app.add_subcommand("run", "run verification suites");
  run_cmd->add_option("--suite", cfg.suites, "suite name or 'all' (repeatable)");
  run_cmd->add_option("--order", cfg.order, "truncation order of genus expansions")->capture_default_str();
  run_cmd->add_option("--cutoff", cfg.cutoff, "Fourier cutoff N")->capture_default_str();
  run_cmd->add_option("--tol", cfg.tol, "eigenvalue tolerance")->capture_default_str();
  run_cmd->add_option("--grid", cfg.grid, "parameter grid resolution")->capture_default_str();
  run_cmd->add_option("--out", cfg.out, "report path (default: stdout)");
  run_cmd->add_option("--format", cfg.format, "json, csv or text")->capture_default_str();
  run_cmd->add_option("--descriptor", cfg.descriptor, "model space, bundle or bundle model descriptor");

  std::string suite_name;
  auto* describe_cmd = app.add_subcommand("describe", "print a suite's anchors and assertions");
  describe_cmd->add_option("suite", suite_name, "suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) return run(cfg);
  const auto* s = tautsig::cli::find_suite(suite_name);
  if (!s) {
    std::cerr << "error: unknown suite '" << suite_name << "'; known suites:";
    for (const auto& k : tautsig::cli::registry()) std::cerr << " " << k.name;
    std::cerr << "\n";
    return 2;
  }
  std::cout << tautsig::cli::describe(*s);
  return 0;
}
