// Command-line driver: `verify` runs a scenario's check suites and writes a
// deterministic JSON report; `chern` prints the Chern forms for the scenario.
// Exit codes: 0 when every check passes, 1 when some check fails, 2 on errors
// (bad config, non-flat connection in `chern`, or a check that threw).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "superkoszul/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"exact verification of Koszul-resolution fundamental-class identities"};
  app.require_subcommand(1);

  std::string config;
  std::string check;
  std::string report_path;
  int truncation = -1;

  CLI::App* verify = app.add_subcommand("verify", "run a scenario's checks and report");
  verify->add_option("--config", config, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--check", check,
                     "restrict to one suite: all, chern, koszul, supertrace, twisted");
  verify->add_option("--report", report_path, "write the JSON report to this path");
  verify->add_option("--truncation", truncation, "override the ring truncation order");

  CLI::App* chern = app.add_subcommand("chern", "print the Chern forms for a scenario");
  chern->add_option("--config", config, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  chern->add_option("--truncation", truncation, "override the ring truncation order");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<int> truncation_override;
    if (truncation >= 0) truncation_override = truncation;
    skz::Scenario scenario = skz::load_scenario(config, truncation_override);

    if (chern->parsed()) {
      std::cout << skz::emit_chern(scenario);
      return 0;
    }

    if (!check.empty()) {
      scenario.checks =
          skz::canonical_checks({check}, skz::holomorphic_section(scenario), "--check");
    }
    if (!report_path.empty()) scenario.report_path = report_path;

    const skz::Report report = skz::run(scenario);
    std::cout << skz::report_summary(report);
    if (scenario.report_path) {
      std::ofstream out(*scenario.report_path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write report to " << *scenario.report_path << "\n";
        return 2;
      }
      out << skz::report_json(report);
      std::cout << "report written to " << *scenario.report_path << "\n";
    }
    return skz::exit_status(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
