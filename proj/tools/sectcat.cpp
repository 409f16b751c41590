#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sectcat/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sectcat::InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sectcat: homotopic and module sectional category invariants of Sullivan models"};
  app.footer(
      "Commands: cohomology, pd-check, cup-length, e0, htc, mtc, verify-theorem, retract\n"
      "Exit status: 0 determinate, 1 input error, 2 refused (hypothesis fails), 3 undetermined at cap");

  std::string command;
  std::string path;
  int cap = 0, budget = 0, power = 0;
  bool json = false, degree_one = false, timing = false;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(sectcat::command_names()));
  app.add_option("model", path, "Model file")->required();
  auto* cap_opt = app.add_option("--cap", cap, "Degree cap (default: 6 x largest generator degree)");
  auto* budget_opt = app.add_option("--budget", budget, "Largest n tried in n-sweeps (default: 2 x formal dimension)");
  auto* power_opt = app.add_option("--power", power, "n for retract: build a retraction of p_n");
  app.add_flag("--json", json, "Machine-readable output");
  app.add_flag("--flag-degree-one", degree_one, "Permit degree-one generators");
  app.add_flag("--timing", timing, "Include wall-clock time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : sectcat::exit_input_error;
  }

  sectcat::RunOptions options;
  if (cap_opt->count()) options.cap = cap;
  if (budget_opt->count()) options.budget = budget;
  if (power_opt->count()) options.power = power;
  options.timing = timing;

  try {
    sectcat::ModelOptions model_options;
    model_options.allow_degree_one = degree_one;
    auto file = sectcat::parse_model(read_file(path), model_options);
    auto report = sectcat::run(command, file.model, path, options);
    std::cout << sectcat::emit_report(report, json ? sectcat::ReportFormat::json : sectcat::ReportFormat::text);
    return report.exit_code;
  } catch (const sectcat::ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return sectcat::exit_input_error;
  } catch (const sectcat::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sectcat::exit_input_error;
  } catch (const sectcat::PreconditionError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return sectcat::exit_refused;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return sectcat::exit_input_error;
  }
}
