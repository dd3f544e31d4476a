// adiabatic-lab: batch runner for the quantum-adiabatic numerical experiments.
//
//   adiabatic-lab <subcommand> --config <file> [--out <path>] [--format csv|json]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical/accuracy error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adlab/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    adlab::fail(adlab::ErrorKind::InputDomain,
                "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical experiments on adiabatic evolution"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  for (const std::string& name : adlab::cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    auto* opt = sub->add_option("--config", config_path, "run configuration");
    if (name != "models") opt->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    adlab::cli::RunConfig cfg;
    if (!config_path.empty())
      cfg = adlab::cli::parse_config(read_file(config_path));
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!format.empty()) cfg.format = format;
    adlab::cli::dispatch(app.get_subcommands().front()->get_name(), cfg);
  } catch (const adlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return adlab::cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
