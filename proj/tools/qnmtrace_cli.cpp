#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "qnmtrace/cli_io.hpp"
#include "qnmtrace/errors.hpp"

namespace cli = qnmtrace::cli;

int main(int argc, char** argv) {
  CLI::App app{"Scattering resonances and wave traces for 1D Schrodinger operators"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value file applied before the flags");

  // Flag values are forwarded verbatim so that config files and flags share one parser.
  const char* flags[] = {"potential", "ell",    "mass",   "lambda-cosmo", "region",      "tol",
                         "grid-L",    "grid-N", "times",  "radius",       "bump-center", "bump-width",
                         "out",       "format", "trace-mode", "support-threshold", "zero-multiplicity",
                         "column",    "seed"};
  std::map<std::string, std::string> values;
  for (const char* name : flags) app.add_option(std::string("--") + name, values[name]);

  std::vector<std::string> inputs;
  for (const char* name : {"resonances", "trace", "compare", "birman-krein", "potential-info"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    if (std::string(name) == "compare") sub->add_option("inputs", inputs, "two CSV files")->expected(2);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_config_error;
  }

  cli::RunConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw qnmtrace::ConfigError("cannot read config '" + config_path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      config = cli::parse_config(text.str());
    }
    for (const char* name : flags) {
      if (app.count(std::string("--") + name) > 0) cli::apply_setting(config, name, values[name]);
    }
    if (!inputs.empty()) config.inputs = inputs;
  } catch (const qnmtrace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::exit_config_error;
  }

  const cli::Command command = cli::parse_command(app.get_subcommands().front()->get_name());
  return cli::run(command, config, std::cout, std::cerr);
}
