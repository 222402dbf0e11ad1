#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "bubbletower/cli_runner.hpp"
#include "bubbletower/errors.hpp"

using namespace bubbletower;

int main(int argc, char** argv) {
  CLI::App app{"Bubble-tower construction and verification"};
  app.require_subcommand(1);
  std::string config_path;
  bool print_only = false;
  std::map<std::string, std::map<std::string, std::string>> flags;
  const std::map<std::string, std::string> about = {
      {"constants", "interaction constants and the regular-part profile"},
      {"reduce", "solve the reduced finite-dimensional system"},
      {"ansatz", "evaluate the tower ansatz and its residual"},
      {"solve", "independent radial solves from the ansatz"},
      {"sweep", "continuation in eps with optional Lyapunov-Schmidt correction"},
      {"verify", "asymptotic order checks"},
  };
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_flag("--print-config", print_only, "print the resolved configuration and exit");
    for (const auto& [key, value] : config_pairs(RunConfig{})) {
      if (key == "cmd") continue;
      sub->add_option("--" + key, flags[name][key], "default: " + value);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommand(cmd);

  RunConfig cfg;
  try {
    std::map<std::string, std::string> entries;
    if (!config_path.empty()) entries = read_config_file(config_path);
    auto it = entries.find("cmd");
    if (it != entries.end() && it->second != cmd)
      fail(ErrorKind::config, "config file cmd '" + it->second + "' conflicts with '" + cmd + "'");
    entries["cmd"] = cmd;
    for (const auto& [key, value] : flags[cmd])
      if (sub->count("--" + key) > 0) entries[key] = value;
    cfg = parse_config(entries);
  } catch (const Error& e) {
    std::cerr << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
    return 1;
  }
  if (print_only) {
    std::cout << print_config(cfg);
    return 0;
  }
  return execute(cfg, std::cerr);
}
