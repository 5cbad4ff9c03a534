#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coldcc/commands.hpp"
#include "coldcc/error.hpp"

namespace cmd = coldcc::commands;

int main(int argc, char** argv) {
  CLI::App app{"Coupled-channel 3He + 17O2 cold collisions"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string emit_path;
  int threads = 1;
  std::string out_dir;
  app.add_option("--config", config_path, "Run configuration (YAML); defaults apply when omitted")
      ->check(CLI::ExistingFile);
  auto* emit = app.add_option("--emit-default-config", emit_path,
                              "Write the commented reference configuration to PATH ('-' for stdout) and exit")
                   ->expected(0, 1)
                   ->default_str("-");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory (overrides output.directory)");

  const std::vector<std::pair<std::string, std::string>> help = {
      {"levels", "Molecular level table (v, N, J, E)"},
      {"rates", "Rate constants over the configured energy grid"},
      {"adiabats", "Adiabatic curves of one (jtot, parity) block"},
      {"scan", "Rates and scattering length versus the interaction scale lambda"},
      {"compare", "Rigid rotor versus vibrating diatom"},
  };
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  CLI11_PARSE(app, argc, argv);

  try {
    if (emit->count()) {
      const auto text = coldcc::config::default_config_text();
      if (emit_path.empty() || emit_path == "-") {
        std::cout << text;
      } else {
        std::ofstream out(emit_path, std::ios::binary);
        if (!(out << text)) throw coldcc::Error(fmt::format("cannot write '{}'", emit_path));
      }
      return cmd::kOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return cmd::kUsage;
    }
    const auto config = config_path.empty() ? coldcc::config::parse_config("{}", "<defaults>")
                                            : coldcc::config::load_config(config_path);
    cmd::CommandOptions options;
    options.threads = threads;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.log = &std::cerr;
    const auto result = cmd::run_command(app.get_subcommands().front()->get_name(), config, options);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    return result.exit_code;
  } catch (const coldcc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cmd::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cmd::kFailure;
  }
}
