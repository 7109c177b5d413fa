#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  namespace cli = scissortruss::cli;
  CLI::App app{"Design and analysis toolkit for triple-scissor deployable truss antennas"};
  app.require_subcommand(1, 1);

  cli::RunConfig rc;
  std::string config;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON configuration file");
  app.add_option("--out", rc.out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Random seed for the optimizers");
  app.add_flag("--quiet", rc.quiet, "Suppress the summary");

  for (const char* name : {"design", "analyze", "material", "optimize"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }
  rc.subcommand = app.get_subcommands().front()->get_name();
  if (!config.empty()) rc.config_path = config;
  if (*seed_opt) rc.seed = seed;
  return cli::run(rc, std::cout, std::cerr);
}
