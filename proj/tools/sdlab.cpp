// sdlab: run, verify and sweep the singular diffusion solver from a JSON config.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sdl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Singular diffusion laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  sdl::RunOptions options;
  std::optional<sdl::Command> selected;

  for (auto command : {sdl::Command::Validate, sdl::Command::Solve, sdl::Command::Verify,
                       sdl::Command::Converge, sdl::Command::Depend, sdl::Command::Sweep}) {
    auto* sub = app.add_subcommand(std::string(sdl::to_string(command)));
    sub->add_option("--config", config_path, "JSON run description")->required();
    sub->add_flag("--force", options.force, "overwrite an existing run directory");
    sub->add_option("--workers", options.workers, "sweep worker threads (default: all cores)");
    sub->callback([&selected, command] { selected = command; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(sdl::ExitCode::ConfigError);
  }
  return static_cast<int>(sdl::run(*selected, config_path, options, std::cout, std::cerr));
}
