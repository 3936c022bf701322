#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdl/model.hpp"
#include "sdl/solver.hpp"

namespace sdl {

enum class Command { Validate, Solve, Verify, Converge, Depend, Sweep };
std::string_view to_string(Command command) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

struct OutputConfig {
  std::filesystem::path directory = "runs";
  std::string run_id = "run";
  std::size_t stride = 100;  ///< snapshot stride in nominal steps
  bool emit_plots = true;
};

/// A run description as read from JSON. Structure is checked here; the
/// parameter inequalities are checked when the run starts.
struct RunConfig {
  std::optional<Command> command;
  RawParams params;
  InitialSpec initial;
  std::size_t n = 201;
  StepConfig stepping;
  std::vector<double> schedule;  ///< mollification radii, coarsest first
  OutputConfig outputs;
};

/// Throws ConfigParse on malformed JSON, wrong types, missing required keys
/// (params, initial) and unknown keys at any level.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON text of a config; parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config);

}  // namespace sdl
