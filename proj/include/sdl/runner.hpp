#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sdl/config.hpp"
#include "sdl/error.hpp"

namespace sdl {

enum class ExitCode : int { Ok = 0, ConfigError = 1, EstimateFailed = 2, SolverFault = 3 };

/// ConfigError for bad input (parse, ranges, data, corridor), SolverFault
/// for numerical failures.
ExitCode exit_code_for(ErrorCode code) noexcept;

struct RunOptions {
  bool force = false;     ///< replace an existing <outdir>/<run_id>
  unsigned workers = 0;   ///< sweep pool size, 0 = hardware concurrency
};

/// The 3x3x2 parameter grid m in {-0.8, -0.5, -0.2}, p in {0.25, 0.5, 0.75},
/// alpha in {2.5 - m, 4}, with the given M and T.
std::vector<RawParams> standard_suite(double M, double T);

/// Loads the config, executes `command` and writes its artifacts under
/// <outputs.directory>/<run_id>/ (SDL_OUTDIR overrides the directory).
/// Prints a one-line summary to `out` and errors to `err`.
ExitCode run(Command command, const std::filesystem::path& config_path, const RunOptions& options,
             std::ostream& out, std::ostream& err);

}  // namespace sdl
