#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sdl/config.hpp"
#include "sdl/io.hpp"
#include "sdl/runner.hpp"

namespace fs = std::filesystem;
using namespace sdl;
using nlohmann::json;

namespace {

const fs::path kDemo = fs::path(SDL_SOURCE_DIR) / "configs" / "demo.json";

struct Result {
  int code;
  std::string output;
};

// Runs sdlab with stdout and stderr merged; `env` is prefixed to the command.
Result sdlab(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " '" + std::string(SDLAB_PATH) + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// Fresh scratch directory, removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& tag)
      : dir(fs::temp_directory_path() / ("sdl_cli_" + tag + "_" + std::to_string(getpid()))) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string env() const { return "SDL_OUTDIR='" + dir.string() + "'"; }
};

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

json demo() { return json::parse(read_text(kDemo)); }

}  // namespace

TEST_CASE("config round trip and strictness") {
  const RunConfig c = load_config(kDemo);
  CHECK(c.n == 201);
  CHECK(c.params.alpha == 3.0);
  CHECK(c.initial.compatible);
  const RunConfig again = parse_config(to_json(c));
  CHECK(to_json(again) == to_json(c));

  json j = demo();
  j["stepping"]["dt_typo"] = 1.0;
  try {
    (void)parse_config(j.dump());
    FAIL("expected ConfigParse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParse);
    CHECK(e.field() == "stepping.dt_typo");
  }
  CHECK_THROWS_AS((void)parse_config("{"), Error);
  CHECK_THROWS_AS((void)parse_config(R"({"params": {}})"), Error);
  CHECK(parse_command("sweep") == Command::Sweep);
  CHECK_FALSE(parse_command("plot").has_value());
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::RangeViolation) == ExitCode::ConfigError);
  CHECK(exit_code_for(ErrorCode::ConfigParse) == ExitCode::ConfigError);
  CHECK(exit_code_for(ErrorCode::NewtonDiverged) == ExitCode::SolverFault);
  CHECK(exit_code_for(ErrorCode::ScheduleDiverged) == ExitCode::SolverFault);
}

TEST_CASE("validate names the violated constraint") {
  Scratch s("validate");
  json j = demo();
  CHECK(sdlab("validate --config '" + write_config(s.dir, j).string() + "'").code == 0);
  j["params"]["m"] = 0.5;
  const Result r = sdlab("validate --config '" + write_config(s.dir, j).string() + "'");
  CHECK(r.code == 1);
  CHECK(r.output.find("-1<m<0") != std::string::npos);
  CHECK(sdlab("validate --config '" + (s.dir / "missing.json").string() + "'").code == 1);
  CHECK(sdlab("validate").code == 1);
  CHECK(sdlab("frobnicate --config x").code == 1);
}

TEST_CASE("a config naming another command is rejected") {
  Scratch s("mismatch");
  json j = demo();
  j["command"] = "sweep";
  const Result r = sdlab("solve --config '" + write_config(s.dir, j).string() + "'", s.env());
  CHECK(r.code == 1);
  CHECK(r.output.find("sweep") != std::string::npos);
}

TEST_CASE("solve writes its artifacts and refuses to overwrite without --force") {
  Scratch s("solve");
  const std::string args = "solve --config '" + kDemo.string() + "'";
  const Result r = sdlab(args, s.env());
  CHECK(r.code == 0);
  const fs::path run = s.dir / "demo";
  CHECK(fs::exists(run / "trajectory.csv"));
  CHECK(fs::exists(run / "diagnostics.json"));
  CHECK(fs::exists(run / "config.json"));
  CHECK(fs::exists(run / "plot.gp"));

  const Result again = sdlab(args, s.env());
  CHECK(again.code == 1);
  CHECK(again.output.find("--force") != std::string::npos);
  CHECK(sdlab(args + " --force", s.env()).code == 0);
}

TEST_CASE("scalar and vector kernels produce the same trajectory file") {
  Scratch a("simd_a"), b("simd_b");
  const std::string args = "solve --config '" + kDemo.string() + "'";
  REQUIRE(sdlab(args, a.env()).code == 0);
  REQUIRE(sdlab(args, b.env() + " SDL_SIMD=scalar").code == 0);
  CHECK(read_text(a.dir / "demo" / "trajectory.csv") == read_text(b.dir / "demo" / "trajectory.csv"));
}

TEST_CASE("verify reports six estimates") {
  Scratch s("verify");
  const Result r = sdlab("verify --config '" + kDemo.string() + "'", s.env());
  CHECK(r.code == 0);
  const json report = json::parse(read_text(s.dir / "demo" / "report.json"));
  REQUIRE(report["reports"].size() == 6);
  CHECK(report["pass"] == true);
  for (const auto& e : report["reports"]) CHECK(e["pass"] == true);
}
