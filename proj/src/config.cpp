#include "sdl/config.hpp"

#include <array>
#include <initializer_list>
#include <utility>

#include <json.hpp>

#include "sdl/io.hpp"

namespace sdl {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 6> kCommands{{
    {Command::Validate, "validate"},
    {Command::Solve, "solve"},
    {Command::Verify, "verify"},
    {Command::Converge, "converge"},
    {Command::Depend, "depend"},
    {Command::Sweep, "sweep"},
}};

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw Error(ErrorCode::ConfigParse, key + ": " + message, key);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + "." + key, "missing");
  if (!it->is_number()) fail(where + "." + key, "expected a number");
  return it->get<double>();
}

template <class T>
void optional_field(const json& obj, const std::string& where, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) fail(where + "." + key, "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      fail(where + "." + key, "expected a nonnegative integer");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) fail(where + "." + key, "expected a number");
  } else {
    if (!it->is_string()) fail(where + "." + key, "expected a string");
  }
  out = it->get<T>();
}

InitialSpec parse_initial(const json& j) {
  if (!j.is_object()) fail("initial", "expected an object");
  const auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) fail("initial.kind", "expected a string");
  const std::string name = kind->get<std::string>();
  InitialSpec spec;
  optional_field(j, "initial", "clip", spec.clip);
  optional_field(j, "initial", "compatible", spec.compatible);
  if (name == "constant") {
    reject_unknown(j, "initial", {"kind", "clip", "compatible", "value"});
    spec.kind = initial::Constant{number(j, "initial", "value")};
  } else if (name == "bump") {
    reject_unknown(j, "initial", {"kind", "clip", "compatible", "center", "width", "height", "base"});
    initial::Bump b;
    b.center = number(j, "initial", "center");
    b.width = number(j, "initial", "width");
    b.height = number(j, "initial", "height");
    optional_field(j, "initial", "base", b.base);
    spec.kind = b;
  } else if (name == "plateau") {
    reject_unknown(j, "initial", {"kind", "clip", "compatible", "a", "b", "height"});
    spec.kind = initial::Plateau{number(j, "initial", "a"), number(j, "initial", "b"),
                                 number(j, "initial", "height")};
  } else if (name == "table") {
    reject_unknown(j, "initial", {"kind", "clip", "compatible", "samples"});
    const auto s = j.find("samples");
    if (s == j.end() || !s->is_array()) fail("initial.samples", "expected an array of numbers");
    initial::Table t;
    for (const auto& v : *s) {
      if (!v.is_number()) fail("initial.samples", "expected an array of numbers");
      t.samples.push_back(v.get<double>());
    }
    spec.kind = std::move(t);
  } else {
    fail("initial.kind", "unknown kind '" + name + "'");
  }
  return spec;
}

json initial_json(const InitialSpec& spec) {
  json j;
  std::visit(
      [&j](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, initial::Constant>) {
          j = {{"kind", "constant"}, {"value", k.value}};
        } else if constexpr (std::is_same_v<K, initial::Bump>) {
          j = {{"kind", "bump"}, {"center", k.center}, {"width", k.width},
               {"height", k.height}, {"base", k.base}};
        } else if constexpr (std::is_same_v<K, initial::Plateau>) {
          j = {{"kind", "plateau"}, {"a", k.a}, {"b", k.b}, {"height", k.height}};
        } else {
          j = {{"kind", "table"}, {"samples", k.samples}};
        }
      },
      spec.kind);
  j["clip"] = spec.clip;
  j["compatible"] = spec.compatible;
  return j;
}

}  // namespace

std::string_view to_string(Command command) noexcept {
  for (const auto& [c, name] : kCommands) {
    if (c == command) return name;
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
  for (const auto& [c, n] : kCommands) {
    if (n == name) return c;
  }
  return std::nullopt;
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(root, "", {"command", "params", "initial", "grid", "stepping", "schedule", "outputs"});

  RunConfig config;
  if (const auto it = root.find("command"); it != root.end()) {
    if (!it->is_string()) fail("command", "expected a string");
    config.command = parse_command(it->get<std::string>());
    if (!config.command) fail("command", "unknown command '" + it->get<std::string>() + "'");
  }

  const auto params = root.find("params");
  if (params == root.end()) fail("params", "missing");
  reject_unknown(*params, "params", {"m", "p", "alpha", "M", "T"});
  config.params = {number(*params, "params", "m"), number(*params, "params", "p"),
                   number(*params, "params", "alpha"), number(*params, "params", "M"),
                   number(*params, "params", "T")};

  const auto init = root.find("initial");
  if (init == root.end()) fail("initial", "missing");
  config.initial = parse_initial(*init);

  if (const auto it = root.find("grid"); it != root.end()) {
    reject_unknown(*it, "grid", {"n"});
    optional_field(*it, "grid", "n", config.n);
  }

  if (const auto it = root.find("stepping"); it != root.end()) {
    reject_unknown(*it, "stepping",
                   {"dt_init", "dt_min", "dt_max", "newton_tol", "newton_max_iter", "theta"});
    auto& s = config.stepping;
    optional_field(*it, "stepping", "dt_init", s.dt_init);
    optional_field(*it, "stepping", "dt_min", s.dt_min);
    optional_field(*it, "stepping", "dt_max", s.dt_max);
    optional_field(*it, "stepping", "newton_tol", s.newton_tol);
    optional_field(*it, "stepping", "newton_max_iter", s.newton_max_iter);
    optional_field(*it, "stepping", "theta", s.theta);
  }

  if (const auto it = root.find("schedule"); it != root.end()) {
    if (!it->is_array()) fail("schedule", "expected an array of numbers");
    for (const auto& v : *it) {
      if (!v.is_number()) fail("schedule", "expected an array of numbers");
      config.schedule.push_back(v.get<double>());
    }
  }

  if (const auto it = root.find("outputs"); it != root.end()) {
    reject_unknown(*it, "outputs", {"directory", "run_id", "stride", "emit_plots"});
    auto& o = config.outputs;
    std::string dir = o.directory.string();
    optional_field(*it, "outputs", "directory", dir);
    o.directory = dir;
    optional_field(*it, "outputs", "run_id", o.run_id);
    optional_field(*it, "outputs", "stride", o.stride);
    optional_field(*it, "outputs", "emit_plots", o.emit_plots);
    if (o.run_id.empty() || o.run_id.find('/') != std::string::npos) {
      fail("outputs.run_id", "must be a nonempty name without '/'");
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, e.what(), "config");
  }
  return parse_config(text);
}

std::string to_json(const RunConfig& config) {
  json j;
  if (config.command) j["command"] = std::string(to_string(*config.command));
  const auto& p = config.params;
  j["params"] = {{"m", p.m}, {"p", p.p}, {"alpha", p.alpha}, {"M", p.M}, {"T", p.T}};
  j["initial"] = initial_json(config.initial);
  j["grid"] = {{"n", config.n}};
  const auto& s = config.stepping;
  j["stepping"] = {{"dt_init", s.dt_init},       {"dt_min", s.dt_min},
                   {"dt_max", s.dt_max},         {"newton_tol", s.newton_tol},
                   {"newton_max_iter", s.newton_max_iter}, {"theta", s.theta}};
  j["schedule"] = config.schedule;
  const auto& o = config.outputs;
  j["outputs"] = {{"directory", o.directory.string()},
                  {"run_id", o.run_id},
                  {"stride", o.stride},
                  {"emit_plots", o.emit_plots}};
  return j.dump(2) + "\n";
}

}  // namespace sdl
