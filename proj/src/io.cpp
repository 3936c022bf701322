#include "sdl/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sdl/error.hpp"

namespace sdl {

std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string csv_row(double t, std::span<const double> values) {
  std::string row = format_double(t);
  row.reserve(values.size() * 24 + row.size());
  for (double v : values) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

std::string csv_header(std::size_t n) {
  std::string row = "t";
  for (std::size_t i = 0; i < n; ++i) {
    row += ",x_";
    row += std::to_string(i);
  }
  return row;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sdl
