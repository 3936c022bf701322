#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace sdl {

/// Shortest text that reads back to the same double: 17 significant digits.
std::string format_double(double v);

/// One CSV row "t,u_0,...,u_{n-1}" without the trailing newline.
std::string csv_row(double t, std::span<const double> values);

/// Header row "t,x_0,...,x_{n-1}" for n nodes.
std::string csv_header(std::size_t n);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace sdl
