#pragma once

#include <filesystem>
#include <string>

#include "unicorn/core/grid.hpp"

namespace unicorn {

// Dense-grid text format:
//   line 1: rank d0 d1 [d2]
//   line 2: spacing per axis
//   rest:   whitespace-separated values, row-major, one grid row per line
std::string format_grid(const Grid<double>& g);
std::string format_grid(const Grid<int>& g);
Grid<double> parse_grid(const std::string& text);
Grid<int> parse_int_grid(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

}  // namespace unicorn
