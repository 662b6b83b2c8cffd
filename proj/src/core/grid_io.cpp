#include "unicorn/core/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "unicorn/core/error.hpp"

namespace unicorn {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
std::string format_impl(const Grid<T>& g) {
  check_grid(g, "grid");
  std::ostringstream os;
  os << g.rank();
  for (auto d : g.dims) os << ' ' << d;
  os << '\n';
  for (std::size_t a = 0; a < g.spacing.size(); ++a) os << (a ? " " : "") << format_number(g.spacing[a]);
  os << '\n';
  const std::size_t row = g.dims.back();
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if constexpr (std::is_same_v<T, int>) {
      os << g.values[i];
    } else {
      os << format_number(g.values[i]);
    }
    os << ((i + 1) % row == 0 ? '\n' : ' ');
  }
  return os.str();
}

template <typename T>
Grid<T> parse_impl(const std::string& text) {
  std::istringstream is(text);
  Grid<T> g;
  std::size_t rank = 0;
  if (!(is >> rank) || (rank != 2 && rank != 3)) fail("io", "grid header: rank must be 2 or 3");
  g.dims.resize(rank);
  g.spacing.resize(rank);
  for (auto& d : g.dims)
    if (!(is >> d)) fail("io", "grid header: missing dimension");
  for (auto& s : g.spacing)
    if (!(is >> s)) fail("io", "grid header: missing spacing");
  const std::size_t n = Grid<T>::count(g.dims);
  g.values.reserve(n);
  std::string tok;
  while (is >> tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("io", "grid value '" + tok + "' is not a number");
    if constexpr (std::is_same_v<T, int>) {
      if (v != std::floor(v)) fail("io", "label grid value '" + tok + "' is not an integer");
      g.values.push_back(static_cast<int>(v));
    } else {
      g.values.push_back(v);
    }
  }
  if (g.values.size() != n)
    fail("io", "grid holds " + std::to_string(g.values.size()) + " values, header implies " + std::to_string(n));
  check_grid(g, "grid");
  return g;
}

}  // namespace

std::string format_grid(const Grid<double>& g) { return format_impl(g); }
std::string format_grid(const Grid<int>& g) { return format_impl(g); }
Grid<double> parse_grid(const std::string& text) { return parse_impl<double>(text); }
Grid<int> parse_int_grid(const std::string& text) { return parse_impl<int>(text); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail("io", "cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) fail("io", "write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("io", "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace unicorn
