#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "unicorn/core/error.hpp"

namespace unicorn {

/// Dense row-major grid of rank 2 or 3. Axis 0 varies slowest; for 3D
/// grids axis 0 is the axial (slice) axis.
template <typename T>
struct Grid {
  std::vector<std::size_t> dims;
  std::vector<double> spacing;
  std::vector<T> values;

  Grid() = default;
  Grid(std::vector<std::size_t> d, std::vector<double> s, T fill = T{})
      : dims(std::move(d)), spacing(std::move(s)), values(count(dims), fill) {}

  static std::size_t count(const std::vector<std::size_t>& d) {
    if (d.empty()) return 0;
    return std::accumulate(d.begin(), d.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t rank() const { return dims.size(); }
  std::size_t size() const { return values.size(); }

  std::size_t index(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) flat = flat * dims[a] + idx[a];
    return flat;
  }

  std::vector<std::size_t> unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t a = dims.size(); a-- > 0;) {
      idx[a] = flat % dims[a];
      flat /= dims[a];
    }
    return idx;
  }

  T& operator[](std::size_t flat) { return values[flat]; }
  const T& operator[](std::size_t flat) const { return values[flat]; }

  bool same_shape(const std::vector<std::size_t>& other) const { return dims == other; }

  bool operator==(const Grid&) const = default;
};

/// Checks rank, positive dimensions and spacing, and value count.
template <typename T>
void check_grid(const Grid<T>& g, const char* what) {
  if (g.rank() != 2 && g.rank() != 3) fail("invalid_input", std::string(what) + ": grid rank must be 2 or 3");
  if (g.spacing.size() != g.rank()) fail("invalid_input", std::string(what) + ": spacing/rank mismatch");
  for (auto d : g.dims)
    if (d == 0) fail("invalid_input", std::string(what) + ": grid dimensions must be positive");
  for (auto s : g.spacing)
    if (!(s > 0.0)) fail("invalid_input", std::string(what) + ": spacing must be strictly positive");
  if (g.values.size() != Grid<T>::count(g.dims)) fail("invalid_input", std::string(what) + ": value count mismatch");
}

}  // namespace unicorn
