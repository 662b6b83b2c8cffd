#include "unicorn/metrics/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "unicorn/core/error.hpp"
#include "unicorn/kernels/kernels.hpp"

namespace unicorn::metrics {
namespace {

void check_pair(const Grid<int>& pred, const Grid<int>& ref) {
  if (pred.dims != ref.dims) fail("metric", "Dice: mask shape mismatch");
  if (pred.values.size() != ref.values.size()) fail("metric", "Dice: mask size mismatch");
}

int label_count(const Grid<int>& a, const Grid<int>& b) {
  int mx = 0;
  for (int v : a.values) {
    if (v < 0) fail("metric", "negative mask label");
    mx = std::max(mx, v);
  }
  for (int v : b.values) {
    if (v < 0) fail("metric", "negative mask label");
    mx = std::max(mx, v);
  }
  return mx + 1;
}

// Dice of label `l` from the joint histogram (pred-major).
double dice_from_counts(const std::vector<std::uint64_t>& c, std::size_t n, std::size_t l) {
  std::uint64_t p = 0, r = 0;
  for (std::size_t k = 0; k < n; ++k) {
    p += c[l * n + k];
    r += c[k * n + l];
  }
  if (p + r == 0) return 1.0;
  return 2.0 * static_cast<double>(c[l * n + l]) / static_cast<double>(p + r);
}

}  // namespace

double dice(const Grid<int>& pred, const Grid<int>& ref, const DiceMode& mode) {
  check_pair(pred, ref);
  if (mode.kind == DiceMode::Kind::binary) {
    std::vector<int> p(pred.values.size()), r(ref.values.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = pred.values[i] != 0;
      r[i] = ref.values[i] != 0;
    }
    return dice_from_counts(kernels::label_cooccurrence(p, r, 2), 2, 1);
  }
  if (mode.classes.empty()) fail("metric", "Dice: no foreground classes declared");
  int n = label_count(pred, ref);
  for (int c : mode.classes) {
    if (c < 0) fail("metric", "Dice: negative class");
    n = std::max(n, c + 1);
  }
  const auto counts = kernels::label_cooccurrence(pred.values, ref.values, n);
  double sum = 0.0;
  for (int c : mode.classes) sum += dice_from_counts(counts, static_cast<std::size_t>(n), static_cast<std::size_t>(c));
  return sum / static_cast<double>(mode.classes.size());
}

double instance_averaged_dice(const Grid<int>& pred, const Grid<int>& ref) {
  check_pair(pred, ref);
  const int n = label_count(pred, ref);
  const auto counts = kernels::label_cooccurrence(pred.values, ref.values, n);
  const auto un = static_cast<std::size_t>(n);
  double sum = 0.0;
  std::size_t instances = 0;
  for (std::size_t l = 1; l < un; ++l) {
    std::uint64_t in_ref = 0;
    for (std::size_t k = 0; k < un; ++k) in_ref += counts[k * un + l];
    if (in_ref == 0) continue;
    sum += dice_from_counts(counts, un, l);
    ++instances;
  }
  if (instances == 0) fail("metric", "instance Dice: reference has no instances");
  return sum / static_cast<double>(instances);
}

AxisMeasurement axis_measurements(const Grid<int>& mask) {
  check_grid(mask, "axis measurement mask");
  const bool volumetric = mask.rank() == 3;
  const std::size_t slices = volumetric ? mask.dims[0] : 1;
  const std::size_t rows = mask.dims[volumetric ? 1 : 0];
  const std::size_t cols = mask.dims[volumetric ? 2 : 1];
  const double sy = mask.spacing[volumetric ? 1 : 0];
  const double sx = mask.spacing[volumetric ? 2 : 1];
  const std::size_t plane = rows * cols;

  std::size_t best_slice = 0, best_area = 0;
  for (std::size_t z = 0; z < slices; ++z) {
    const auto first = mask.values.begin() + static_cast<long>(z * plane);
    const auto area = static_cast<std::size_t>(std::count_if(first, first + static_cast<long>(plane), [](int v) { return v != 0; }));
    if (area > best_area) {
      best_area = area;
      best_slice = z;
    }
  }
  if (best_area == 0) fail("metric", "axis measurement: empty mask");

  const int* s = mask.values.data() + best_slice * plane;
  auto fg = [&](long y, long x) {
    if (y < 0 || x < 0 || y >= static_cast<long>(rows) || x >= static_cast<long>(cols)) return false;
    return s[static_cast<std::size_t>(y) * cols + static_cast<std::size_t>(x)] != 0;
  };
  std::vector<std::pair<double, double>> boundary;  // (y_mm, x_mm), row-major order
  for (long y = 0; y < static_cast<long>(rows); ++y)
    for (long x = 0; x < static_cast<long>(cols); ++x)
      if (fg(y, x) && !(fg(y - 1, x) && fg(y + 1, x) && fg(y, x - 1) && fg(y, x + 1)))
        boundary.emplace_back(static_cast<double>(y) * sy, static_cast<double>(x) * sx);

  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    for (std::size_t j = i + 1; j < boundary.size(); ++j) {
      const double dy = boundary[j].first - boundary[i].first;
      const double dx = boundary[j].second - boundary[i].second;
      const double d = dy * dy + dx * dx;
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  AxisMeasurement m;
  if (best == 0.0) return m;
  m.long_axis_mm = std::sqrt(best);
  const double uy = (boundary[bj].first - boundary[bi].first) / m.long_axis_mm;
  const double ux = (boundary[bj].second - boundary[bi].second) / m.long_axis_mm;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& [y, x] : boundary) {
    const double proj = -ux * y + uy * x;
    if (first) {
      lo = hi = proj;
      first = false;
    } else {
      lo = std::min(lo, proj);
      hi = std::max(hi, proj);
    }
  }
  m.short_axis_mm = hi - lo;
  return m;
}

double axis_agreement(double pred_mm, double ref_mm) {
  const double denom = std::abs(pred_mm) + std::abs(ref_mm);
  if (denom == 0.0) return 1.0;
  return 1.0 - std::abs(pred_mm - ref_mm) / denom;
}

double uls_composite(double segmentation, double long_axis, double short_axis, const CompositeWeights& w) {
  return w.segmentation * segmentation + w.long_axis * long_axis + w.short_axis * short_axis;
}

}  // namespace unicorn::metrics
