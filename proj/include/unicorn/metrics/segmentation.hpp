#pragma once

#include <vector>

#include "unicorn/core/grid.hpp"

namespace unicorn::metrics {

struct DiceMode {
  enum class Kind { binary, multiclass_mean };
  Kind kind = Kind::binary;
  std::vector<int> classes;  // foreground classes for multiclass_mean

  static DiceMode binary() { return {}; }
  static DiceMode multiclass_mean(std::vector<int> c) { return {Kind::multiclass_mean, std::move(c)}; }
};

/// Binary mode treats every nonzero label as foreground. Both-empty gives
/// 1.0, per class as well.
double dice(const Grid<int>& pred, const Grid<int>& ref, const DiceMode& mode = DiceMode::binary());

/// Mean over reference instance labels (nonzero) of the per-label binary Dice.
double instance_averaged_dice(const Grid<int>& pred, const Grid<int>& ref);

struct AxisMeasurement {
  double long_axis_mm = 0.0;
  double short_axis_mm = 0.0;
};

/// Long and short axis on the axial slice (axis 0) with the largest lesion
/// area. A 2D mask is treated as a single slice. The long axis is the
/// largest distance between boundary pixel centres; the short axis is the
/// extent of the boundary projected on the perpendicular direction.
AxisMeasurement axis_measurements(const Grid<int>& mask);

struct CompositeWeights {
  double segmentation = 0.888;
  double long_axis = 0.056;
  double short_axis = 0.056;
};

/// 1 - |p - r| / (|p| + |r|): symmetric absolute percentage error on a
/// 0..1 scale, flipped so that higher is better. 1.0 when both are zero.
double axis_agreement(double pred_mm, double ref_mm);

double uls_composite(double segmentation, double long_axis, double short_axis, const CompositeWeights& w = {});

}  // namespace unicorn::metrics
