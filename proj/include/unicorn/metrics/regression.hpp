#pragma once

#include <span>
#include <vector>

namespace unicorn::metrics {

/// Per-case RSMAPES error:
///   max(0, |p - r| - eps) / ((|p| + |r|) / 2 + eps), clipped to [0, 1].
double rsmapes_case_error(double pred, double ref, double epsilon);

/// 1 - mean per-case error. Higher is better; differences within the
/// tolerance cost nothing.
double rsmapes(std::span<const double> preds, std::span<const double> refs, double epsilon);

struct RsmapesVariable {
  std::vector<double> preds;
  std::vector<double> refs;
  double epsilon = 1.0;
};

/// Unweighted mean of per-variable RSMAPES.
double rsmapes_multi(const std::vector<RsmapesVariable>& per_variable);

}  // namespace unicorn::metrics
