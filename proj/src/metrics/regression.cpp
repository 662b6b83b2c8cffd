#include "unicorn/metrics/regression.hpp"

#include <algorithm>
#include <cmath>

#include "unicorn/core/error.hpp"

namespace unicorn::metrics {

double rsmapes_case_error(double pred, double ref, double epsilon) {
  const double excess = std::max(0.0, std::abs(pred - ref) - epsilon);
  const double scale = (std::abs(pred) + std::abs(ref)) / 2.0 + epsilon;
  return std::clamp(excess / scale, 0.0, 1.0);
}

double rsmapes(std::span<const double> preds, std::span<const double> refs, double epsilon) {
  if (preds.size() != refs.size()) fail("metric", "RSMAPES: length mismatch");
  if (preds.empty()) fail("metric", "RSMAPES: empty input");
  if (!(epsilon > 0.0)) fail("metric", "RSMAPES: epsilon must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!std::isfinite(preds[i]) || !std::isfinite(refs[i])) fail("metric", "RSMAPES: non-finite value");
    if (refs[i] < 0.0) fail("metric", "RSMAPES: reference values must be >= 0");
    sum += rsmapes_case_error(preds[i], refs[i], epsilon);
  }
  return 1.0 - sum / static_cast<double>(preds.size());
}

double rsmapes_multi(const std::vector<RsmapesVariable>& per_variable) {
  if (per_variable.empty()) fail("metric", "RSMAPES: no variables");
  double sum = 0.0;
  for (const auto& v : per_variable) sum += rsmapes(v.preds, v.refs, v.epsilon);
  return sum / static_cast<double>(per_variable.size());
}

}  // namespace unicorn::metrics
