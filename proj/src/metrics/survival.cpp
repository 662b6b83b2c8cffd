#include "unicorn/metrics/survival.hpp"

#include <cmath>
#include <cstdint>

#include "unicorn/core/error.hpp"
#include "unicorn/kernels/kernels.hpp"

namespace unicorn::metrics {

double concordance_index_censored(std::span<const double> risks, const std::vector<bool>& events,
                                  std::span<const double> times) {
  if (risks.size() != events.size() || risks.size() != times.size()) fail("metric", "c-index: length mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) fail("metric", "c-index: times must be finite and >= 0");
    if (!std::isfinite(risks[i])) fail("metric", "c-index: non-finite risk");
  }
  std::vector<std::uint8_t> ev(events.begin(), events.end());
  const auto counts = kernels::concordance_pairs(risks, ev, times);
  if (counts.comparable == 0) fail("metric", "c-index: no comparable pairs");
  return static_cast<double>(counts.concordant_halves) / (2.0 * static_cast<double>(counts.comparable));
}

}  // namespace unicorn::metrics
