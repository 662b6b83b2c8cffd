#pragma once

#include <span>
#include <vector>

namespace unicorn::metrics {

/// Censored concordance index. Higher risk means earlier event.
///
/// Ordered pair (i, j) is comparable when time_i < time_j and subject i had
/// the event; it is concordant when risk_i > risk_j and earns half credit on
/// a risk tie. Two events at the same time with different risks are
/// comparable in both directions (one concordant, one not); every other
/// equal-time pair is skipped.
double concordance_index_censored(std::span<const double> risks, const std::vector<bool>& events,
                                  std::span<const double> times);

}  // namespace unicorn::metrics
