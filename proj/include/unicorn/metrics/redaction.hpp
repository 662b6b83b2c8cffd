#pragma once

#include <cstddef>

#include "unicorn/core/types.hpp"

namespace unicorn::metrics {

struct RedactionWeights {
  double strict = 0.7;
  double binary = 0.3;
};

/// Character-level confusion counts for one or more documents.
struct RedactionCounts {
  std::size_t strict_tp = 0, strict_fp = 0, strict_fn = 0;
  std::size_t binary_tp = 0, binary_fp = 0, binary_fn = 0;

  RedactionCounts& operator+=(const RedactionCounts& o);
  bool operator==(const RedactionCounts&) const = default;
};

struct RedactionScore {
  double strict = 0.0;
  double binary = 0.0;
  double blended = 0.0;
};

/// Expands spans to per-character tags (earlier predicted span wins on
/// overlap). Strict counts a character as tp only when the predicted tag
/// equals the reference tag; binary ignores tag identity.
RedactionCounts redaction_counts(const EntitySpans& pred, const EntitySpans& ref, std::size_t text_len);

RedactionScore score_redaction(const RedactionCounts& counts, const RedactionWeights& w = {});

double blended_redaction_f1(const EntitySpans& pred, const EntitySpans& ref, std::size_t text_len,
                            const RedactionWeights& w = {});

}  // namespace unicorn::metrics
