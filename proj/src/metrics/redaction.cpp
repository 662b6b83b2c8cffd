#include "unicorn/metrics/redaction.hpp"

#include <vector>

#include "unicorn/core/error.hpp"

namespace unicorn::metrics {
namespace {

// Tag index per character, 0 = untagged. Tags are interned in `names`.
std::vector<std::size_t> expand(const EntitySpans& spans, std::size_t text_len, std::vector<std::string>& names,
                                bool allow_overlap) {
  std::vector<std::size_t> tags(text_len, 0);
  for (const auto& s : spans.spans) {
    if (s.end <= s.start || s.end > text_len) fail("metric", "redaction F1: span out of bounds");
    std::size_t id = 0;
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == s.tag) id = k + 1;
    if (id == 0) {
      names.push_back(s.tag);
      id = names.size();
    }
    for (std::size_t c = s.start; c < s.end; ++c) {
      if (tags[c] != 0) {
        if (!allow_overlap) fail("metric", "redaction F1: reference spans overlap");
        continue;  // earlier span wins
      }
      tags[c] = id;
    }
  }
  return tags;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

RedactionCounts& RedactionCounts::operator+=(const RedactionCounts& o) {
  strict_tp += o.strict_tp;
  strict_fp += o.strict_fp;
  strict_fn += o.strict_fn;
  binary_tp += o.binary_tp;
  binary_fp += o.binary_fp;
  binary_fn += o.binary_fn;
  return *this;
}

RedactionCounts redaction_counts(const EntitySpans& pred, const EntitySpans& ref, std::size_t text_len) {
  if (text_len == 0) fail("metric", "redaction F1: text length must be positive");
  std::vector<std::string> names;
  const auto r = expand(ref, text_len, names, false);
  const auto p = expand(pred, text_len, names, true);
  RedactionCounts c;
  for (std::size_t i = 0; i < text_len; ++i) {
    const bool pt = p[i] != 0, rt = r[i] != 0;
    if (pt && rt) {
      ++c.binary_tp;
      if (p[i] == r[i]) {
        ++c.strict_tp;
      } else {
        ++c.strict_fp;
        ++c.strict_fn;
      }
    } else if (pt) {
      ++c.binary_fp;
      ++c.strict_fp;
    } else if (rt) {
      ++c.binary_fn;
      ++c.strict_fn;
    }
  }
  return c;
}

RedactionScore score_redaction(const RedactionCounts& c, const RedactionWeights& w) {
  RedactionScore s;
  s.strict = f1(c.strict_tp, c.strict_fp, c.strict_fn);
  s.binary = f1(c.binary_tp, c.binary_fp, c.binary_fn);
  s.blended = w.strict * s.strict + w.binary * s.binary;
  return s;
}

double blended_redaction_f1(const EntitySpans& pred, const EntitySpans& ref, std::size_t text_len,
                            const RedactionWeights& w) {
  return score_redaction(redaction_counts(pred, ref, text_len), w).blended;
}

}  // namespace unicorn::metrics
