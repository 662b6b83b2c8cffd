#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unicorn/core/types.hpp"

namespace unicorn::metrics {

enum class KappaWeighting { none, quadratic };

/// Cohen's kappa over `num_categories` labels 0..K-1.
/// Degenerate marginals (zero expected disagreement) give 1.0 when the two
/// lists agree everywhere and throw otherwise.
double cohen_kappa(std::span<const int> preds, std::span<const int> refs, KappaWeighting weighting,
                   int num_categories);

/// Unweighted kappa over the left and right streams concatenated.
double kappa_pooled_pairs(std::span<const PairedLabels> preds, std::span<const PairedLabels> refs,
                          int num_categories);

/// Mann-Whitney AUROC with half credit for ties.
double auroc(std::span<const double> scores, const std::vector<bool>& labels);

/// Step-wise average precision over descending score thresholds. Tied
/// scores form one threshold. `total_positives` overrides the positive
/// count used for recall (positives that never appear among the scores
/// contribute zero recall mass).
double average_precision(std::span<const double> scores, const std::vector<bool>& labels,
                         std::optional<std::size_t> total_positives = std::nullopt);

struct LabelScores {
  std::vector<double> scores;
  std::vector<bool> labels;
};

/// Unweighted mean of per-label AUROC.
double macro_auroc(const std::map<std::string, LabelScores>& per_label);

}  // namespace unicorn::metrics
