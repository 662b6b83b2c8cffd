#include "unicorn/metrics/classification.hpp"

#include <algorithm>
#include <numeric>

#include "unicorn/core/error.hpp"
#include "unicorn/kernels/kernels.hpp"

namespace unicorn::metrics {

double cohen_kappa(std::span<const int> preds, std::span<const int> refs, KappaWeighting weighting,
                   int num_categories) {
  if (preds.size() != refs.size()) fail("metric", "kappa: length mismatch");
  if (preds.empty()) fail("metric", "kappa: empty input");
  if (num_categories < 2) fail("metric", "kappa: at least two categories required");
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] < 0 || preds[i] >= num_categories || refs[i] < 0 || refs[i] >= num_categories)
      fail("metric", "kappa: label outside 0.." + std::to_string(num_categories - 1));

  const auto k = static_cast<std::size_t>(num_categories);
  const auto observed = kernels::label_cooccurrence(preds, refs, num_categories);
  std::vector<double> row(k, 0.0), col(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      row[i] += static_cast<double>(observed[i * k + j]);
      col[j] += static_cast<double>(observed[i * k + j]);
    }

  const double n = static_cast<double>(preds.size());
  double weighted_observed = 0.0;
  double weighted_expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double w = 0.0;
      if (weighting == KappaWeighting::none) {
        w = i == j ? 0.0 : 1.0;
      } else {
        const double d = (static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(k - 1);
        w = d * d;
      }
      weighted_observed += w * static_cast<double>(observed[i * k + j]) / n;
      weighted_expected += w * (row[i] / n) * (col[j] / n);
    }
  }
  if (weighted_expected == 0.0) {
    if (std::equal(preds.begin(), preds.end(), refs.begin())) return 1.0;
    fail("metric", "kappa: degenerate marginals");
  }
  return 1.0 - weighted_observed / weighted_expected;
}

double kappa_pooled_pairs(std::span<const PairedLabels> preds, std::span<const PairedLabels> refs,
                          int num_categories) {
  if (preds.size() != refs.size()) fail("metric", "pooled kappa: length mismatch");
  std::vector<int> p, r;
  p.reserve(2 * preds.size());
  r.reserve(2 * refs.size());
  for (const auto& x : preds) p.push_back(x.left);
  for (const auto& x : preds) p.push_back(x.right);
  for (const auto& x : refs) r.push_back(x.left);
  for (const auto& x : refs) r.push_back(x.right);
  return cohen_kappa(p, r, KappaWeighting::none, num_categories);
}

double auroc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) fail("metric", "AUROC: length mismatch");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) fail("metric", "AUROC undefined: labels contain a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]]) positive_rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double average_precision(std::span<const double> scores, const std::vector<bool>& labels,
                         std::optional<std::size_t> total_positives) {
  if (scores.size() != labels.size()) fail("metric", "AP: length mismatch");
  const auto seen = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t positives = total_positives.value_or(seen);
  if (positives < seen) fail("metric", "AP: total positives below labelled positives");
  if (positives == 0) fail("metric", "AP undefined: no positives");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double macro_auroc(const std::map<std::string, LabelScores>& per_label) {
  if (per_label.empty()) fail("metric", "macro AUROC: no labels");
  double sum = 0.0;
  for (const auto& [name, ls] : per_label) {
    try {
      sum += auroc(ls.scores, ls.labels);
    } catch (const Error& e) {
      fail("metric", "macro AUROC: label '" + name + "': " + e.what());
    }
  }
  return sum / static_cast<double>(per_label.size());
}

}  // namespace unicorn::metrics
