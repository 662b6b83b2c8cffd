#include "unicorn/metrics/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "unicorn/core/error.hpp"
#include "unicorn/metrics/classification.hpp"

namespace unicorn::metrics {
namespace {

constexpr int kMiss = -1;       // hit nothing: false positive
constexpr int kDuplicate = -2;  // hit only claimed references: ignored

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail("metric", "point matching: coordinate dimensionality differs");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

// Greedy binding of predictions (visited in `order`) to references.
// Returns, per prediction index, the bound reference or kMiss/kDuplicate.
std::vector<int> bind_points(const std::vector<ScoredPoint>& preds, const std::vector<std::size_t>& order,
                             const std::vector<const std::vector<double>*>& refs, const std::vector<double>& radii) {
  std::vector<int> outcome(preds.size(), kMiss);
  std::vector<bool> claimed(refs.size(), false);
  for (std::size_t idx : order) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    bool any_hit = false;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const double d = sq_distance(preds[idx].coord, *refs[r]);
      if (d > radii[r] * radii[r]) continue;
      any_hit = true;
      if (!claimed[r] && d < best_d) {
        best = static_cast<int>(r);
        best_d = d;
      }
    }
    if (best >= 0) {
      claimed[static_cast<std::size_t>(best)] = true;
      outcome[idx] = best;
    } else if (any_hit) {
      outcome[idx] = kDuplicate;
    }
  }
  return outcome;
}

MatchCounts tally(const std::vector<int>& outcome, std::size_t n_refs) {
  MatchCounts c;
  for (int o : outcome) {
    if (o >= 0) ++c.tp;
    else if (o == kMiss) ++c.fp;
  }
  c.fn = n_refs - c.tp;
  return c;
}

std::vector<std::size_t> input_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<std::size_t> confidence_order(const std::vector<ScoredPoint>& pts) {
  auto order = input_order(pts.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pts[a].confidence > pts[b].confidence; });
  return order;
}

void lesion_geometry(const LesionRefs& refs, const HitRadiusRule& rule, std::vector<const std::vector<double>*>& coords,
                     std::vector<double>& radii) {
  coords.clear();
  radii.clear();
  for (const auto& l : refs.lesions) {
    const double r = rule.radius_for(l);
    if (!(r > 0.0)) fail("metric", "hit radius must be positive");
    coords.push_back(&l.coord);
    radii.push_back(r);
  }
}

void check_confidences(const PointSet& ps) {
  for (const auto& p : ps.points)
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) fail("metric", "candidate confidence outside [0,1]");
}

}  // namespace

MatchCounts match_points(const PointSet& preds, const std::vector<std::vector<double>>& refs, double radius) {
  if (!(radius > 0.0)) fail("metric", "match_points: radius must be positive");
  std::vector<const std::vector<double>*> coords;
  for (const auto& r : refs) coords.push_back(&r);
  const std::vector<double> radii(refs.size(), radius);
  return tally(bind_points(preds.points, input_order(preds.points.size()), coords, radii), refs.size());
}

MatchCounts match_points(const PointSet& preds, const LesionRefs& refs, const HitRadiusRule& rule) {
  std::vector<const std::vector<double>*> coords;
  std::vector<double> radii;
  lesion_geometry(refs, rule, coords, radii);
  return tally(bind_points(preds.points, input_order(preds.points.size()), coords, radii), refs.lesions.size());
}

double detection_f1(const MatchCounts& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

FrocResult froc_cpm(const std::vector<PointSet>& per_case_candidates, const std::vector<LesionRefs>& per_case_refs,
                    const FrocConfig& config) {
  if (per_case_candidates.size() != per_case_refs.size()) fail("metric", "FROC: case count mismatch");
  if (config.fp_rates.empty()) fail("metric", "FROC: no fp rates configured");
  for (std::size_t i = 0; i < config.fp_rates.size(); ++i) {
    if (!(config.fp_rates[i] > 0.0)) fail("metric", "FROC: fp rates must be positive");
    if (i > 0 && !(config.fp_rates[i] > config.fp_rates[i - 1])) fail("metric", "FROC: fp rates must increase");
  }

  // Per lesion: highest confidence of any candidate hitting it (-1 if none).
  // Per candidate hitting no lesion: its confidence (a false positive).
  std::vector<double> lesion_best;
  std::vector<double> fp_conf;
  std::vector<double> thresholds;
  std::vector<const std::vector<double>*> coords;
  std::vector<double> radii;
  for (std::size_t c = 0; c < per_case_refs.size(); ++c) {
    check_confidences(per_case_candidates[c]);
    lesion_geometry(per_case_refs[c], config.hit_rule, coords, radii);
    const std::size_t base = lesion_best.size();
    lesion_best.resize(base + coords.size(), -1.0);
    for (const auto& cand : per_case_candidates[c].points) {
      thresholds.push_back(cand.confidence);
      bool hit = false;
      for (std::size_t r = 0; r < coords.size(); ++r) {
        if (sq_distance(cand.coord, *coords[r]) <= radii[r] * radii[r]) {
          hit = true;
          lesion_best[base + r] = std::max(lesion_best[base + r], cand.confidence);
        }
      }
      if (!hit) fp_conf.push_back(cand.confidence);
    }
  }
  if (lesion_best.empty()) fail("metric", "FROC: empty reference set");

  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::sort(lesion_best.begin(), lesion_best.end(), std::greater<>());
  std::sort(fp_conf.begin(), fp_conf.end(), std::greater<>());

  FrocResult result;
  const double n_cases = static_cast<double>(per_case_refs.size());
  const double n_lesions = static_cast<double>(lesion_best.size());
  std::size_t hit_idx = 0, fp_idx = 0;
  for (double t : thresholds) {
    while (hit_idx < lesion_best.size() && lesion_best[hit_idx] >= t) ++hit_idx;
    while (fp_idx < fp_conf.size() && fp_conf[fp_idx] >= t) ++fp_idx;
    result.curve.push_back({static_cast<double>(fp_idx) / n_cases, static_cast<double>(hit_idx) / n_lesions});
  }

  const bool any_tp = !lesion_best.empty() && lesion_best.front() >= 0.0;
  if (!any_tp) return result;  // no true positive anywhere: CPM is 0

  double sum = 0.0;
  for (double target : config.fp_rates) {
    double sens = 0.0;
    for (const auto& pt : result.curve)
      if (pt.fp_per_scan <= target) sens = pt.sensitivity;
    sum += sens;
  }
  result.cpm = sum / static_cast<double>(config.fp_rates.size());
  return result;
}

std::pair<std::vector<double>, std::vector<bool>> label_candidates(const std::vector<PointSet>& lesion_candidates,
                                                                   const std::vector<LesionRefs>& lesion_refs,
                                                                   const HitRadiusRule& rule) {
  if (lesion_candidates.size() != lesion_refs.size()) fail("metric", "detection AP: case count mismatch");
  std::vector<double> scores;
  std::vector<bool> labels;
  std::vector<const std::vector<double>*> coords;
  std::vector<double> radii;
  for (std::size_t c = 0; c < lesion_refs.size(); ++c) {
    const auto& pts = lesion_candidates[c].points;
    check_confidences(lesion_candidates[c]);
    lesion_geometry(lesion_refs[c], rule, coords, radii);
    const auto outcome = bind_points(pts, confidence_order(pts), coords, radii);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (outcome[i] == kDuplicate) continue;
      scores.push_back(pts[i].confidence);
      labels.push_back(outcome[i] >= 0);
    }
  }
  return {std::move(scores), std::move(labels)};
}

double detection_auroc_ap(const std::vector<std::pair<double, bool>>& case_probs,
                          const std::vector<PointSet>& lesion_candidates, const std::vector<LesionRefs>& lesion_refs,
                          const HitRadiusRule& rule) {
  std::vector<double> probs;
  std::vector<bool> positive;
  for (const auto& [p, y] : case_probs) {
    probs.push_back(p);
    positive.push_back(y);
  }
  const double case_auc = auroc(probs, positive);

  std::size_t total_lesions = 0;
  for (const auto& r : lesion_refs) total_lesions += r.lesions.size();
  const auto [scores, labels] = label_candidates(lesion_candidates, lesion_refs, rule);
  const double ap = average_precision(scores, labels, total_lesions);
  return 0.5 * case_auc + 0.5 * ap;
}

}  // namespace unicorn::metrics
