#pragma once

#include <utility>
#include <vector>

#include "unicorn/core/types.hpp"

namespace unicorn::metrics {

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const MatchCounts&) const = default;
};

/// How far a prediction may lie from a reference point and still hit it.
struct HitRadiusRule {
  enum class Kind { fixed_radius, half_equivalent_diameter };
  Kind kind = Kind::half_equivalent_diameter;
  double radius = 0.0;  // used by fixed_radius

  static HitRadiusRule fixed(double r) { return {Kind::fixed_radius, r}; }
  static HitRadiusRule half_diameter() { return {Kind::half_equivalent_diameter, 0.0}; }

  double radius_for(const LesionRef& lesion) const {
    return kind == Kind::fixed_radius ? radius : lesion.equivalent_diameter_mm / 2.0;
  }
};

/// Point matching with the challenge counting rules.
///
/// Predictions are visited in input order; each binds to its nearest
/// unclaimed reference within the radius (ties -> lower reference index)
/// and counts one tp. A prediction that only hits already-claimed
/// references counts nothing, so several predictions on one reference give
/// 1 tp and 0 fp. A prediction that hits nothing is a fp; references left
/// unclaimed are fn, so one prediction covering N references gives 1 tp and
/// N-1 fn.
MatchCounts match_points(const PointSet& preds, const std::vector<std::vector<double>>& refs, double radius);
MatchCounts match_points(const PointSet& preds, const LesionRefs& refs, const HitRadiusRule& rule);

/// 2tp / (2tp + fp + fn); 1.0 when there is nothing to find and nothing found.
double detection_f1(const MatchCounts& counts);

struct FrocConfig {
  std::vector<double> fp_rates{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  HitRadiusRule hit_rule = HitRadiusRule::half_diameter();
};

struct FrocPoint {
  double fp_per_scan = 0.0;
  double sensitivity = 0.0;
  bool operator==(const FrocPoint&) const = default;
};

struct FrocResult {
  double cpm = 0.0;
  std::vector<FrocPoint> curve;  // one point per distinct confidence, descending threshold
};

/// FROC analysis and competition performance metric: mean sensitivity at
/// the configured false-positive-per-scan rates, read off a step function
/// (sensitivity of the largest achieved fp rate <= target, 0 below the first
/// operating point). A candidate is a true positive when it lies within the
/// hit radius of a lesion of its own case; candidates hitting no lesion are
/// false positives.
FrocResult froc_cpm(const std::vector<PointSet>& per_case_candidates, const std::vector<LesionRefs>& per_case_refs,
                    const FrocConfig& config = {});

/// 1/2 case-level AUROC + 1/2 lesion-level AP. Candidates are bound to
/// lesions in descending-confidence order using the match_points rules;
/// bound candidates are positives, candidates hitting nothing are
/// negatives, and duplicates on claimed lesions are dropped. AP recall is
/// relative to the total lesion count.
double detection_auroc_ap(const std::vector<std::pair<double, bool>>& case_probs,
                          const std::vector<PointSet>& lesion_candidates, const std::vector<LesionRefs>& lesion_refs,
                          const HitRadiusRule& rule = HitRadiusRule::half_diameter());

/// Lesion-level (score, is_true_positive) list used by detection_auroc_ap.
std::pair<std::vector<double>, std::vector<bool>> label_candidates(const std::vector<PointSet>& lesion_candidates,
                                                                   const std::vector<LesionRefs>& lesion_refs,
                                                                   const HitRadiusRule& rule);

}  // namespace unicorn::metrics
