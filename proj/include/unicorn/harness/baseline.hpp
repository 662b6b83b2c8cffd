#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "unicorn/orchestrator/algorithm.hpp"

namespace unicorn::harness {

inline constexpr int kStatisticCount = 16;

/// 16 intensity statistics followed by feature_dim - 16 histogram bins over
/// [0, 1] (values clipped). Statistics: mean, variance, sd, min, max,
/// p5, p10, p25, p50, p75, p90, p95, iqr, skewness, excess kurtosis,
/// mean absolute deviation. Constant input gives zero spread statistics.
std::vector<double> intensity_features(std::vector<double> values, int feature_dim = 64);

/// Tile extent per axis for dense tasks: 8 in-plane, 2 along the slice axis
/// of 3D grids.
std::vector<std::size_t> tile_shape(std::size_t rank);

/// Case-level tasks: statistics over the tissue mask (or the whole grid).
/// Dense tasks (detection, segmentation): statistics per tile.
Representation baseline_extract(const CasePayload& payload, const TaskConfigDocument& config, int feature_dim = 64);

/// Lowercased word and number tokens used for the token-frequency vectors.
std::vector<std::string> report_tokens(const std::string& text);

/// Span rules learned from labelled reports: (cue word, token count,
/// token shape) -> tag. Applied left to right, longest rule first.
class SpanRules {
 public:
  void fit(const std::vector<std::pair<std::string, EntitySpans>>& examples);
  EntitySpans apply(const std::string& text) const;
  std::size_t size() const { return rules_.size(); }

 private:
  // key: cue, token count, shape
  std::map<std::tuple<std::string, std::size_t, std::string>, std::string> rules_;
};

/// Nearest neighbour over token-frequency vectors (cosine, ties to the
/// earliest few-shot report); the neighbour's label becomes the
/// prediction. Entity-span tasks use SpanRules instead.
std::vector<Prediction> baseline_language(const orchestrator::LanguageBatch& batch,
                                          const TaskConfigDocument& config);

/// Picks the candidate line ("- ...") of the task description most
/// similar to the other candidates.
Caption baseline_caption(const VisionWithTaskDescription& payload);

class BaselineAlgorithm : public orchestrator::Algorithm {
 public:
  explicit BaselineAlgorithm(int feature_dim = 64);

  Representation extract(const CasePayload& payload, const TaskConfigDocument& config,
                         const orchestrator::AlgorithmContext& ctx) const override;
  std::vector<Prediction> predict_batch(const orchestrator::LanguageBatch& batch, const TaskConfigDocument& config,
                                        const orchestrator::AlgorithmContext& ctx) const override;
  Prediction predict_case(const VisionWithTaskDescription& payload, const TaskConfigDocument& config,
                          const orchestrator::AlgorithmContext& ctx) const override;

 private:
  int feature_dim_;
};

/// Registers BaselineAlgorithm under the name "baseline".
void register_baseline(int feature_dim = 64);

}  // namespace unicorn::harness
