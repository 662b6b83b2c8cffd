#pragma once

#include <map>
#include <string>
#include <vector>

#include "unicorn/core/types.hpp"
#include "unicorn/metrics/caption.hpp"

namespace unicorn::metrics {

struct TaskEvaluation {
  double raw_score = 0.0;
  std::map<std::string, double> details;  // sub-scores, counts
};

/// Scores one task from its evaluation items (payload + reference) and the
/// aligned predictions. The task's metric family picks the computation.
/// `embedder` is only used for caption tasks; nullptr selects the hashed
/// fallback.
TaskEvaluation evaluate_task(const TaskDefinition& task, const std::vector<ArchiveItem>& items,
                             const std::vector<Prediction>& preds, const TokenEmbedder* embedder = nullptr);

}  // namespace unicorn::metrics
