#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "unicorn/core/registry.hpp"
#include "unicorn/core/types.hpp"

namespace unicorn::orchestrator {

/// Scratch directory the algorithm may write to during a task run. It
/// lives inside the audited algorithm workspace.
struct AlgorithmContext {
  std::filesystem::path scratch;
};

struct LabeledReport {
  ReportText report;
  ReferenceLabel label;
};

/// Everything a language algorithm sees for one task, delivered at once.
struct LanguageBatch {
  std::vector<LabeledReport> few_shot;
  std::vector<std::string> evaluation_ids;
  std::vector<ReportText> evaluation;
};

/// The submitted model. Receives payloads and the task configuration
/// document only; never case splits or evaluation labels. Calls for
/// different tasks may run concurrently.
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  /// Vision tasks: one call per case.
  virtual Representation extract(const CasePayload& payload, const TaskConfigDocument& config,
                                 const AlgorithmContext& ctx) const = 0;

  /// Language tasks: one call per task, predictions aligned with
  /// batch.evaluation.
  virtual std::vector<Prediction> predict_batch(const LanguageBatch& batch, const TaskConfigDocument& config,
                                                const AlgorithmContext& ctx) const = 0;

  /// Vision-language tasks: one call per case.
  virtual Prediction predict_case(const VisionWithTaskDescription& payload, const TaskConfigDocument& config,
                                  const AlgorithmContext& ctx) const = 0;
};

using AlgorithmFactory = std::function<std::unique_ptr<Algorithm>()>;

void register_algorithm(const std::string& name, AlgorithmFactory factory);
bool has_algorithm(const std::string& name);
std::unique_ptr<Algorithm> make_algorithm(const std::string& name);
std::vector<std::string> list_algorithms();

}  // namespace unicorn::orchestrator
