#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "unicorn/adaptors/adaptors.hpp"
#include "unicorn/core/benchmark_store.hpp"
#include "unicorn/core/serialization.hpp"
#include "unicorn/metrics/caption.hpp"
#include "unicorn/orchestrator/algorithm.hpp"
#include "unicorn/orchestrator/submission.hpp"
#include "unicorn/scoring/scoring.hpp"

namespace unicorn::orchestrator {

struct RunOptions {
  std::filesystem::path workspace;  // per-submission run directory
  double budget_divisor = 60.0;     // seconds = minutes * 60 / divisor
  std::size_t check_cases = 5;
  bool parallel_tasks = true;
  const metrics::TokenEmbedder* embedder = nullptr;  // caption tasks; nullptr = hashed fallback
};

struct TaskRunResult {
  int task_id = 0;
  SubmissionStatus status = SubmissionStatus::failed;
  std::string reason;
  std::string adaptor;  // strategy actually used, vision tasks only
  scoring::TaskScore score;
  std::map<std::string, double> details;
  std::size_t evaluated_cases = 0;
};

struct PipelineResult {
  std::vector<TaskRunResult> tasks;  // task_id ascending

  /// succeeded when every task did; otherwise failed, or timed_out when
  /// the only problems were timeouts.
  SubmissionStatus status() const;
  std::string reason() const;
  std::map<int, double> raw_scores() const;
};

Cohort cohort_for(Phase phase);

/// Task ids covered by the submission's targets.
std::set<int> submission_tasks(const Submission& s, const scoring::TargetMembership& membership);

/// Wall-clock budget for one task run in this phase.
double budget_seconds(const TaskDefinition& task, Phase phase, double divisor);

/// Dense tasks fall back to the matching patch strategy (same k) when the
/// requested strategy cannot serve them.
adaptors::AdaptorSpec adaptor_for_task(const adaptors::AdaptorSpec& requested, const TaskDefinition& task);

/// Two-step evaluation of every task in the submission's targets. The
/// algorithm step sees only files staged under <workspace>/algorithm; the
/// evaluation step reads references from the sequestered store, fits the
/// adaptor on few-shot representations, validates and scores predictions.
/// Tasks run concurrently; results are merged in task order.
PipelineResult run_pipeline(const Submission& submission, const BenchmarkLayout& benchmark,
                            const adaptors::AdaptorSpec& adaptor, const Algorithm& algorithm, const RunOptions& options,
                            const TaskRegistry& registry = load_task_registry(),
                            const scoring::TargetMembership& membership = scoring::TargetMembership());

json pipeline_result_json(const Submission& submission, const PipelineResult& result);

}  // namespace unicorn::orchestrator
