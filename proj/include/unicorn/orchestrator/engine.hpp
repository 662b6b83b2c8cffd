#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "unicorn/orchestrator/audit.hpp"
#include "unicorn/orchestrator/event_log.hpp"
#include "unicorn/orchestrator/pipeline.hpp"

namespace unicorn::orchestrator {

/// Persistent challenge state under one directory:
///   events.ndjson            append-only log (the source of truth)
///   leaderboards/<board>.json snapshots derived from the log
///   runs/<submission_id>/     run workspaces
/// Opening the engine replays the log to rebuild the quota ledger.
class Engine {
 public:
  explicit Engine(std::filesystem::path state_dir, const TaskRegistry& registry = load_task_registry(),
                  scoring::TargetMembership membership = scoring::TargetMembership());

  struct Outcome {
    Submission submission;
    PipelineResult result;
    AuditReport audit;
    std::map<std::string, json> snapshots;  // boards updated by this run
  };

  /// Submits, runs, audits, completes and records. A rejected submission
  /// throws Error with category "quota" or "phase" after logging it.
  Outcome run(const std::string& team_id, Phase phase, const std::vector<LeaderboardTarget>& targets,
              const std::string& algorithm_ref, const BenchmarkLayout& benchmark,
              const adaptors::AdaptorSpec& adaptor, RunOptions options = {});

  const QuotaLedger& ledger() const { return ledger_; }
  const EventLog& log() const { return log_; }

  /// Snapshot rebuilt from the log; empty entry list for unknown boards.
  json leaderboard(const std::string& board) const;
  std::vector<std::string> boards() const;

  /// Board scores a succeeded submission posts. An all_tasks test result is
  /// also posted to the three combined test boards.
  std::map<std::string, BoardScore> board_scores(const Submission& s, const PipelineResult& r) const;

  /// Recomputes task and aggregate scores of a succeeded submission from
  /// the predictions stored in its run workspace.
  json score_submission(const std::string& submission_id, const BenchmarkLayout& benchmark,
                        const metrics::TokenEmbedder* embedder = nullptr) const;

  const std::filesystem::path& state_dir() const { return state_dir_; }
  std::filesystem::path run_dir(const std::string& submission_id) const;

 private:
  void replay();

  std::filesystem::path state_dir_;
  const TaskRegistry* registry_;
  scoring::TargetMembership membership_;
  QuotaLedger ledger_;
  EventLog log_;
};

}  // namespace unicorn::orchestrator
