#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "unicorn/core/registry.hpp"
#include "unicorn/scoring/scoring.hpp"

namespace unicorn::orchestrator {

using scoring::LeaderboardTarget;

enum class Phase { check, validation, test };
enum class SubmissionStatus { pending, running, succeeded, failed, timed_out };

std::string_view to_string(Phase p);
std::string_view to_string(SubmissionStatus s);
Phase parse_phase(std::string_view s);
SubmissionStatus parse_status(std::string_view s);

struct Submission {
  std::string submission_id;
  std::string team_id;
  Phase phase = Phase::check;
  std::vector<LeaderboardTarget> targets;  // one, except test submissions to several combined boards
  std::string algorithm_ref;
  std::uint64_t timestamp = 0;  // logical, strictly increasing
  SubmissionStatus status = SubmissionStatus::pending;
  std::string reason;
};

struct SubmitDecision {
  bool accepted = false;
  Submission submission;  // id and timestamp filled when accepted
  std::string category;   // "quota" or "phase" when rejected
  std::string reason;
};

/// Phase gating and quota accounting.
///
/// Check submissions are unlimited. Validation and test submissions need a
/// succeeded check on every target first. Validation quotas count succeeded
/// runs plus runs in flight: 3 per task-specific board, 2 per combined
/// board, 1 for all_tasks. A team gets one test submission whose target is
/// all_tasks or a set of combined boards; a failed run frees the slot.
class QuotaLedger {
 public:
  static constexpr int kTaskSpecificQuota = 3;
  static constexpr int kCombinedQuota = 2;
  static constexpr int kAllTasksQuota = 1;

  explicit QuotaLedger(const TaskRegistry& registry = load_task_registry()) : registry_(&registry) {}

  static int validation_quota(const LeaderboardTarget& t);

  /// `timestamp` must exceed every earlier one. Accepted submissions get
  /// id "sub-<timestamp>".
  SubmitDecision submit(const std::string& team_id, Phase phase, std::vector<LeaderboardTarget> targets,
                        const std::string& algorithm_ref, std::uint64_t timestamp);

  /// Final status of an accepted submission. Failed and timed-out runs
  /// give back their reservation.
  void complete(const std::string& submission_id, SubmissionStatus status, const std::string& reason = {});

  const Submission& get(const std::string& submission_id) const;
  const std::vector<Submission>& history() const { return history_; }

  bool check_passed(const std::string& team, const LeaderboardTarget& target) const;
  int validation_used(const std::string& team, const LeaderboardTarget& target) const;
  bool test_slot_taken(const std::string& team) const;

  /// Re-derives every ledger invariant from the submission history.
  std::vector<std::string> invariant_violations() const;

 private:
  using Key = std::pair<std::string, LeaderboardTarget>;

  const TaskRegistry* registry_;
  std::uint64_t last_timestamp_ = 0;
  std::vector<Submission> history_;
  std::map<std::string, std::size_t> by_id_;
  std::set<Key> check_passed_;
  std::map<Key, int> validation_used_;
  std::map<std::string, std::string> test_slot_;  // team -> submission id holding it
};

}  // namespace unicorn::orchestrator
