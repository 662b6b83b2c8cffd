#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "unicorn/core/registry.hpp"

namespace unicorn::scoring {

struct TaskScore {
  int task_id = 0;
  double raw = 0.0;         // S_n
  double normalized = 0.0;  // t_n
  bool operator==(const TaskScore&) const = default;
};

/// t_n = (S_n - s_ref) / (s_max - s_ref). Not clipped: below-reference
/// results come out negative.
TaskScore normalize_task_score(const TaskDefinition& task, double raw);

struct LeaderboardTarget {
  enum class Kind { task_specific, pathology_vision, radiology_vision, language, all_tasks };
  Kind kind = Kind::all_tasks;
  int task_id = 0;  // task_specific only

  static LeaderboardTarget task(int id) { return {Kind::task_specific, id}; }
  static LeaderboardTarget named(Kind k) { return {k, 0}; }

  bool combined() const { return kind != Kind::task_specific && kind != Kind::all_tasks; }
  auto operator<=>(const LeaderboardTarget&) const = default;

  /// "task_7", "pathology_vision", "radiology_vision", "language", "all_tasks"
  std::string to_string() const;
  static LeaderboardTarget parse(std::string_view s);
};

/// Task sets behind the leaderboard targets. Task-specific targets always
/// map to their single task; the combined sets are configuration.
class TargetMembership {
 public:
  TargetMembership();  // the built-in sets
  explicit TargetMembership(std::map<LeaderboardTarget::Kind, std::set<int>> combined);

  std::set<int> tasks(const LeaderboardTarget& target) const;

  std::string to_text() const;
  static TargetMembership parse(std::string_view text);

 private:
  std::map<LeaderboardTarget::Kind, std::set<int>> sets_;
};

struct AggregateScore {
  LeaderboardTarget target;
  double value = 0.0;  // S_UNICORN over the target's task set
  std::vector<TaskScore> members;
};

/// Mean of normalized scores over exactly the target's tasks.
AggregateScore unicorn_score(const std::map<int, double>& raw_scores, const LeaderboardTarget& target,
                             const TaskRegistry& registry = load_task_registry(),
                             const TargetMembership& membership = TargetMembership());

struct LeaderboardEntry {
  std::string submission_id;
  std::string team_id;
  LeaderboardTarget target;
  double score = 0.0;
  std::uint64_t timestamp = 0;
  bool operator==(const LeaderboardEntry&) const = default;
};

/// Score descending, then earlier timestamp, then submission id.
std::vector<LeaderboardEntry> rank_leaderboard(std::vector<LeaderboardEntry> entries);

/// Audit record: raw, normalized and constants per task, plus the aggregate.
nlohmann::json score_report(const AggregateScore& aggregate, const TaskRegistry& registry = load_task_registry());

}  // namespace unicorn::scoring
