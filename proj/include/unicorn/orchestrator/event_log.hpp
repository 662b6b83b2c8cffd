#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "unicorn/orchestrator/submission.hpp"

namespace unicorn::orchestrator {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// One line of the append-only log.
struct Event {
  std::uint64_t seq = 0;
  std::uint64_t timestamp = 0;  // logical clock; equals seq
  std::string kind;             // submitted, rejected, completed, recorded
  std::string team_id;
  std::string submission_id;
  std::string target;  // targets joined with '+'
  json payload = json::object();
};

std::string event_to_line(const Event& e);
Event event_from_line(const std::string& line);

std::string join_targets(const std::vector<LeaderboardTarget>& targets);
std::vector<LeaderboardTarget> split_targets(const std::string& joined);

/// Newline-delimited event file. Opening reads every existing line.
class EventLog {
 public:
  explicit EventLog(fs::path file);

  const std::vector<Event>& events() const { return events_; }
  std::uint64_t next_seq() const { return events_.size() + 1; }

  /// Assigns seq and timestamp, writes and flushes the line.
  const Event& append(Event e);

  const fs::path& path() const { return file_; }

 private:
  fs::path file_;
  std::vector<Event> events_;
};

/// Board name "<phase>/<target>", e.g. "validation/all_tasks".
std::string board_name(Phase phase, const LeaderboardTarget& target);
std::string board_file_name(const std::string& board);

struct BoardScore {
  double aggregate = 0.0;
  std::vector<scoring::TaskScore> per_task;
};

/// Leaderboard snapshot as a pure fold over the log:
/// {board, entries: [{rank, submission_id, team_id, timestamp, aggregate, per_task}]}.
json build_snapshot(const std::vector<Event>& events, const std::string& board);
std::vector<std::string> boards_in(const std::vector<Event>& events);

/// Appends a "recorded" event for a succeeded submission unless one exists
/// for that submission id, then rewrites the affected snapshot files.
std::map<std::string, json> record_and_rank(EventLog& log, const Submission& submission,
                                            const std::map<std::string, BoardScore>& boards,
                                            const fs::path& snapshot_dir);

}  // namespace unicorn::orchestrator
