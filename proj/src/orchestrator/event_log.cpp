#include "unicorn/orchestrator/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "unicorn/core/error.hpp"
#include "unicorn/core/grid_io.hpp"
#include "unicorn/core/serialization.hpp"

namespace unicorn::orchestrator {

std::string event_to_line(const Event& e) {
  const json j{{"seq", e.seq},
               {"timestamp", e.timestamp},
               {"kind", e.kind},
               {"team_id", e.team_id},
               {"submission_id", e.submission_id},
               {"target", e.target},
               {"payload", e.payload}};
  return j.dump();
}

Event event_from_line(const std::string& line) {
  try {
    const auto j = json::parse(line);
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.timestamp = j.at("timestamp").get<std::uint64_t>();
    e.kind = j.at("kind").get<std::string>();
    e.team_id = j.at("team_id").get<std::string>();
    e.submission_id = j.at("submission_id").get<std::string>();
    e.target = j.at("target").get<std::string>();
    e.payload = j.at("payload");
    return e;
  } catch (const json::exception& ex) {
    fail("io", std::string("corrupt event log line: ") + ex.what());
  }
}

std::string join_targets(const std::vector<LeaderboardTarget>& targets) {
  std::string s;
  for (const auto& t : targets) s += (s.empty() ? "" : "+") + t.to_string();
  return s;
}

std::vector<LeaderboardTarget> split_targets(const std::string& joined) {
  std::vector<LeaderboardTarget> out;
  std::size_t start = 0;
  while (start <= joined.size()) {
    const auto end = joined.find('+', start);
    out.push_back(LeaderboardTarget::parse(joined.substr(start, end == std::string::npos ? std::string::npos : end - start)));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

EventLog::EventLog(fs::path file) : file_(std::move(file)) {
  if (!fs::exists(file_)) return;
  std::ifstream in(file_);
  if (!in) fail("io", "cannot read event log " + file_.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events_.push_back(event_from_line(line));
    if (events_.back().seq != events_.size()) fail("io", "event log sequence gap at line " + std::to_string(events_.size()));
  }
}

const Event& EventLog::append(Event e) {
  e.seq = next_seq();
  e.timestamp = e.seq;
  if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::app);
  out << event_to_line(e) << '\n';
  out.flush();
  if (!out) fail("io", "cannot append to event log " + file_.string());
  events_.push_back(std::move(e));
  return events_.back();
}

std::string board_name(Phase phase, const LeaderboardTarget& target) {
  return std::string(to_string(phase)) + "/" + target.to_string();
}

std::string board_file_name(const std::string& board) {
  std::string s = board;
  std::replace(s.begin(), s.end(), '/', '-');
  return s + ".json";
}

json build_snapshot(const std::vector<Event>& events, const std::string& board) {
  std::vector<scoring::LeaderboardEntry> entries;
  std::map<std::string, json> per_task;
  std::set<std::string> seen;
  LeaderboardTarget target = LeaderboardTarget::parse(board.substr(board.find('/') + 1));
  for (const auto& e : events) {
    if (e.kind != "recorded" || !seen.insert(e.submission_id).second) continue;
    const auto& boards = e.payload.at("boards");
    if (!boards.contains(board)) continue;
    const auto& b = boards.at(board);
    scoring::LeaderboardEntry entry;
    entry.submission_id = e.submission_id;
    entry.team_id = e.team_id;
    entry.target = target;
    entry.score = b.at("aggregate").get<double>();
    entry.timestamp = e.payload.at("submission_timestamp").get<std::uint64_t>();
    entries.push_back(entry);
    per_task[e.submission_id] = b.at("per_task");
  }
  json rows = json::array();
  std::size_t rank = 0;
  for (const auto& entry : scoring::rank_leaderboard(entries)) {
    rows.push_back({{"rank", ++rank},
                    {"submission_id", entry.submission_id},
                    {"team_id", entry.team_id},
                    {"timestamp", entry.timestamp},
                    {"aggregate", entry.score},
                    {"per_task", per_task[entry.submission_id]}});
  }
  return {{"board", board}, {"entries", rows}};
}

std::vector<std::string> boards_in(const std::vector<Event>& events) {
  std::set<std::string> names;
  for (const auto& e : events)
    if (e.kind == "recorded")
      for (const auto& [name, _] : e.payload.at("boards").items()) names.insert(name);
  return {names.begin(), names.end()};
}

std::map<std::string, json> record_and_rank(EventLog& log, const Submission& submission,
                                            const std::map<std::string, BoardScore>& boards,
                                            const fs::path& snapshot_dir) {
  if (submission.status != SubmissionStatus::succeeded)
    fail("invalid_input", "only succeeded submissions are recorded");
  const bool already = std::any_of(log.events().begin(), log.events().end(), [&](const Event& e) {
    return e.kind == "recorded" && e.submission_id == submission.submission_id;
  });
  std::vector<std::string> names;
  if (!already) {
    json payload{{"phase", std::string(to_string(submission.phase))},
                 {"submission_timestamp", submission.timestamp},
                 {"boards", json::object()}};
    for (const auto& [name, score] : boards) {
      json tasks = json::array();
      for (const auto& t : score.per_task)
        tasks.push_back({{"task_id", t.task_id}, {"raw", t.raw}, {"normalized", t.normalized}});
      payload["boards"][name] = {{"aggregate", score.aggregate}, {"per_task", tasks}};
    }
    Event e;
    e.kind = "recorded";
    e.team_id = submission.team_id;
    e.submission_id = submission.submission_id;
    e.target = join_targets(submission.targets);
    e.payload = std::move(payload);
    log.append(std::move(e));
  }
  for (const auto& [name, _] : boards) names.push_back(name);
  std::map<std::string, json> out;
  for (const auto& name : names) {
    out[name] = build_snapshot(log.events(), name);
    write_text_file(snapshot_dir / board_file_name(name), dump_stable(out[name]));
  }
  return out;
}

}  // namespace unicorn::orchestrator
