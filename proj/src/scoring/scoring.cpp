#include "unicorn/scoring/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "unicorn/core/error.hpp"

namespace unicorn::scoring {
namespace {

using json = nlohmann::json;
using Kind = LeaderboardTarget::Kind;

constexpr std::array<std::pair<Kind, std::string_view>, 4> kNamed{{{Kind::pathology_vision, "pathology_vision"},
                                                                    {Kind::radiology_vision, "radiology_vision"},
                                                                    {Kind::language, "language"},
                                                                    {Kind::all_tasks, "all_tasks"}}};

std::string id_list(const std::vector<int>& ids) {
  std::string s;
  for (int id : ids) s += (s.empty() ? "" : ", ") + std::to_string(id);
  return s;
}

}  // namespace

TaskScore normalize_task_score(const TaskDefinition& task, double raw) {
  if (!std::isfinite(raw)) fail("invalid_input", "task " + std::to_string(task.task_id) + ": raw score is not finite");
  const auto& n = task.norm;
  if (!(n.s_max > n.s_ref)) fail("config", "task " + std::to_string(task.task_id) + ": s_max must exceed s_ref");
  return {task.task_id, raw, (raw - n.s_ref) / (n.s_max - n.s_ref)};
}

std::string LeaderboardTarget::to_string() const {
  if (kind == Kind::task_specific) return "task_" + std::to_string(task_id);
  for (const auto& [k, name] : kNamed)
    if (k == kind) return std::string(name);
  return "unknown";
}

LeaderboardTarget LeaderboardTarget::parse(std::string_view s) {
  for (const auto& [k, name] : kNamed)
    if (s == name) return {k, 0};
  if (s.substr(0, 5) == "task_" && s.size() > 5) {
    int id = 0;
    for (char c : s.substr(5)) {
      if (c < '0' || c > '9') fail("invalid_input", "unknown leaderboard target '" + std::string(s) + "'");
      id = id * 10 + (c - '0');
      if (id > 1000000) fail("invalid_input", "task id too large");
    }
    return task(id);
  }
  fail("invalid_input", "unknown leaderboard target '" + std::string(s) + "'");
}

TargetMembership::TargetMembership() {
  sets_[Kind::pathology_vision] = {1, 3, 4, 5, 8, 9};
  sets_[Kind::radiology_vision] = {2, 6, 7, 10, 11};
  sets_[Kind::language] = {12, 13, 14, 15, 16, 17, 18, 19};
  std::set<int> all;
  for (int i = 1; i <= 20; ++i) all.insert(i);
  sets_[Kind::all_tasks] = all;
}

TargetMembership::TargetMembership(std::map<Kind, std::set<int>> combined) : sets_(std::move(combined)) {
  for (const auto& [k, name] : kNamed)
    if (!sets_.count(k) || sets_[k].empty()) fail("config", "membership for " + std::string(name) + " is missing");
  if (sets_.count(Kind::task_specific)) fail("config", "task-specific targets have fixed membership");
}

std::set<int> TargetMembership::tasks(const LeaderboardTarget& target) const {
  if (target.kind == Kind::task_specific) return {target.task_id};
  return sets_.at(target.kind);
}

std::string TargetMembership::to_text() const {
  json j = json::object();
  for (const auto& [k, name] : kNamed) j[std::string(name)] = sets_.at(k);
  return j.dump(2) + "\n";
}

TargetMembership TargetMembership::parse(std::string_view text) {
  std::map<Kind, std::set<int>> sets;
  try {
    const auto j = json::parse(text);
    for (const auto& [k, name] : kNamed)
      if (j.contains(std::string(name))) sets[k] = j.at(std::string(name)).get<std::set<int>>();
  } catch (const json::exception& e) {
    fail("config", std::string("malformed membership document: ") + e.what());
  }
  return TargetMembership(std::move(sets));
}

AggregateScore unicorn_score(const std::map<int, double>& raw_scores, const LeaderboardTarget& target,
                             const TaskRegistry& registry, const TargetMembership& membership) {
  const auto want = membership.tasks(target);
  std::vector<int> missing, extra;
  for (int id : want)
    if (!raw_scores.count(id)) missing.push_back(id);
  for (const auto& kv : raw_scores)
    if (!want.count(kv.first)) extra.push_back(kv.first);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "score set does not match " + target.to_string() + ":";
    if (!missing.empty()) msg += " missing tasks [" + id_list(missing) + "]";
    if (!extra.empty()) msg += " extra tasks [" + id_list(extra) + "]";
    fail("invalid_input", msg);
  }
  AggregateScore agg;
  agg.target = target;
  double sum = 0.0;
  for (const auto& [id, raw] : raw_scores) {
    agg.members.push_back(normalize_task_score(registry.at(id), raw));
    sum += agg.members.back().normalized;
  }
  agg.value = sum / static_cast<double>(agg.members.size());
  return agg;
}

std::vector<LeaderboardEntry> rank_leaderboard(std::vector<LeaderboardEntry> entries) {
  for (const auto& e : entries) {
    if (e.target != entries.front().target) fail("invalid_input", "leaderboard entries mix targets");
    if (!std::isfinite(e.score)) fail("invalid_input", "leaderboard score is not finite");
  }
  std::sort(entries.begin(), entries.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.submission_id < b.submission_id;
  });
  return entries;
}

json score_report(const AggregateScore& aggregate, const TaskRegistry& registry) {
  json tasks = json::array();
  for (const auto& m : aggregate.members) {
    const auto& t = registry.at(m.task_id);
    tasks.push_back({{"task_id", m.task_id},
                     {"metric", t.metric_label},
                     {"raw", m.raw},
                     {"normalized", m.normalized},
                     {"s_ref", t.norm.s_ref},
                     {"s_max", t.norm.s_max}});
  }
  return {{"target", aggregate.target.to_string()}, {"aggregate", aggregate.value}, {"tasks", tasks}};
}

}  // namespace unicorn::scoring
