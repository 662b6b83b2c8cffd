#include "unicorn/orchestrator/submission.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "unicorn/core/error.hpp"

namespace unicorn::orchestrator {
namespace {

using Kind = LeaderboardTarget::Kind;

constexpr std::array<std::string_view, 3> kPhaseNames{"check", "validation", "test"};
constexpr std::array<std::string_view, 5> kStatusNames{"pending", "running", "succeeded", "failed", "timed_out"};

bool valid_team(const std::string& team) {
  if (team.empty() || team.size() > 64) return false;
  return std::all_of(team.begin(), team.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string pad(std::uint64_t v) {
  std::string s = std::to_string(v);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

SubmitDecision reject(std::string category, std::string reason) {
  SubmitDecision d;
  d.category = std::move(category);
  d.reason = std::move(reason);
  return d;
}

}  // namespace

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }
std::string_view to_string(SubmissionStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

Phase parse_phase(std::string_view s) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i)
    if (kPhaseNames[i] == s) return static_cast<Phase>(i);
  fail("invalid_input", "unknown phase '" + std::string(s) + "'");
}

SubmissionStatus parse_status(std::string_view s) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i)
    if (kStatusNames[i] == s) return static_cast<SubmissionStatus>(i);
  fail("invalid_input", "unknown submission status '" + std::string(s) + "'");
}

int QuotaLedger::validation_quota(const LeaderboardTarget& t) {
  switch (t.kind) {
    case Kind::task_specific: return kTaskSpecificQuota;
    case Kind::all_tasks: return kAllTasksQuota;
    default: return kCombinedQuota;
  }
}

SubmitDecision QuotaLedger::submit(const std::string& team_id, Phase phase, std::vector<LeaderboardTarget> targets,
                                   const std::string& algorithm_ref, std::uint64_t timestamp) {
  if (!valid_team(team_id)) fail("invalid_input", "unknown team '" + team_id + "'");
  if (targets.empty()) fail("invalid_input", "submission without a target");
  for (const auto& t : targets)
    if (t.kind == Kind::task_specific && !registry_->contains(t.task_id))
      fail("invalid_input", "unknown target " + t.to_string());
  std::sort(targets.begin(), targets.end());
  if (std::adjacent_find(targets.begin(), targets.end()) != targets.end())
    fail("invalid_input", "duplicate target in submission");
  if (phase != Phase::test && targets.size() != 1)
    fail("invalid_input", std::string(to_string(phase)) + " submissions take exactly one target");
  if (timestamp <= last_timestamp_) fail("invalid_input", "submission timestamps must increase");
  last_timestamp_ = timestamp;

  if (phase != Phase::check) {
    for (const auto& t : targets)
      if (!check_passed(team_id, t)) return reject("phase", "check phase not passed for " + t.to_string());
  }
  if (phase == Phase::validation) {
    const auto& t = targets.front();
    const int q = validation_quota(t);
    if (validation_used(team_id, t) >= q)
      return reject("quota", "quota " + std::to_string(q) + " exhausted for " + t.to_string());
  } else if (phase == Phase::test) {
    const bool has_all = std::any_of(targets.begin(), targets.end(), [](const auto& t) { return t.kind == Kind::all_tasks; });
    for (const auto& t : targets)
      if (t.kind == Kind::task_specific) return reject("quota", "test phase takes only all_tasks or combined targets");
    if (has_all && targets.size() > 1) return reject("quota", "test target is all_tasks or combined boards, not both");
    if (test_slot_taken(team_id)) return reject("quota", "test quota exhausted: one test submission per team");
  }

  Submission s;
  s.submission_id = "sub-" + pad(timestamp);
  s.team_id = team_id;
  s.phase = phase;
  s.targets = std::move(targets);
  s.algorithm_ref = algorithm_ref;
  s.timestamp = timestamp;
  s.status = SubmissionStatus::pending;
  if (by_id_.count(s.submission_id)) fail("invalid_input", "duplicate submission id " + s.submission_id);

  if (phase == Phase::validation) ++validation_used_[{team_id, s.targets.front()}];
  if (phase == Phase::test) test_slot_[team_id] = s.submission_id;

  by_id_[s.submission_id] = history_.size();
  history_.push_back(s);
  SubmitDecision d;
  d.accepted = true;
  d.submission = s;
  return d;
}

void QuotaLedger::complete(const std::string& submission_id, SubmissionStatus status, const std::string& reason) {
  const auto it = by_id_.find(submission_id);
  if (it == by_id_.end()) fail("invalid_input", "unknown submission " + submission_id);
  auto& s = history_[it->second];
  if (s.status != SubmissionStatus::pending && s.status != SubmissionStatus::running)
    fail("invalid_input", "submission " + submission_id + " already completed");
  if (status == SubmissionStatus::pending) fail("invalid_input", "cannot complete with status pending");
  if (status == SubmissionStatus::running) {
    s.status = status;
    return;
  }
  s.status = status;
  s.reason = reason;
  const bool ok = status == SubmissionStatus::succeeded;
  switch (s.phase) {
    case Phase::check:
      if (ok) check_passed_.insert({s.team_id, s.targets.front()});
      break;
    case Phase::validation:
      if (!ok) --validation_used_[{s.team_id, s.targets.front()}];
      break;
    case Phase::test:
      if (!ok) test_slot_.erase(s.team_id);
      break;
  }
}

const Submission& QuotaLedger::get(const std::string& submission_id) const {
  const auto it = by_id_.find(submission_id);
  if (it == by_id_.end()) fail("invalid_input", "unknown submission " + submission_id);
  return history_[it->second];
}

bool QuotaLedger::check_passed(const std::string& team, const LeaderboardTarget& target) const {
  return check_passed_.count({team, target}) > 0;
}

int QuotaLedger::validation_used(const std::string& team, const LeaderboardTarget& target) const {
  const auto it = validation_used_.find({team, target});
  return it == validation_used_.end() ? 0 : it->second;
}

bool QuotaLedger::test_slot_taken(const std::string& team) const { return test_slot_.count(team) > 0; }

std::vector<std::string> QuotaLedger::invariant_violations() const {
  std::vector<std::string> out;
  std::map<Key, int> live_validation;
  std::map<std::string, int> live_tests;
  std::map<Key, std::uint64_t> first_check;
  std::uint64_t last = 0;
  for (const auto& s : history_) {
    if (s.timestamp <= last) out.push_back(s.submission_id + ": timestamps not increasing");
    last = s.timestamp;
    const bool ok = s.status == SubmissionStatus::succeeded;
    const bool live = ok || s.status == SubmissionStatus::pending || s.status == SubmissionStatus::running;
    if (s.phase == Phase::check) {
      if (ok && !first_check.count({s.team_id, s.targets.front()})) first_check[{s.team_id, s.targets.front()}] = s.timestamp;
      continue;
    }
    for (const auto& t : s.targets) {
      const auto it = first_check.find({s.team_id, t});
      if (it == first_check.end() || it->second >= s.timestamp)
        out.push_back(s.submission_id + ": accepted without a passed check on " + t.to_string());
    }
    if (s.phase == Phase::validation) {
      const Key k{s.team_id, s.targets.front()};
      if (live) ++live_validation[k];
    } else {
      bool has_all = false, has_other = false;
      for (const auto& t : s.targets) {
        if (t.kind == Kind::task_specific) out.push_back(s.submission_id + ": task-specific test target");
        if (t.kind == Kind::all_tasks) has_all = true;
        else has_other = true;
      }
      if (has_all && has_other) out.push_back(s.submission_id + ": test targets mix all_tasks and combined boards");
      if (live) ++live_tests[s.team_id];
    }
  }
  for (const auto& [k, n] : live_validation)
    if (n > validation_quota(k.second))
      out.push_back(k.first + " " + k.second.to_string() + ": " + std::to_string(n) + " validation submissions");
  for (const auto& [team, n] : live_tests)
    if (n > 1) out.push_back(team + ": " + std::to_string(n) + " test submissions");
  for (const auto& [k, n] : live_validation)
    if (validation_used(k.first, k.second) != n) out.push_back(k.first + ": validation counter out of sync");
  return out;
}

}  // namespace unicorn::orchestrator
