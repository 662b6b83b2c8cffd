#include "unicorn/orchestrator/engine.hpp"

#include "unicorn/core/error.hpp"
#include "unicorn/core/grid_io.hpp"
#include "unicorn/metrics/task_metric.hpp"

namespace unicorn::orchestrator {
namespace {

using Kind = LeaderboardTarget::Kind;

}  // namespace

Engine::Engine(fs::path state_dir, const TaskRegistry& registry, scoring::TargetMembership membership)
    : state_dir_(std::move(state_dir)),
      registry_(&registry),
      membership_(std::move(membership)),
      ledger_(registry),
      log_(state_dir_ / "events.ndjson") {
  replay();
}

void Engine::replay() {
  for (const auto& e : log_.events()) {
    if (e.kind == "submitted" || e.kind == "rejected") {
      const auto d = ledger_.submit(e.team_id, parse_phase(e.payload.at("phase").get<std::string>()),
                                    split_targets(e.target), e.payload.at("algorithm").get<std::string>(), e.timestamp);
      if (d.accepted != (e.kind == "submitted") || (d.accepted && d.submission.submission_id != e.submission_id))
        fail("io", "event log replay diverged at seq " + std::to_string(e.seq));
    } else if (e.kind == "completed") {
      ledger_.complete(e.submission_id, parse_status(e.payload.at("status").get<std::string>()),
                       e.payload.value("reason", std::string()));
    }
  }
}

fs::path Engine::run_dir(const std::string& submission_id) const { return state_dir_ / "runs" / submission_id; }

std::map<std::string, BoardScore> Engine::board_scores(const Submission& s, const PipelineResult& r) const {
  std::map<std::string, BoardScore> out;
  const auto raw = r.raw_scores();
  auto post = [&](const LeaderboardTarget& t) {
    std::map<int, double> subset;
    for (int id : membership_.tasks(t)) subset[id] = raw.at(id);
    const auto agg = scoring::unicorn_score(subset, t, *registry_, membership_);
    out[board_name(s.phase, t)] = {agg.value, agg.members};
  };
  for (const auto& t : s.targets) {
    post(t);
    if (s.phase == Phase::test && t.kind == Kind::all_tasks)
      for (auto k : {Kind::pathology_vision, Kind::radiology_vision, Kind::language}) post(LeaderboardTarget::named(k));
  }
  return out;
}

Engine::Outcome Engine::run(const std::string& team_id, Phase phase, const std::vector<LeaderboardTarget>& targets,
                            const std::string& algorithm_ref, const BenchmarkLayout& benchmark,
                            const adaptors::AdaptorSpec& adaptor, RunOptions options) {
  const auto algorithm = make_algorithm(algorithm_ref);
  const std::uint64_t ts = log_.next_seq();
  const auto decision = ledger_.submit(team_id, phase, targets, algorithm_ref, ts);

  Event submitted;
  submitted.team_id = team_id;
  submitted.target = join_targets(decision.accepted ? decision.submission.targets : targets);
  submitted.payload = {{"phase", std::string(to_string(phase))}, {"algorithm", algorithm_ref}};
  if (!decision.accepted) {
    submitted.kind = "rejected";
    submitted.payload["reason"] = decision.reason;
    log_.append(submitted);
    fail(decision.category, decision.reason);
  }
  submitted.kind = "submitted";
  submitted.submission_id = decision.submission.submission_id;
  submitted.payload["adaptor"] = json::parse(adaptor.to_text());
  log_.append(submitted);

  Outcome out;
  out.submission = decision.submission;
  if (options.workspace.empty()) options.workspace = run_dir(out.submission.submission_id);
  if (fs::exists(options.workspace)) fs::remove_all(options.workspace);

  out.result = run_pipeline(out.submission, benchmark, adaptor, *algorithm, options, *registry_, membership_);
  out.audit = audit_information_flow(options.workspace, &benchmark);

  SubmissionStatus status = out.result.status();
  std::string reason = out.result.reason();
  if (!out.audit.clean()) {
    status = SubmissionStatus::failed;
    reason = "audit: " + out.audit.violations.front() +
             (out.audit.violations.size() > 1 ? " (+" + std::to_string(out.audit.violations.size() - 1) + " more)" : "");
  }
  const json result_json = pipeline_result_json(out.submission, out.result);
  write_text_file(options.workspace / "result.json", dump_stable(result_json));

  ledger_.complete(out.submission.submission_id, status, reason);
  out.submission = ledger_.get(out.submission.submission_id);
  Event completed;
  completed.kind = "completed";
  completed.team_id = team_id;
  completed.submission_id = out.submission.submission_id;
  completed.target = join_targets(out.submission.targets);
  completed.payload = {{"status", std::string(to_string(status))}, {"tasks", result_json.at("tasks")}};
  if (!reason.empty()) completed.payload["reason"] = reason;
  log_.append(completed);

  if (status == SubmissionStatus::succeeded && phase != Phase::check)
    out.snapshots = record_and_rank(log_, out.submission, board_scores(out.submission, out.result),
                                    state_dir_ / "leaderboards");
  return out;
}

json Engine::score_submission(const std::string& submission_id, const BenchmarkLayout& benchmark,
                              const metrics::TokenEmbedder* embedder) const {
  const Submission& s = ledger_.get(submission_id);
  if (s.status != SubmissionStatus::succeeded)
    fail("invalid_input", "submission " + submission_id + " is " + std::string(to_string(s.status)));
  const CaseStore cases(benchmark);
  const SequesteredStore sequestered(benchmark);
  PipelineResult result;
  for (int id : submission_tasks(s, membership_)) {
    const auto& task = registry_->at(id);
    const auto file = run_dir(submission_id) / "evaluation" / "tasks" / std::to_string(id) / "predictions.json";
    if (!fs::exists(file)) fail("io", "no stored predictions for task " + std::to_string(id));
    std::vector<ArchiveItem> items;
    std::vector<Prediction> preds;
    for (const auto& row : json::parse(read_text_file(file))) {
      const auto cid = row.at("case_id").get<std::string>();
      items.push_back({cid, id, Split::evaluation, cases.load_payload(id, cid), sequestered.load_reference(id, cid)});
      preds.push_back(prediction_from_json(row.at("prediction")));
    }
    const auto e = metrics::evaluate_task(task, items, preds, embedder);
    TaskRunResult r;
    r.task_id = id;
    r.status = SubmissionStatus::succeeded;
    r.score = scoring::normalize_task_score(task, e.raw_score);
    r.details = e.details;
    r.evaluated_cases = items.size();
    result.tasks.push_back(r);
  }
  json out = pipeline_result_json(s, result);
  json aggregates = json::object();
  if (s.phase != Phase::check)
    for (const auto& [board, score] : board_scores(s, result)) aggregates[board] = score.aggregate;
  out["aggregates"] = aggregates;
  return out;
}

json Engine::leaderboard(const std::string& board) const { return build_snapshot(log_.events(), board); }

std::vector<std::string> Engine::boards() const { return boards_in(log_.events()); }

}  // namespace unicorn::orchestrator
