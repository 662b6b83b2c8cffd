#include "unicorn/orchestrator/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "unicorn/core/error.hpp"
#include "unicorn/core/grid_io.hpp"
#include "unicorn/core/validation.hpp"
#include "unicorn/metrics/task_metric.hpp"

namespace unicorn::orchestrator {
namespace {

struct TimedOut {
  std::string what;
};

class Budget {
 public:
  explicit Budget(double seconds) : limit_(seconds), start_(std::chrono::steady_clock::now()) {}
  void check(const std::string& where) const {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    if (elapsed.count() > limit_) throw TimedOut{where};
  }

 private:
  double limit_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> sorted_union(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out(a);
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Copies what the algorithm may see into <ws>/algorithm/tasks/<id>/.
void stage_vision(const BenchmarkLayout& staged, const CaseStore& source, const TaskDefinition& task,
                  const std::vector<std::string>& ids) {
  write_text_file(staged.config_path(task.task_id), emit_task_config(task).to_text());
  for (const auto& id : ids) {
    const auto dst = staged.case_dir(task.task_id, id);
    fs::create_directories(dst);
    json files = json::array();
    for (const auto& f : source.payload_files(task.task_id, id)) {
      fs::copy_file(f, dst / f.filename(), fs::copy_options::overwrite_existing);
      files.push_back(f.filename().string());
    }
    write_text_file(dst / "manifest.json", dump_stable({{"case_id", id}, {"files", files}}));
  }
}

json batch_json(const LanguageBatch& b) {
  json few = json::array(), eval = json::array();
  for (const auto& item : b.few_shot)
    few.push_back({{"text", item.report.text}, {"preamble", item.report.preamble}, {"label", to_json(item.label)}});
  for (std::size_t i = 0; i < b.evaluation.size(); ++i)
    eval.push_back({{"case_id", b.evaluation_ids[i]}, {"text", b.evaluation[i].text}, {"preamble", b.evaluation[i].preamble}});
  return {{"few_shot", few}, {"evaluation", eval}};
}

void write_log(const fs::path& file, const TaskRunResult& r) {
  std::string text = "task " + std::to_string(r.task_id) + "\nstatus " + std::string(to_string(r.status)) + "\n";
  if (!r.adaptor.empty()) text += "adaptor " + r.adaptor + "\n";
  if (!r.reason.empty()) text += "reason " + r.reason + "\n";
  if (r.status == SubmissionStatus::succeeded)
    text += "raw " + format_number(r.score.raw) + "\nnormalized " + format_number(r.score.normalized) + "\n";
  write_text_file(file, text);
}

std::string describe_violations(const std::vector<ArchiveItem>& items, const std::vector<ValidationReport>& reports) {
  std::string msg;
  std::size_t shown = 0, total = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].ok()) continue;
    ++total;
    if (shown < 3) {
      msg += (msg.empty() ? "" : "; ") + std::string("case ") + items[i].case_id + ": " + reports[i].summary();
      ++shown;
    }
  }
  if (total > shown) msg += "; and " + std::to_string(total - shown) + " more";
  return "invalid predictions: " + msg;
}

TaskRunResult run_task(const TaskDefinition& task, const Submission& submission, const BenchmarkLayout& benchmark,
                       const adaptors::AdaptorSpec& requested, const Algorithm& algorithm, const RunOptions& options) {
  TaskRunResult result;
  result.task_id = task.task_id;
  const int id = task.task_id;
  const BenchmarkLayout staged(options.workspace / "algorithm");
  const fs::path eval_dir = options.workspace / "evaluation" / "tasks" / std::to_string(id);
  const CaseStore source(benchmark);
  const CaseStore staged_store(staged);
  const SequesteredStore sequestered(benchmark);

  const SplitAssignment splits = sequestered.load_splits(id);
  const auto eval_ids = splits.evaluation(cohort_for(submission.phase), options.check_cases);
  if (eval_ids.empty()) fail("invalid_input", "task " + std::to_string(id) + " has no evaluation cases");
  const AlgorithmContext ctx{staged.task_dir(id) / "scratch"};
  fs::create_directories(ctx.scratch);
  const Budget budget(budget_seconds(task, submission.phase, options.budget_divisor));

  std::vector<ArchiveItem> items;
  for (const auto& cid : eval_ids)
    items.push_back({cid, id, Split::evaluation, source.load_payload(id, cid), sequestered.load_reference(id, cid)});

  std::vector<Prediction> preds;
  if (task.modality == Modality::language) {
    LanguageBatch batch;
    for (const auto& cid : splits.few_shot) {
      const auto payload = source.load_payload(id, cid);
      const auto* text = std::get_if<ReportText>(&payload);
      if (!text) fail("invalid_input", "language case without report text");
      batch.few_shot.push_back({*text, sequestered.load_reference(id, cid)});
    }
    for (const auto& item : items) {
      batch.evaluation_ids.push_back(item.case_id);
      batch.evaluation.push_back(std::get<ReportText>(item.payload));
    }
    write_text_file(staged.config_path(id), emit_task_config(task).to_text());
    write_text_file(staged.task_dir(id) / "batch.json", dump_stable(batch_json(batch)));
    preds = algorithm.predict_batch(batch, staged_store.load_config(id), ctx);
    budget.check("language batch");
    if (preds.size() != items.size())
      fail("validation", "algorithm returned " + std::to_string(preds.size()) + " predictions for " +
                             std::to_string(items.size()) + " cases");
  } else {
    const auto delivery = sorted_union(splits.few_shot, eval_ids);
    stage_vision(staged, source, task, delivery);
    const auto config = staged_store.load_config(id);
    if (task.modality == Modality::vision_language) {
      std::map<std::string, Prediction> by_case;
      for (const auto& cid : delivery) {
        const auto payload = staged_store.load_payload(id, cid);
        const auto* vt = std::get_if<VisionWithTaskDescription>(&payload);
        if (!vt) fail("invalid_input", "vision-language case without task description");
        by_case.emplace(cid, algorithm.predict_case(*vt, config, ctx));
        budget.check("case " + cid);
      }
      for (const auto& item : items) preds.push_back(by_case.at(item.case_id));
    } else {
      std::map<std::string, Representation> reps;
      for (const auto& cid : delivery) {
        auto rep = algorithm.extract(staged_store.load_payload(id, cid), config, ctx);
        budget.check("case " + cid);
        rep.case_id = cid;
        reps.emplace(cid, std::move(rep));
      }
      json rep_json = json::array();
      for (const auto& [cid, rep] : reps) rep_json.push_back(to_json(rep));
      write_text_file(eval_dir / "representations.json", dump_stable(rep_json));

      const auto spec = adaptor_for_task(requested, task);
      result.adaptor = adaptors::to_string(spec.strategy);
      std::vector<adaptors::FewShotExample> few;
      for (const auto& cid : splits.few_shot) few.emplace_back(reps.at(cid), sequestered.load_reference(id, cid));
      const auto model = adaptors::adaptor_fit(spec, few, task);
      std::vector<Representation> eval_reps;
      std::vector<adaptors::GridShape> shapes;
      for (const auto& item : items) {
        eval_reps.push_back(reps.at(item.case_id));
        const auto* v = vision_of(item.payload);
        shapes.push_back({v->image.dims, v->image.spacing});
      }
      preds = adaptors::adaptor_predict(model, eval_reps, task, &shapes);
    }
  }

  json pred_json = json::array();
  for (std::size_t i = 0; i < items.size(); ++i)
    pred_json.push_back({{"case_id", items[i].case_id}, {"prediction", to_json(preds[i])}});
  write_text_file(eval_dir / "predictions.json", dump_stable(pred_json));

  std::vector<ValidationReport> reports;
  bool all_ok = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    reports.push_back(validate_prediction(task, preds[i], items[i]));
    all_ok = all_ok && reports.back().ok();
  }
  if (!all_ok) fail("validation", describe_violations(items, reports));

  const auto evaluation = metrics::evaluate_task(task, items, preds, options.embedder);
  result.score = scoring::normalize_task_score(task, evaluation.raw_score);
  result.details = evaluation.details;
  result.evaluated_cases = items.size();
  result.status = SubmissionStatus::succeeded;
  return result;
}

}  // namespace

SubmissionStatus PipelineResult::status() const {
  bool timed_out = false;
  for (const auto& t : tasks) {
    if (t.status == SubmissionStatus::failed) return SubmissionStatus::failed;
    if (t.status == SubmissionStatus::timed_out) timed_out = true;
  }
  return timed_out ? SubmissionStatus::timed_out : SubmissionStatus::succeeded;
}

std::string PipelineResult::reason() const {
  std::string s;
  for (const auto& t : tasks)
    if (t.status != SubmissionStatus::succeeded)
      s += (s.empty() ? "" : "; ") + std::string("task ") + std::to_string(t.task_id) + " " +
           std::string(to_string(t.status)) + ": " + t.reason;
  return s;
}

std::map<int, double> PipelineResult::raw_scores() const {
  std::map<int, double> out;
  for (const auto& t : tasks)
    if (t.status == SubmissionStatus::succeeded) out[t.task_id] = t.score.raw;
  return out;
}

Cohort cohort_for(Phase phase) {
  switch (phase) {
    case Phase::check: return Cohort::check;
    case Phase::validation: return Cohort::validation;
    case Phase::test: return Cohort::test;
  }
  return Cohort::check;
}

std::set<int> submission_tasks(const Submission& s, const scoring::TargetMembership& membership) {
  std::set<int> ids;
  for (const auto& t : s.targets) {
    const auto m = membership.tasks(t);
    ids.insert(m.begin(), m.end());
  }
  return ids;
}

double budget_seconds(const TaskDefinition& task, Phase phase, double divisor) {
  if (!(divisor > 0.0)) fail("config", "budget divisor must be positive");
  const int minutes = phase == Phase::test ? task.time_limit.test_minutes : task.time_limit.validation_minutes;
  return minutes * 60.0 / divisor;
}

adaptors::AdaptorSpec adaptor_for_task(const adaptors::AdaptorSpec& requested, const TaskDefinition& task) {
  using adaptors::Strategy;
  const bool seg = task.task_type == TaskType::segmentation;
  const bool det = task.task_type == TaskType::detection;
  if (!seg && !det) return requested;
  const Strategy want = seg ? Strategy::patch_knn_segmentation : Strategy::patch_knn_detection;
  if (requested.strategy == want) return requested;
  auto spec = adaptors::default_spec(want);
  spec.seed = requested.seed;
  if (requested.hyperparams.count("k")) spec.hyperparams["k"] = requested.hyperparams.at("k");
  return spec;
}

PipelineResult run_pipeline(const Submission& submission, const BenchmarkLayout& benchmark,
                            const adaptors::AdaptorSpec& adaptor, const Algorithm& algorithm, const RunOptions& options,
                            const TaskRegistry& registry, const scoring::TargetMembership& membership) {
  if (options.workspace.empty()) fail("config", "run workspace not set");
  const auto ids = submission_tasks(submission, membership);
  std::vector<const TaskDefinition*> tasks;
  for (int id : ids) tasks.push_back(&registry.at(id));
  fs::create_directories(options.workspace / "algorithm" / "tasks");
  fs::create_directories(options.workspace / "evaluation" / "tasks");
  fs::create_directories(options.workspace / "logs");

  PipelineResult result;
  result.tasks.resize(tasks.size());
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel_tasks)
  for (long i = 0; i < n; ++i) {
    const auto& task = *tasks[static_cast<std::size_t>(i)];
    TaskRunResult r;
    try {
      r = run_task(task, submission, benchmark, adaptor, algorithm, options);
    } catch (const TimedOut& t) {
      r.task_id = task.task_id;
      r.status = SubmissionStatus::timed_out;
      r.reason = "time limit exceeded at " + t.what;
    } catch (const Error& e) {
      r.task_id = task.task_id;
      r.status = SubmissionStatus::failed;
      r.reason = e.category() + ": " + e.what();
    } catch (const std::exception& e) {
      r.task_id = task.task_id;
      r.status = SubmissionStatus::failed;
      r.reason = std::string("crash: ") + e.what();
    }
    try {
      write_log(options.workspace / "logs" / ("task_" + std::to_string(task.task_id) + ".log"), r);
    } catch (const std::exception&) {
      // log is best effort; the result itself carries the reason
    }
    result.tasks[static_cast<std::size_t>(i)] = std::move(r);
  }
  return result;
}

json pipeline_result_json(const Submission& submission, const PipelineResult& result) {
  json tasks = json::array();
  for (const auto& t : result.tasks) {
    json row{{"task_id", t.task_id}, {"status", std::string(to_string(t.status))}};
    if (!t.reason.empty()) row["reason"] = t.reason;
    if (!t.adaptor.empty()) row["adaptor"] = t.adaptor;
    if (t.status == SubmissionStatus::succeeded) {
      row["raw"] = t.score.raw;
      row["normalized"] = t.score.normalized;
      row["cases"] = t.evaluated_cases;
      if (!t.details.empty()) row["details"] = t.details;
    }
    tasks.push_back(row);
  }
  json targets = json::array();
  for (const auto& t : submission.targets) targets.push_back(t.to_string());
  return {{"submission_id", submission.submission_id},
          {"team_id", submission.team_id},
          {"phase", std::string(to_string(submission.phase))},
          {"targets", targets},
          {"algorithm", submission.algorithm_ref},
          {"status", std::string(to_string(result.status()))},
          {"tasks", tasks}};
}

}  // namespace unicorn::orchestrator
