#include "unicorn/core/benchmark_store.hpp"

#include <algorithm>

#include "unicorn/core/grid_io.hpp"
#include "unicorn/core/serialization.hpp"

namespace unicorn {

std::string_view to_string(Cohort c) {
  switch (c) {
    case Cohort::check: return "check";
    case Cohort::validation: return "validation";
    case Cohort::test: return "test";
  }
  return "unknown";
}

std::vector<std::string> SplitAssignment::evaluation(Cohort c, std::size_t check_cases) const {
  switch (c) {
    case Cohort::check:
      return {validation.begin(), validation.begin() + static_cast<long>(std::min(check_cases, validation.size()))};
    case Cohort::validation: return validation;
    case Cohort::test: return test;
  }
  return {};
}

fs::path BenchmarkLayout::task_dir(int task_id) const { return root_ / "tasks" / std::to_string(task_id); }
fs::path BenchmarkLayout::config_path(int task_id) const { return task_dir(task_id) / "config.json"; }
fs::path BenchmarkLayout::cases_dir(int task_id) const { return task_dir(task_id) / "cases"; }
fs::path BenchmarkLayout::case_dir(int task_id, const std::string& case_id) const {
  return cases_dir(task_id) / case_id;
}
fs::path BenchmarkLayout::sequestered_dir(int task_id) const { return task_dir(task_id) / "sequestered"; }
fs::path BenchmarkLayout::label_path(int task_id, const std::string& case_id) const {
  return sequestered_dir(task_id) / case_id / "label.json";
}
fs::path BenchmarkLayout::splits_path(int task_id) const { return sequestered_dir(task_id) / "splits.json"; }

std::vector<std::string> CaseStore::list_cases(int task_id) const {
  std::vector<std::string> ids;
  const auto dir = layout_.cases_dir(task_id);
  if (!fs::exists(dir)) fail("io", "no cases directory for task " + std::to_string(task_id));
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<fs::path> CaseStore::payload_files(int task_id, const std::string& case_id) const {
  std::vector<fs::path> files;
  const auto dir = layout_.case_dir(task_id, case_id);
  if (!fs::exists(dir)) fail("io", "unknown case '" + case_id + "' in task " + std::to_string(task_id));
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

CasePayload CaseStore::load_payload(int task_id, const std::string& case_id) const {
  const auto dir = layout_.case_dir(task_id, case_id);
  CasePayload payload;
  if (fs::exists(dir / "payload.json")) {
    const json j = json::parse(read_text_file(dir / "payload.json"));
    payload = ReportText{j.at("text").get<std::string>(), j.value("preamble", std::string())};
  } else if (fs::exists(dir / "payload.grid")) {
    VisionGrid v;
    v.image = parse_grid(read_text_file(dir / "payload.grid"));
    if (fs::exists(dir / "mask.grid")) v.tissue_mask = parse_int_grid(read_text_file(dir / "mask.grid"));
    if (fs::exists(dir / "description.txt"))
      payload = VisionWithTaskDescription{std::move(v), read_text_file(dir / "description.txt")};
    else
      payload = std::move(v);
  } else {
    fail("io", "case '" + case_id + "' has no payload file");
  }
  check_payload(payload);
  return payload;
}

TaskConfigDocument CaseStore::load_config(int task_id) const {
  return TaskConfigDocument::parse(read_text_file(layout_.config_path(task_id)));
}

ReferenceLabel SequesteredStore::load_reference(int task_id, const std::string& case_id) const {
  ReferenceLabel ref = reference_from_json(json::parse(read_text_file(layout_.label_path(task_id, case_id))));
  check_reference(ref);
  return ref;
}

SplitAssignment SequesteredStore::load_splits(int task_id) const {
  const json j = json::parse(read_text_file(layout_.splits_path(task_id)));
  return {j.at("few_shot").get<std::vector<std::string>>(), j.at("validation").get<std::vector<std::string>>(),
          j.at("test").get<std::vector<std::string>>()};
}

void write_payload(const BenchmarkLayout& layout, int task_id, const std::string& case_id, const CasePayload& payload) {
  check_payload(payload);
  const auto dir = layout.case_dir(task_id, case_id);
  auto write_vision = [&](const VisionGrid& v) {
    write_text_file(dir / "payload.grid", format_grid(v.image));
    if (v.tissue_mask) write_text_file(dir / "mask.grid", format_grid(*v.tissue_mask));
  };
  if (const auto* v = std::get_if<VisionGrid>(&payload)) {
    write_vision(*v);
  } else if (const auto* r = std::get_if<ReportText>(&payload)) {
    json j{{"text", r->text}};
    if (!r->preamble.empty()) j["preamble"] = r->preamble;
    write_text_file(dir / "payload.json", dump_stable(j));
  } else {
    const auto& vt = std::get<VisionWithTaskDescription>(payload);
    write_vision(vt.vision);
    write_text_file(dir / "description.txt", vt.description);
  }
}

void write_reference(const BenchmarkLayout& layout, int task_id, const std::string& case_id, const ReferenceLabel& ref) {
  check_reference(ref);
  write_text_file(layout.label_path(task_id, case_id), dump_stable(to_json(ref)));
}

void write_splits(const BenchmarkLayout& layout, int task_id, const SplitAssignment& splits) {
  json j{{"few_shot", splits.few_shot}, {"validation", splits.validation}, {"test", splits.test}};
  write_text_file(layout.splits_path(task_id), dump_stable(j));
}

void write_config(const BenchmarkLayout& layout, const TaskDefinition& task) {
  write_text_file(layout.config_path(task.task_id), emit_task_config(task).to_text());
}

std::vector<ArchiveItem> load_archive(const BenchmarkLayout& layout, int task_id, Cohort cohort) {
  CaseStore cases(layout);
  SequesteredStore sequestered(layout);
  const SplitAssignment splits = sequestered.load_splits(task_id);
  std::vector<ArchiveItem> items;
  auto load = [&](const std::string& id, Split split) {
    items.push_back({id, task_id, split, cases.load_payload(task_id, id), sequestered.load_reference(task_id, id)});
  };
  for (const auto& id : splits.few_shot) load(id, Split::few_shot);
  for (const auto& id : splits.evaluation(cohort)) load(id, Split::evaluation);
  return items;
}

}  // namespace unicorn
