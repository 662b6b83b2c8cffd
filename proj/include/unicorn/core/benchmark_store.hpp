#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unicorn/core/registry.hpp"
#include "unicorn/core/types.hpp"

namespace unicorn {

namespace fs = std::filesystem;

/// Which held-out cohort a run evaluates on.
enum class Cohort { check, validation, test };

std::string_view to_string(Cohort c);

struct SplitAssignment {
  std::vector<std::string> few_shot;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  bool operator==(const SplitAssignment&) const = default;

  /// Evaluation case ids for a cohort. The check cohort is the first
  /// `check_cases` validation cases.
  std::vector<std::string> evaluation(Cohort c, std::size_t check_cases = 5) const;
};

/// On-disk layout:
///   tasks/<id>/config.json
///   tasks/<id>/cases/<case_id>/payload.{grid,json} [mask.grid] [description.txt]
///   tasks/<id>/sequestered/<case_id>/label.json
///   tasks/<id>/sequestered/splits.json
class BenchmarkLayout {
 public:
  explicit BenchmarkLayout(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }
  fs::path task_dir(int task_id) const;
  fs::path config_path(int task_id) const;
  fs::path cases_dir(int task_id) const;
  fs::path case_dir(int task_id, const std::string& case_id) const;
  fs::path sequestered_dir(int task_id) const;
  fs::path label_path(int task_id, const std::string& case_id) const;
  fs::path splits_path(int task_id) const;

 private:
  fs::path root_;
};

/// Algorithm-facing view: payloads only. It has no accessor for labels,
/// splits, or anything under sequestered/.
class CaseStore {
 public:
  explicit CaseStore(BenchmarkLayout layout) : layout_(std::move(layout)) {}

  std::vector<std::string> list_cases(int task_id) const;
  CasePayload load_payload(int task_id, const std::string& case_id) const;
  /// Files that make up a case payload (for copying into a workspace).
  std::vector<fs::path> payload_files(int task_id, const std::string& case_id) const;
  TaskConfigDocument load_config(int task_id) const;

 private:
  BenchmarkLayout layout_;
};

/// Evaluation-facing view of the sequestered store.
class SequesteredStore {
 public:
  explicit SequesteredStore(BenchmarkLayout layout) : layout_(std::move(layout)) {}

  ReferenceLabel load_reference(int task_id, const std::string& case_id) const;
  SplitAssignment load_splits(int task_id) const;

 private:
  BenchmarkLayout layout_;
};

/// Writers used by the synthetic generator.
void write_payload(const BenchmarkLayout& layout, int task_id, const std::string& case_id, const CasePayload& payload);
void write_reference(const BenchmarkLayout& layout, int task_id, const std::string& case_id, const ReferenceLabel& ref);
void write_splits(const BenchmarkLayout& layout, int task_id, const SplitAssignment& splits);
void write_config(const BenchmarkLayout& layout, const TaskDefinition& task);

/// Loads few-shot plus evaluation items for a cohort, references included.
std::vector<ArchiveItem> load_archive(const BenchmarkLayout& layout, int task_id, Cohort cohort);

}  // namespace unicorn
