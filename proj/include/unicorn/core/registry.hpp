#pragma once

#include <string>
#include <vector>

#include "unicorn/core/types.hpp"

namespace unicorn {

class TaskRegistry {
 public:
  explicit TaskRegistry(std::vector<TaskDefinition> tasks);

  const std::vector<TaskDefinition>& all() const { return tasks_; }
  const TaskDefinition& at(int task_id) const;
  bool contains(int task_id) const;
  std::size_t size() const { return tasks_.size(); }

 private:
  std::vector<TaskDefinition> tasks_;  // sorted by task_id
};

/// The 20 compiled-in task definitions.
const TaskRegistry& load_task_registry();

/// Algorithm-facing configuration of a task: id, domain, modality, type and
/// required output shape, nothing else.
struct TaskConfigDocument {
  int task_id = 0;
  Domain domain = Domain::pathology;
  Modality modality = Modality::vision;
  TaskType task_type = TaskType::classification;
  OutputShape output = OutputShape::class_label_per_case;
  bool operator==(const TaskConfigDocument&) const = default;

  std::string to_text() const;
  static TaskConfigDocument parse(const std::string& text);
};

TaskConfigDocument emit_task_config(const TaskDefinition& task);

/// Full registry (de)serialization.
std::string serialize_registry(const TaskRegistry& registry);
TaskRegistry parse_registry(const std::string& text);

}  // namespace unicorn
