#pragma once

#include <string>
#include <vector>

#include "unicorn/core/types.hpp"

namespace unicorn {

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks a prediction against the task's output contract for one case.
/// Never throws; every problem becomes a violation entry.
ValidationReport validate_prediction(const TaskDefinition& task, const Prediction& prediction, const ArchiveItem& item);

}  // namespace unicorn
