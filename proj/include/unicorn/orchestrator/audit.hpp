#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unicorn/core/benchmark_store.hpp"

namespace unicorn::orchestrator {

struct AuditReport {
  std::vector<std::string> violations;
  bool clean() const { return violations.empty(); }
};

/// Scans <run_workspace>/algorithm for anything the algorithm step must not
/// see: paths under a sequestered directory, label or split files, files
/// byte-identical to a sequestered file of `benchmark` (when given), and
/// case manifests that carry a split field. One violation per file.
AuditReport audit_information_flow(const std::filesystem::path& run_workspace,
                                   const BenchmarkLayout* benchmark = nullptr);

}  // namespace unicorn::orchestrator
