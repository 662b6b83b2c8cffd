#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "unicorn/core/registry.hpp"
#include "unicorn/core/serialization.hpp"

namespace unicorn::harness {

struct SyntheticBenchmarkSpec {
  std::uint64_t seed = 7;
  double scale = 0.1;    // case-count multiplier for validation and test cohorts
  int feature_dim = 64;  // baseline representation width
};

struct ManifestTask {
  int task_id = 0;
  CaseCounts counts;
};

struct BenchmarkManifest {
  SyntheticBenchmarkSpec spec;
  std::vector<ManifestTask> tasks;

  json to_json() const;
  static BenchmarkManifest from_json(const json& j);
};

/// Few-shot counts are kept as registered; validation and test counts are
/// floor(n * scale) but never below 20 (and never above n).
CaseCounts scaled_counts(const TaskDefinition& task, double scale);

/// Writes all tasks of the registry in the benchmark layout, plus
/// <out>/manifest.json. Case ids are random and carry no split information.
/// An existing benchmark at `out` is replaced; any other non-empty
/// directory is refused.
BenchmarkManifest generate_benchmark(const SyntheticBenchmarkSpec& spec, const std::filesystem::path& out,
                                     const TaskRegistry& registry = load_task_registry());

BenchmarkManifest load_manifest(const std::filesystem::path& benchmark_root);

}  // namespace unicorn::harness
