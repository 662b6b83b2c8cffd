#include "unicorn/orchestrator/audit.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include <json.hpp>

#include "unicorn/core/grid_io.hpp"

namespace unicorn::orchestrator {
namespace {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool has_key(const nlohmann::json& j, const std::string& key) {
  if (j.is_object()) {
    if (j.contains(key)) return true;
    for (const auto& [_, v] : j.items())
      if (has_key(v, key)) return true;
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (has_key(v, key)) return true;
  }
  return false;
}

std::set<std::uint64_t> sequestered_hashes(const BenchmarkLayout& benchmark) {
  std::set<std::uint64_t> hashes;
  const auto tasks = benchmark.root() / "tasks";
  if (!fs::exists(tasks)) return hashes;
  for (const auto& task : fs::directory_iterator(tasks)) {
    const auto seq = task.path() / "sequestered";
    if (!fs::exists(seq)) continue;
    for (const auto& f : fs::recursive_directory_iterator(seq))
      if (f.is_regular_file()) hashes.insert(fnv1a(read_text_file(f.path())));
  }
  return hashes;
}

}  // namespace

AuditReport audit_information_flow(const fs::path& run_workspace, const BenchmarkLayout* benchmark) {
  AuditReport report;
  const auto root = run_workspace / "algorithm";
  if (!fs::exists(root)) return report;
  const auto hashes = benchmark ? sequestered_hashes(*benchmark) : std::set<std::uint64_t>{};

  std::vector<fs::path> files;
  for (const auto& f : fs::recursive_directory_iterator(root))
    if (f.is_regular_file()) files.push_back(f.path());
  std::sort(files.begin(), files.end());

  for (const auto& f : files) {
    const auto rel = fs::relative(f, run_workspace).generic_string();
    const auto name = f.filename().string();
    if (rel.find("sequestered") != std::string::npos) {
      report.violations.push_back(rel + ": path under a sequestered directory");
      continue;
    }
    if (name == "label.json" || name == "splits.json") {
      report.violations.push_back(rel + ": label or split file in algorithm workspace");
      continue;
    }
    const auto content = read_text_file(f);
    if (hashes.count(fnv1a(content))) {
      report.violations.push_back(rel + ": content matches a sequestered file");
      continue;
    }
    if (name == "manifest.json") {
      const auto j = nlohmann::json::parse(content, nullptr, false);
      if (!j.is_discarded() && has_key(j, "split")) report.violations.push_back(rel + ": case manifest reveals split");
    }
  }
  return report;
}

}  // namespace unicorn::orchestrator
