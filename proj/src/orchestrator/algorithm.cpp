#include "unicorn/orchestrator/algorithm.hpp"

#include <map>
#include <mutex>

#include "unicorn/core/error.hpp"

namespace unicorn::orchestrator {
namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, AlgorithmFactory> factories;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_algorithm(const std::string& name, AlgorithmFactory factory) {
  if (name.empty() || !factory) fail("config", "algorithm registration needs a name and a factory");
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

bool has_algorithm(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.factories.count(name) > 0;
}

std::unique_ptr<Algorithm> make_algorithm(const std::string& name) {
  AlgorithmFactory f;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    const auto it = r.factories.find(name);
    if (it == r.factories.end()) fail("config", "unknown algorithm '" + name + "'");
    f = it->second;
  }
  auto algo = f();
  if (!algo) fail("config", "algorithm factory for '" + name + "' returned nothing");
  return algo;
}

std::vector<std::string> list_algorithms() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> names;
  for (const auto& kv : r.factories) names.push_back(kv.first);
  return names;
}

}  // namespace unicorn::orchestrator
