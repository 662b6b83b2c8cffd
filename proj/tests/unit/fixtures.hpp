#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "unicorn/harness/synthetic.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("unicorn-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// One generated benchmark per test binary, seed 7.
inline const fs::path& shared_benchmark() {
  static TempDir dir("bench");
  static bool made = false;
  if (!made) {
    unicorn::harness::generate_benchmark({}, dir.path / "b");
    made = true;
  }
  static const fs::path root = dir.path / "b";
  return root;
}

}  // namespace fixtures
