#pragma once

#include <stdexcept>
#include <string>

namespace unicorn {

// Every failure surfaced by the engine carries a short machine-parsable
// category ("metric", "io", "quota", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace unicorn
