#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace uquant {

// Error carries a stable machine-readable code next to the human message.
// Codes are the contract surface: tests and the CLI match on code(), never
// on message text.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void raise(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, const std::string& code, const std::string& message) {
  if (!ok) raise(code, message);
}

}  // namespace uquant
