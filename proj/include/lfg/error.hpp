#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lfg {

/// Exception carrying a short machine-readable code next to the message.
/// The server forwards `code()` verbatim in `error` messages.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace lfg
