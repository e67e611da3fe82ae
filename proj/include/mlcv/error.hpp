#pragma once

#include <stdexcept>
#include <string>

namespace mlcv {

// Library-wide exception. `code` is a stable machine-readable tag used by
// the CLI error record (e.g. "singular_design", "empty_design").
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace mlcv
