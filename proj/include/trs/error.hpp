#pragma once

#include <stdexcept>
#include <string>

namespace trs {

/// Error raised by every module. `code()` is a stable kebab-case identifier
/// ("syntax-error", "invalid-position", "not-orientable", ...) that the CLI
/// and the HTTP service expose verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(std::move(code)), detail_(std::move(detail)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

}  // namespace trs
