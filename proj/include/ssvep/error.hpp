#pragma once

#include <stdexcept>
#include <string>

namespace ssvep {

// Every failure raised by the toolkit carries a short kebab-case code
// ("window-out-of-range", "missing-class", ...) so the CLI can print a
// machine-readable line and tests can match on the category.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace ssvep
