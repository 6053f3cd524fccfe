#pragma once

#include <stdexcept>
#include <string>

namespace netri {

// Errors carry a machine-readable code (stable across releases) and map to
// the CLI exit categories: 2 config, 3 data, 4 degenerate, 5 support too
// large.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, int exit_code)
      : std::runtime_error(message), code_(std::move(code)), exit_code_(exit_code) {}

  const std::string& code() const { return code_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string code_;
  int exit_code_;
};

struct ConfigError : Error {
  ConfigError(std::string code, const std::string& msg) : Error(std::move(code), msg, 2) {}
};

struct DataError : Error {
  DataError(std::string code, const std::string& msg) : Error(std::move(code), msg, 3) {}
};

// Observed statistic undefined, all draws degenerate, or the restricted
// assignment set is a singleton.
struct DegenerateError : Error {
  DegenerateError(std::string code, const std::string& msg) : Error(std::move(code), msg, 4) {}
};

struct SupportTooLargeError : Error {
  explicit SupportTooLargeError(const std::string& msg)
      : Error("SUPPORT_TOO_LARGE", msg, 5) {}
};

}  // namespace netri
