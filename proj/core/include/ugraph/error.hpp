#pragma once

#include <stdexcept>
#include <string>

namespace ugraph {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCode {
  Config = 2,
  Data = 3,
  Numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorCode::Data, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

}  // namespace ugraph
