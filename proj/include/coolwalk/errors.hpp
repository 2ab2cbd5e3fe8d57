#pragma once

#include <stdexcept>
#include <string>

namespace coolwalk {

enum class ErrorCode {
  InvalidArgument = 1,  // domain/validation failures
  Parse = 2,            // malformed JSON / unknown kinds
  Budget = 3,           // step budget or integer budget exceeded
  Numeric = 4,          // quadrature/inversion failed to converge
  Io = 5,               // file system failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, msg);
}
[[noreturn]] inline void throw_parse(const std::string& msg) { throw Error(ErrorCode::Parse, msg); }
[[noreturn]] inline void throw_budget(const std::string& msg) { throw Error(ErrorCode::Budget, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorCode::Numeric, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorCode::Io, msg); }

}  // namespace coolwalk
