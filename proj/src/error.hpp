#pragma once
#include <stdexcept>
#include <string>

namespace steinlab {

enum class ErrorCode {
  invalid_argument = 1,  // bad parameter, mismatched spaces, out-of-range state
  capacity = 2,          // state space larger than the configured cap
  numeric = 3,           // solve failed, residual too large, non-convergence
  reducible = 4,         // generator not irreducible where a stationary law is needed
  config = 5,            // bad sweep configuration
  io = 6,                // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace steinlab
