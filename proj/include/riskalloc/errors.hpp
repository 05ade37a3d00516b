#pragma once

#include <stdexcept>
#include <string>

namespace riskalloc {

enum class ErrorCode {
    invalid_argument,   // bad inputs, dimension mismatches, out-of-range indices
    parse,              // malformed files
    io,                 // filesystem failures
    insufficient_data,  // not enough scenarios for the requested estimator
    degenerate,         // zero/unstable denominators, singular systems
    limit,              // configured caps exceeded (e.g. exact Shapley size)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) raise(code, message);
}

}  // namespace riskalloc
