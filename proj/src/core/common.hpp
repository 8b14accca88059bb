#pragma once

#include <stdexcept>
#include <string>

namespace odmtc {

enum class ErrorCode {
    Io = 1,
    Config = 2,
    Argument = 3,
    Data = 4,
    Numeric = 5,
    Internal = 6,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string &msg) {
    if (!cond)
        fail(code, msg);
}

} // namespace odmtc
