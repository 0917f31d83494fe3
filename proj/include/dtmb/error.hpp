#pragma once

#include <stdexcept>
#include <string>

namespace dtmb {

/// Coarse error classes; the CLI maps each to a distinct exit code.
enum class ErrorCode {
    InvalidArgument, // bad parameter value (probability out of range, m > N, ...)
    Schema,          // malformed or inconsistent input data (JSON, layout/fault mismatch)
    BoundExceeded,   // operation refused because an enumeration bound was exceeded
    Io,              // file could not be read or written
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace dtmb
