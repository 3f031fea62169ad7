#pragma once

#include <stdexcept>
#include <string>

namespace polyfuse {

enum class ErrorCode {
    invalid_argument,
    degenerate_input,
    config,
    parse,
    io,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace polyfuse
