#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace flrd {

/// Library error with a stable machine-readable kind. The CLI prints these
/// as `error:<kind>: <message>` on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void raise(const char* kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace flrd
