#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace femkit {

// Base for all femkit errors. `code` is a stable machine-readable tag that
// the CLI emits in its error JSON; `what()` carries the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define FEMKIT_DEFINE_ERROR(NAME, CODE)                          \
    class NAME : public ::femkit::Error {                        \
    public:                                                      \
        explicit NAME(const std::string& message)                \
            : ::femkit::Error(CODE, message) {}                  \
    }

} // namespace femkit
