#pragma once

#include <stdexcept>
#include <string>

namespace armgate {

// Every contract violation surfaces as one of these with a stable machine
// readable code. Callers match on code(), not on the human message.
class ArmGateError : public std::runtime_error {
public:
    ArmGateError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace armgate
