#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace armgate {

// Integrity levels ordered from least to most trusted. Values double as
// ranks, so the conservative join of a set is simply its minimum element.
enum class TrustLevel : uint8_t {
    ToolDesc = 0,
    ToolUntrusted = 1,
    ToolTrusted = 2,
    UserInput = 3,
    SysInstr = 4,
};

inline constexpr TrustLevel kAllTrustLevels[] = {
    TrustLevel::ToolDesc,    TrustLevel::ToolUntrusted, TrustLevel::ToolTrusted,
    TrustLevel::UserInput,   TrustLevel::SysInstr,
};

uint8_t trust_rank(TrustLevel level);

// -1, 0, +1 as a is below, equal to, or above b.
int trust_compare(TrustLevel a, TrustLevel b);

// Minimum over the set. Throws ArmGateError("empty-source-set") when the
// set is empty: data with no sources has no defensible trust assignment.
TrustLevel conservative_join(const std::vector<TrustLevel>& sources);

const std::string& trust_name(TrustLevel level);
std::optional<TrustLevel> trust_from_name(const std::string& name);

}  // namespace armgate
