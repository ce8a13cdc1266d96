#include "armgate/trust.hpp"

#include <algorithm>
#include <array>

#include "armgate/errors.hpp"

namespace armgate {

uint8_t trust_rank(TrustLevel level) { return static_cast<uint8_t>(level); }

int trust_compare(TrustLevel a, TrustLevel b) {
    if (trust_rank(a) < trust_rank(b)) return -1;
    if (trust_rank(a) > trust_rank(b)) return 1;
    return 0;
}

TrustLevel conservative_join(const std::vector<TrustLevel>& sources) {
    if (sources.empty()) {
        throw ArmGateError("empty-source-set",
                           "conservative join over an empty source set");
    }
    return *std::min_element(
        sources.begin(), sources.end(),
        [](TrustLevel a, TrustLevel b) { return trust_rank(a) < trust_rank(b); });
}

namespace {
const std::array<std::string, 5> kNames = {
    "ToolDesc", "ToolUntrusted", "ToolTrusted", "UserInput", "SysInstr"};
}

const std::string& trust_name(TrustLevel level) {
    return kNames[trust_rank(level)];
}

std::optional<TrustLevel> trust_from_name(const std::string& name) {
    for (size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return static_cast<TrustLevel>(i);
    }
    return std::nullopt;
}

}  // namespace armgate
