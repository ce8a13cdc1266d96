#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/graph.hpp"

namespace armgate {

enum class Verdict : uint8_t { Pass, Deny };
enum class Outcome : uint8_t { Allow, Deny };

struct LayerResult {
    Verdict verdict = Verdict::Pass;
    std::string layer;   // L1, L2, L2G, L3, L4
    std::string rule;    // set iff Deny
    std::string reason;  // set iff Deny

    static LayerResult pass(std::string layer);
    static LayerResult deny(std::string layer, std::string rule,
                            std::string reason);
    nlohmann::json to_json() const;
};

struct Decision {
    Outcome outcome = Outcome::Allow;
    std::vector<LayerResult> layer_results;  // ends at the denying layer
    std::string denied_by;                   // layer id, empty on Allow
    std::vector<std::string> flags;          // e.g. SD-4 log-only findings

    const LayerResult* denying_result() const;
    std::string rule() const;
    std::string reason() const;
    nlohmann::json to_json() const;
};

struct ToolCallRequest {
    std::string tool_name;
    nlohmann::json arguments = nlohmann::json::object();
    std::vector<NodeId> input_data;
};

}  // namespace armgate
