#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "armgate/policy_types.hpp"

namespace armgate {

// Per-tool grant. An absent call_budget means unlimited.
struct ToolPermission {
    std::string tool_name;
    std::optional<uint64_t> call_budget;
    std::set<std::string> blocked_argument_keys;
    std::map<std::string, std::set<std::string>> value_constraints;

    bool operator==(const ToolPermission&) const = default;
};

// Partial respecification for one tool during attenuation. Every field
// given is an absolute value for the child and is validated against the
// parent: budgets may only shrink, blocklists may only grow, constraint
// sets may only narrow.
struct ToolRestriction {
    std::optional<std::optional<uint64_t>> call_budget;
    std::optional<std::set<std::string>> blocked_argument_keys;
    std::optional<std::map<std::string, std::set<std::string>>>
        value_constraints;
};

struct AttenuationSpec {
    std::set<std::string> drop_tools;
    std::map<std::string, ToolRestriction> adjust;
};

// Immutable once constructed; attenuate builds a new token and leaves the
// parent untouched.
class CapabilityToken {
public:
    CapabilityToken(std::string token_id,
                    std::map<std::string, ToolPermission> permissions,
                    std::optional<std::string> parent_id = std::nullopt);

    const std::string& token_id() const { return token_id_; }
    const std::optional<std::string>& parent_id() const { return parent_id_; }
    const std::map<std::string, ToolPermission>& permissions() const {
        return permissions_;
    }
    const ToolPermission* find(const std::string& tool) const;

    nlohmann::json to_json() const;
    static CapabilityToken from_json(const nlohmann::json& j);
    static CapabilityToken load_file(const std::string& path);

    bool operator==(const CapabilityToken&) const = default;

private:
    std::string token_id_;
    std::map<std::string, ToolPermission> permissions_;
    std::optional<std::string> parent_id_;
};

// Throws ArmGateError("amplification-rejected") on any widening attempt:
// a tool absent from the parent, a larger or newly unlimited budget, a
// blocklist missing a parent entry, or a value set not contained in the
// parent's. Tools listed in drop_tools are removed; a tool both dropped
// and adjusted is simply dropped.
CapabilityToken attenuate(const CapabilityToken& parent,
                          const AttenuationSpec& restriction,
                          const std::string& child_id);

// L4 semantics. used_counts holds finalized Allow counts per tool.
LayerResult authorize(const CapabilityToken& token, const ToolCallRequest& req,
                      const std::map<std::string, uint64_t>& used_counts);

}  // namespace armgate
