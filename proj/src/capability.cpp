#include "armgate/capability.hpp"

#include <fstream>

#include "armgate/errors.hpp"

namespace armgate {

CapabilityToken::CapabilityToken(
    std::string token_id, std::map<std::string, ToolPermission> permissions,
    std::optional<std::string> parent_id)
    : token_id_(std::move(token_id)),
      permissions_(std::move(permissions)),
      parent_id_(std::move(parent_id)) {
    for (auto& [name, perm] : permissions_) perm.tool_name = name;
}

const ToolPermission* CapabilityToken::find(const std::string& tool) const {
    auto it = permissions_.find(tool);
    return it == permissions_.end() ? nullptr : &it->second;
}

nlohmann::json CapabilityToken::to_json() const {
    nlohmann::json perms = nlohmann::json::object();
    for (const auto& [tool, perm] : permissions_) {
        nlohmann::json p;
        if (perm.call_budget) {
            p["budget"] = *perm.call_budget;
        } else {
            p["budget"] = "unlimited";
        }
        p["blocked_argument_keys"] = perm.blocked_argument_keys;
        nlohmann::json vc = nlohmann::json::object();
        for (const auto& [key, values] : perm.value_constraints) {
            vc[key] = values;
        }
        p["value_constraints"] = vc;
        perms[tool] = p;
    }
    nlohmann::json j = {{"token_id", token_id_}, {"permissions", perms}};
    if (parent_id_) j["parent_id"] = *parent_id_;
    return j;
}

CapabilityToken CapabilityToken::from_json(const nlohmann::json& j) {
    std::map<std::string, ToolPermission> perms;
    if (j.contains("permissions")) {
        for (auto it = j["permissions"].begin(); it != j["permissions"].end();
             ++it) {
            ToolPermission perm;
            perm.tool_name = it.key();
            const auto& p = it.value();
            if (p.contains("budget") && !p["budget"].is_string()) {
                perm.call_budget = p["budget"].get<uint64_t>();
            }
            if (p.contains("blocked_argument_keys")) {
                for (const auto& k : p["blocked_argument_keys"]) {
                    perm.blocked_argument_keys.insert(k.get<std::string>());
                }
            }
            if (p.contains("value_constraints")) {
                for (auto vc = p["value_constraints"].begin();
                     vc != p["value_constraints"].end(); ++vc) {
                    std::set<std::string> values;
                    for (const auto& v : vc.value()) {
                        values.insert(v.get<std::string>());
                    }
                    perm.value_constraints[vc.key()] = std::move(values);
                }
            }
            perms[it.key()] = std::move(perm);
        }
    }
    std::optional<std::string> parent;
    if (j.contains("parent_id")) parent = j["parent_id"].get<std::string>();
    return CapabilityToken(j.value("token_id", std::string("token")),
                           std::move(perms), std::move(parent));
}

CapabilityToken CapabilityToken::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArmGateError("config-invalid", "cannot open token file " + path);
    }
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

namespace {

[[noreturn]] void reject(const std::string& detail) {
    throw ArmGateError("amplification-rejected", detail);
}

}  // namespace

CapabilityToken attenuate(const CapabilityToken& parent,
                          const AttenuationSpec& restriction,
                          const std::string& child_id) {
    for (const std::string& tool : restriction.drop_tools) {
        if (!parent.find(tool)) {
            reject("drop of tool '" + tool + "' not present in parent");
        }
    }
    for (const auto& [tool, _] : restriction.adjust) {
        if (!parent.find(tool)) {
            reject("tool '" + tool + "' not present in parent");
        }
    }

    std::map<std::string, ToolPermission> child;
    for (const auto& [tool, parent_perm] : parent.permissions()) {
        if (restriction.drop_tools.count(tool)) continue;
        ToolPermission perm = parent_perm;
        auto it = restriction.adjust.find(tool);
        if (it != restriction.adjust.end()) {
            const ToolRestriction& r = it->second;
            if (r.call_budget) {
                const std::optional<uint64_t>& requested = *r.call_budget;
                if (parent_perm.call_budget) {
                    if (!requested) {
                        reject(tool + ": budget cannot widen to unlimited");
                    }
                    if (*requested > *parent_perm.call_budget) {
                        reject(tool + ": budget " + std::to_string(*requested) +
                               " exceeds parent " +
                               std::to_string(*parent_perm.call_budget));
                    }
                }
                perm.call_budget = requested;
            }
            if (r.blocked_argument_keys) {
                for (const std::string& key :
                     parent_perm.blocked_argument_keys) {
                    if (!r.blocked_argument_keys->count(key)) {
                        reject(tool + ": blocklist drops parent entry '" + key +
                               "'");
                    }
                }
                perm.blocked_argument_keys = *r.blocked_argument_keys;
            }
            if (r.value_constraints) {
                for (const auto& [key, parent_values] :
                     parent_perm.value_constraints) {
                    auto cv = r.value_constraints->find(key);
                    if (cv == r.value_constraints->end()) {
                        reject(tool + ": constraint on '" + key +
                               "' removed (unconstrained is wider)");
                    }
                    for (const std::string& v : cv->second) {
                        if (!parent_values.count(v)) {
                            reject(tool + ": value '" + v +
                                   "' not allowed by parent constraint on '" +
                                   key + "'");
                        }
                    }
                }
                perm.value_constraints = *r.value_constraints;
            }
        }
        child[tool] = std::move(perm);
    }
    return CapabilityToken(child_id, std::move(child), parent.token_id());
}

LayerResult authorize(const CapabilityToken& token, const ToolCallRequest& req,
                      const std::map<std::string, uint64_t>& used_counts) {
    const ToolPermission* perm = token.find(req.tool_name);
    if (!perm) {
        return LayerResult::deny("L4", "L4-not-granted",
                                 "tool '" + req.tool_name +
                                     "' is not granted by the session token");
    }
    if (perm->call_budget) {
        uint64_t used = 0;
        auto it = used_counts.find(req.tool_name);
        if (it != used_counts.end()) used = it->second;
        if (used >= *perm->call_budget) {
            return LayerResult::deny(
                "L4", "L4-budget",
                "call budget for '" + req.tool_name + "' exhausted (" +
                    std::to_string(*perm->call_budget) + " allowed)");
        }
    }
    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (perm->blocked_argument_keys.count(it.key())) {
            return LayerResult::deny("L4", "L4-blocklist",
                                     "argument '" + it.key() +
                                         "' is blocked for this tool");
        }
    }
    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        auto vc = perm->value_constraints.find(it.key());
        if (vc == perm->value_constraints.end()) continue;
        std::string value = it.value().is_string()
                                ? it.value().get<std::string>()
                                : it.value().dump();
        if (!vc->second.count(value)) {
            return LayerResult::deny(
                "L4", "L4-value",
                "argument '" + it.key() + "' value is outside the allowlist");
        }
    }
    return LayerResult::pass("L4");
}

}  // namespace armgate
