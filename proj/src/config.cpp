#include "armgate/config.hpp"

#include <fstream>

#include "armgate/errors.hpp"
#include "armgate/patterns.hpp"

namespace armgate {

namespace {

TrustLevel parse_trust(const nlohmann::json& j, const char* field) {
    auto level = trust_from_name(j.get<std::string>());
    if (!level) {
        throw ArmGateError("config-invalid", std::string(field) +
                                                 ": unknown trust level '" +
                                                 j.get<std::string>() + "'");
    }
    return *level;
}

std::set<std::string> parse_names(const nlohmann::json& j) {
    std::set<std::string> out;
    for (const auto& v : j) out.insert(v.get<std::string>());
    return out;
}

}  // namespace

PolicyConfig::PolicyConfig() {
    for (const auto& p : default_credential_patterns()) {
        credential_patterns.emplace_back(p.name, p.pattern);
    }
    sensitive_paths = default_sensitive_paths();
}

PolicyConfig PolicyConfig::from_json(const nlohmann::json& j) {
    PolicyConfig cfg;
    if (j.contains("threshold")) {
        cfg.threshold = parse_trust(j["threshold"], "threshold");
    }
    if (j.contains("layers")) {
        const auto& layers = j["layers"];
        if (layers.contains("L1")) cfg.layer_l1 = layers["L1"].get<bool>();
        if (layers.contains("L2")) cfg.layer_l2 = layers["L2"].get<bool>();
        if (layers.contains("L3")) cfg.layer_l3 = layers["L3"].get<bool>();
        if (layers.contains("L4")) cfg.layer_l4 = layers["L4"].get<bool>();
    }
    if (j.contains("credential_patterns")) {
        cfg.credential_patterns.clear();
        for (auto it = j["credential_patterns"].begin();
             it != j["credential_patterns"].end(); ++it) {
            cfg.credential_patterns.emplace_back(it.key(),
                                                 it.value().get<std::string>());
        }
    }
    if (j.contains("sensitive_paths")) {
        cfg.sensitive_paths.clear();
        for (const auto& v : j["sensitive_paths"]) {
            cfg.sensitive_paths.push_back(v.get<std::string>());
        }
    }
    if (j.contains("sd_note_names")) cfg.sd_note_names = parse_names(j["sd_note_names"]);
    if (j.contains("sd_path_names")) cfg.sd_path_names = parse_names(j["sd_path_names"]);
    if (j.contains("sd_url_names")) cfg.sd_url_names = parse_names(j["sd_url_names"]);
    if (j.contains("home_prefix")) cfg.home_prefix = j["home_prefix"].get<std::string>();
    if (j.contains("max_string_length")) {
        cfg.max_string_length = j["max_string_length"].get<uint64_t>();
    }
    if (j.contains("max_calls_per_tool")) {
        cfg.max_calls_per_tool = j["max_calls_per_tool"].get<uint64_t>();
    }
    if (j.contains("groundedness_threshold")) {
        cfg.groundedness_threshold = j["groundedness_threshold"].get<uint64_t>();
    }
    if (j.contains("auto_link")) cfg.auto_link = j["auto_link"].get<bool>();
    if (j.contains("denial_detail")) {
        std::string d = j["denial_detail"].get<std::string>();
        if (d == "full") {
            cfg.denial_detail = DenialDetail::Full;
        } else if (d == "minimal") {
            cfg.denial_detail = DenialDetail::Minimal;
        } else {
            throw ArmGateError("config-invalid",
                               "denial_detail must be 'full' or 'minimal'");
        }
    }
    if (j.contains("source_trust")) {
        for (auto it = j["source_trust"].begin(); it != j["source_trust"].end();
             ++it) {
            SourceTrust st;
            const auto& v = it.value();
            if (v.is_string()) {
                st.base = parse_trust(v, "source_trust");
            } else {
                if (v.contains("base")) st.base = parse_trust(v["base"], "source_trust.base");
                if (v.contains("field_overrides")) {
                    for (auto fo = v["field_overrides"].begin();
                         fo != v["field_overrides"].end(); ++fo) {
                        st.field_overrides[fo.key()] =
                            parse_trust(fo.value(), "field_overrides");
                    }
                }
            }
            cfg.source_trust[it.key()] = std::move(st);
        }
    }
    return cfg;
}

PolicyConfig PolicyConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArmGateError("config-invalid", "cannot open policy file " + path);
    }
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

nlohmann::json PolicyConfig::to_json() const {
    nlohmann::json j;
    j["threshold"] = trust_name(threshold);
    j["layers"] = {{"L1", layer_l1}, {"L2", layer_l2}, {"L3", layer_l3},
                   {"L4", layer_l4}};
    nlohmann::json creds = nlohmann::json::object();
    for (const auto& [name, pattern] : credential_patterns) creds[name] = pattern;
    j["credential_patterns"] = creds;
    j["sensitive_paths"] = sensitive_paths;
    j["sd_note_names"] = sd_note_names;
    j["sd_path_names"] = sd_path_names;
    j["sd_url_names"] = sd_url_names;
    j["home_prefix"] = home_prefix;
    j["max_string_length"] = max_string_length;
    j["max_calls_per_tool"] = max_calls_per_tool;
    j["groundedness_threshold"] = groundedness_threshold;
    j["auto_link"] = auto_link;
    j["denial_detail"] = denial_detail == DenialDetail::Full ? "full" : "minimal";
    nlohmann::json st = nlohmann::json::object();
    for (const auto& [tool, trust] : source_trust) {
        nlohmann::json entry;
        entry["base"] = trust_name(trust.base);
        nlohmann::json fo = nlohmann::json::object();
        for (const auto& [key, level] : trust.field_overrides) {
            fo[key] = trust_name(level);
        }
        entry["field_overrides"] = fo;
        st[tool] = entry;
    }
    j["source_trust"] = st;
    return j;
}

SourceTrust PolicyConfig::source_trust_for(const std::string& tool) const {
    auto it = source_trust.find(tool);
    if (it != source_trust.end()) return it->second;
    return SourceTrust{};
}

}  // namespace armgate
