#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/trust.hpp"

namespace armgate {

enum class DenialDetail { Full, Minimal };

// Per-tool trust assignment for upstream results.
struct SourceTrust {
    TrustLevel base = TrustLevel::ToolTrusted;
    std::map<std::string, TrustLevel> field_overrides;
};

struct PolicyConfig {
    TrustLevel threshold = TrustLevel::ToolTrusted;

    bool layer_l1 = true;
    bool layer_l2 = true;  // provenance slot: flat or graph per engine mode
    bool layer_l3 = true;
    bool layer_l4 = true;

    std::vector<std::pair<std::string, std::string>> credential_patterns;
    std::vector<std::string> sensitive_paths;
    std::set<std::string> sd_note_names = {"note", "comment", "metadata",
                                           "description"};
    std::set<std::string> sd_path_names = {"path", "file", "directory"};
    std::set<std::string> sd_url_names = {"url", "endpoint", "host"};

    std::string home_prefix = "/home/user";
    uint64_t max_string_length = 10000;
    uint64_t max_calls_per_tool = 100;
    uint64_t groundedness_threshold = 8;
    bool auto_link = true;
    DenialDetail denial_detail = DenialDetail::Full;

    std::map<std::string, SourceTrust> source_trust;

    PolicyConfig();

    static PolicyConfig from_json(const nlohmann::json& j);
    static PolicyConfig load_file(const std::string& path);
    nlohmann::json to_json() const;

    SourceTrust source_trust_for(const std::string& tool) const;
};

}  // namespace armgate
