#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/policy_types.hpp"

namespace armgate {

// Digests are stored as 64-char lowercase hex. Entry 0 links to the
// all-zero digest.
extern const std::string kGenesisHash;

struct AuditEntry {
    uint64_t index = 0;
    std::string tool_name;
    nlohmann::json arguments;
    std::string outcome;  // "Allow" or "Deny"
    std::string reason;
    nlohmann::json layer_results = nlohmann::json::array();
    std::string prev_hash;
    std::string entry_hash;

    // Canonical form of everything the hash covers (entry_hash excluded).
    nlohmann::json hashable_json() const;
    nlohmann::json to_json() const;
    static AuditEntry from_json(const nlohmann::json& j);
};

struct VerifyReport {
    bool ok = true;
    std::optional<uint64_t> first_broken_index;
    std::string message;
};

// Append-only, single writer. When a path is given every entry is also
// written through as one JSON line.
class AuditLog {
public:
    AuditLog() = default;
    explicit AuditLog(std::string file_path);

    const AuditEntry& append(const std::string& tool_name,
                             const nlohmann::json& arguments, Outcome outcome,
                             const std::string& reason,
                             const nlohmann::json& layer_results);

    const std::vector<AuditEntry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

    VerifyReport verify() const;

    static VerifyReport verify_entries(const std::vector<AuditEntry>& entries);
    static std::vector<AuditEntry> read_file(const std::string& path);
    static VerifyReport verify_file(const std::string& path);

private:
    std::vector<AuditEntry> entries_;
    std::optional<std::string> file_path_;
};

}  // namespace armgate
