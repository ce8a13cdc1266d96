#include "armgate/audit.hpp"

#include <fstream>

#include "armgate/errors.hpp"
#include "armgate/sha256.hpp"

namespace armgate {

const std::string kGenesisHash(64, '0');

nlohmann::json AuditEntry::hashable_json() const {
    nlohmann::json j;
    j["index"] = index;
    j["tool_name"] = tool_name;
    j["arguments"] = arguments;
    j["outcome"] = outcome;
    j["reason"] = reason;
    j["layer_results"] = layer_results;
    j["prev_hash"] = prev_hash;
    return j;
}

nlohmann::json AuditEntry::to_json() const {
    nlohmann::json j = hashable_json();
    j["entry_hash"] = entry_hash;
    return j;
}

AuditEntry AuditEntry::from_json(const nlohmann::json& j) {
    AuditEntry e;
    e.index = j.at("index").get<uint64_t>();
    e.tool_name = j.at("tool_name").get<std::string>();
    e.arguments = j.at("arguments");
    e.outcome = j.at("outcome").get<std::string>();
    e.reason = j.at("reason").get<std::string>();
    e.layer_results = j.at("layer_results");
    e.prev_hash = j.at("prev_hash").get<std::string>();
    e.entry_hash = j.at("entry_hash").get<std::string>();
    return e;
}

AuditLog::AuditLog(std::string file_path) : file_path_(std::move(file_path)) {
    std::ofstream out(*file_path_, std::ios::trunc);
    if (!out) {
        throw ArmGateError("audit-io", "cannot open audit file " + *file_path_);
    }
}

const AuditEntry& AuditLog::append(const std::string& tool_name,
                                   const nlohmann::json& arguments,
                                   Outcome outcome, const std::string& reason,
                                   const nlohmann::json& layer_results) {
    AuditEntry e;
    e.index = entries_.size();
    e.tool_name = tool_name;
    e.arguments = arguments;
    e.outcome = outcome == Outcome::Allow ? "Allow" : "Deny";
    e.reason = reason;
    e.layer_results = layer_results;
    e.prev_hash = entries_.empty() ? kGenesisHash : entries_.back().entry_hash;
    e.entry_hash = sha256_of_json(e.hashable_json());
    entries_.push_back(std::move(e));
    if (file_path_) {
        std::ofstream out(*file_path_, std::ios::app);
        out << canonical_json(entries_.back().to_json()) << "\n";
    }
    return entries_.back();
}

VerifyReport AuditLog::verify() const { return verify_entries(entries_); }

VerifyReport AuditLog::verify_entries(const std::vector<AuditEntry>& entries) {
    for (size_t i = 0; i < entries.size(); ++i) {
        const AuditEntry& e = entries[i];
        std::string expected_prev =
            i == 0 ? kGenesisHash : entries[i - 1].entry_hash;
        if (e.index != i || e.prev_hash != expected_prev ||
            sha256_of_json(e.hashable_json()) != e.entry_hash) {
            return {false, i, "chain broken at entry " + std::to_string(i)};
        }
    }
    return {true, std::nullopt, "ok"};
}

std::vector<AuditEntry> AuditLog::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArmGateError("audit-io", "cannot open audit file " + path);
    }
    std::vector<AuditEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        entries.push_back(
            AuditEntry::from_json(nlohmann::json::parse(line)));
    }
    return entries;
}

VerifyReport AuditLog::verify_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ArmGateError("audit-io", "cannot open audit file " + path);
    }
    std::vector<AuditEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            entries.push_back(
                AuditEntry::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception&) {
            uint64_t index = entries.size();
            return {false, index,
                    "unparseable entry at index " + std::to_string(index)};
        }
    }
    return verify_entries(entries);
}

}  // namespace armgate
