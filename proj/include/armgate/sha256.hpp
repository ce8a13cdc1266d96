#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace armgate {

// Lowercase hex SHA-256 digest of the exact bytes given.
std::string sha256_hex(const std::string& bytes);

// Canonical serialization used everywhere a digest is computed over JSON:
// object keys sorted, no insignificant whitespace. nlohmann::json stores
// objects ordered by key already, so dump() gives us this directly; the
// helper exists so every call site shares one definition.
std::string canonical_json(const nlohmann::json& value);

std::string sha256_of_json(const nlohmann::json& value);

}  // namespace armgate
