#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace armgate {

struct CredentialPattern {
    std::string name;
    std::string pattern;
    std::regex compiled;
};

// Curated credential formats; extensible via policy config.
std::vector<CredentialPattern> default_credential_patterns();

std::vector<CredentialPattern> compile_credential_patterns(
    const std::vector<std::pair<std::string, std::string>>& raw);

// Name of the first matching pattern, if any substring of text matches.
std::optional<std::string> match_credential(
    const std::string& text, const std::vector<CredentialPattern>& patterns);

// Protected path globs. `~` in a pattern expands against home_prefix;
// matching is pure string matching on the normalized path, never the
// filesystem.
std::vector<std::string> default_sensitive_paths();

bool matches_sensitive_path(const std::string& path,
                            const std::vector<std::string>& globs,
                            const std::string& home_prefix);

// A string is path-like when it starts with '/', '~', or './'.
bool looks_like_path(const std::string& value);

}  // namespace armgate
