#include "armgate/patterns.hpp"

#include <fnmatch.h>

namespace armgate {

namespace {
const std::vector<std::pair<std::string, std::string>> kDefaultCredentials = {
    {"aws-access-key", "AKIA[0-9A-Z]{16}"},
    {"github-token", "gh[pousr]_[A-Za-z0-9]{36,}"},
    // eyJ is the base64url encoding of '{"', anchoring real JWT headers.
    {"jwt", "eyJ[A-Za-z0-9_-]+\\.[A-Za-z0-9_-]+\\.[A-Za-z0-9_-]+"},
    {"pem-private-key", "-----BEGIN [A-Z ]*PRIVATE KEY-----"},
};
}

std::vector<CredentialPattern> compile_credential_patterns(
    const std::vector<std::pair<std::string, std::string>>& raw) {
    std::vector<CredentialPattern> out;
    out.reserve(raw.size());
    for (const auto& [name, pattern] : raw) {
        out.push_back({name, pattern,
                       std::regex(pattern, std::regex::ECMAScript |
                                               std::regex::optimize)});
    }
    return out;
}

std::vector<CredentialPattern> default_credential_patterns() {
    return compile_credential_patterns(kDefaultCredentials);
}

std::optional<std::string> match_credential(
    const std::string& text, const std::vector<CredentialPattern>& patterns) {
    for (const auto& p : patterns) {
        if (std::regex_search(text, p.compiled)) return p.name;
    }
    return std::nullopt;
}

std::vector<std::string> default_sensitive_paths() {
    return {"~/.ssh/*", "/etc/shadow", "~/.aws/*"};
}

bool matches_sensitive_path(const std::string& path,
                            const std::vector<std::string>& globs,
                            const std::string& home_prefix) {
    std::string normalized = path;
    if (!normalized.empty() && normalized[0] == '~') {
        normalized = home_prefix + normalized.substr(1);
    }
    for (const std::string& glob : globs) {
        std::string expanded = glob;
        if (!expanded.empty() && expanded[0] == '~') {
            expanded = home_prefix + expanded.substr(1);
        }
        if (fnmatch(expanded.c_str(), normalized.c_str(), 0) == 0) return true;
    }
    return false;
}

bool looks_like_path(const std::string& value) {
    if (value.empty()) return false;
    if (value[0] == '/' || value[0] == '~') return true;
    return value.size() >= 2 && value[0] == '.' && value[1] == '/';
}

}  // namespace armgate
