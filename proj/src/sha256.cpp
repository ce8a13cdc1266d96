#include "armgate/sha256.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace armgate {

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int digest_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &digest_len,
                   EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0f]);
    }
    return out;
}

std::string canonical_json(const nlohmann::json& value) {
    return value.dump();
}

std::string sha256_of_json(const nlohmann::json& value) {
    return sha256_hex(canonical_json(value));
}

}  // namespace armgate
