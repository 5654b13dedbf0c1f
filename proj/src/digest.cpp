// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/digest.hpp"

#include <array>

#include <openssl/sha.h>

namespace icu {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md.data());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(md.size() * 2);
    for (unsigned char b : md) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

std::string canonical_digest(const nlohmann::json& value) {
    // nlohmann::json objects are std::map-backed, so dump() already emits sorted keys.
    return sha256_hex(value.dump());
}

} // namespace icu
