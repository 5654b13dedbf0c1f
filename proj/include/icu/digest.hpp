// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace icu {

/// Lower-case hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// Digest of a JSON value after canonicalization (object keys sorted, compact dump).
/// Two JSON documents that differ only in key order digest identically.
std::string canonical_digest(const nlohmann::json& value);

} // namespace icu
