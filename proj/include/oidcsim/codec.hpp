#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oidcsim {

/// URL-safe Base64 without padding.
std::string base64url_encode(std::span<const std::uint8_t> bytes);
std::string base64url_encode(std::string_view text);

/// Returns nullopt on any character outside the URL-safe alphabet or an
/// impossible length (len % 4 == 1).
std::optional<std::string> base64url_decode(std::string_view encoded);

/// HMAC-SHA256 of `message` under `key`.
std::vector<std::uint8_t> hmac_sha256(std::string_view key, std::string_view message);

bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace oidcsim
