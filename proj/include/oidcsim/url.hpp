#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oidcsim {

using Params = std::vector<std::pair<std::string, std::string>>;

std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);
std::string encode_params(const Params& params);
Params parse_params(std::string_view text);

/// First value for `key`, if any.
std::optional<std::string> find_param(const Params& params, std::string_view key);

/// Absolute URL, scheme://host/path?query#fragment. Ports and userinfo are
/// not modeled.
struct Url {
  std::string scheme = "https";
  std::string host;
  std::string path = "/";
  Params query;
  std::optional<std::string> fragment;

  static Url parse(std::string_view text);

  std::string origin() const { return scheme + "://" + host; }
  /// Serialized form without the fragment, which browsers never send.
  std::string without_fragment() const;
  std::string str() const;

  Url with_scheme(std::string s) const {
    Url u = *this;
    u.scheme = std::move(s);
    return u;
  }

  friend bool operator==(const Url&, const Url&) = default;
};

}  // namespace oidcsim
