#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "oidcsim/url.hpp"

namespace oidcsim {

enum class ChannelSecurity { Https, Http };

std::string_view to_string(ChannelSecurity channel);
inline ChannelSecurity channel_of(const Url& url) {
  return url.scheme == "http" ? ChannelSecurity::Http : ChannelSecurity::Https;
}
inline std::string scheme_for(ChannelSecurity channel) {
  return channel == ChannelSecurity::Http ? "http" : "https";
}

using CookieMap = std::map<std::string, std::string>;

/// An HTTP-shaped message. Only the parts the attacks touch are modeled.
struct HttpRequest {
  std::string method = "GET";
  Url url;
  Params form;  // POST body fields
  CookieMap cookies;

  ChannelSecurity channel() const { return channel_of(url); }
  /// Query parameters for GET, body fields for POST.
  const Params& params() const { return method == "POST" ? form : url.query; }
};

namespace response_kind {
inline constexpr std::string_view kPage = "page";
inline constexpr std::string_view kLoginForm = "login-form";
inline constexpr std::string_view kConsentForm = "consent-form";
inline constexpr std::string_view kPostMessageHtml = "postmessage-html";
inline constexpr std::string_view kRedirect = "redirect";
inline constexpr std::string_view kError = "error";
inline constexpr std::string_view kNotFound = "not-found";
inline constexpr std::string_view kJson = "json";
}  // namespace response_kind

struct HttpResponse {
  int status = 200;
  std::string kind = std::string(response_kind::kPage);
  std::optional<Url> location;
  Params fields;
  CookieMap set_cookies;

  static HttpResponse redirect(Url to) {
    HttpResponse r;
    r.status = 302;
    r.kind = std::string(response_kind::kRedirect);
    r.location = std::move(to);
    return r;
  }
  static HttpResponse error(int status, std::string_view code, std::string_view detail = {}) {
    HttpResponse r;
    r.status = status;
    r.kind = std::string(response_kind::kError);
    r.fields = {{"error", std::string(code)}};
    if (!detail.empty()) r.fields.emplace_back("detail", std::string(detail));
    return r;
  }
  std::optional<std::string> field(std::string_view key) const { return find_param(fields, key); }
};

class HttpActor {
 public:
  virtual ~HttpActor() = default;
  virtual std::string name() const = 0;
  virtual HttpResponse handle(const HttpRequest& request) = 0;
};

/// Host-name routing table. Does not own the actors.
class Network {
 public:
  void attach(const std::string& host, HttpActor& actor) { hosts_[host] = &actor; }
  HttpActor* find(const std::string& host) const {
    auto it = hosts_.find(host);
    return it == hosts_.end() ? nullptr : it->second;
  }
  HttpResponse dispatch(const HttpRequest& request) const;

 private:
  std::map<std::string, HttpActor*> hosts_;
};

}  // namespace oidcsim
