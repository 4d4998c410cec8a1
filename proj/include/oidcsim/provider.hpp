#pragma once

#include <optional>
#include <string>

#include "oidcsim/http.hpp"
#include "oidcsim/protocol.hpp"

namespace oidcsim {

inline constexpr std::string_view kOpHost = "accounts.op.example";
inline constexpr std::string_view kOpSessionCookie = "op_sid";

struct OpResponse {
  enum class Kind { LoginForm, ConsentForm, AuthorizationResponseDelivery };
  Kind kind = Kind::LoginForm;
  std::string pending_id;                   // forms only
  std::optional<AuthorizationResponse> response;
  std::optional<Url> redirect_target;       // Redirect302 / FragmentOnRedirect
  std::optional<std::string> target_origin;  // PostMessageHtml
  std::optional<std::string> new_session_cookie;
};

/// The document the OP serves for postMessage delivery. Executing it posts
/// `response` to a listener, restricted to `target_origin`.
struct HtmlDocument {
  std::string target_origin;
  AuthorizationResponse response;

  HttpResponse to_http() const;
  static std::optional<HtmlDocument> from_http(const HttpResponse& response);
};

struct Credentials {
  std::string email;
  std::string password;
};

struct TokenInfo {
  std::string client_id;
  std::string user;
  ScopeSet scope;
  Timestamp expires_in = 0;
};

struct UserInfo {
  std::string numeric_id;
  std::string email;
  std::string display_name;
};

/// The Google-like OpenID Provider. Processes one message at a time and owns
/// its OpState.
class OpenIdProvider : public HttpActor {
 public:
  OpenIdProvider(OpState state, const LogicalClock& clock) : state_(std::move(state)), clock_(clock) {}

  std::string name() const override { return "op"; }
  HttpResponse handle(const HttpRequest& request) override;

  OpState& state() { return state_; }
  const OpState& state() const { return state_; }
  static std::string origin() { return "https://" + std::string(kOpHost); }

  OpResponse handle_authorization_request(const AuthorizationRequest& req,
                                          const std::optional<std::string>& browser_cookie);
  /// With credentials: log in and grant. Without: consent for an already
  /// authenticated browser.
  OpResponse authenticate_and_grant(const std::string& pending_id,
                                    const std::optional<Credentials>& credentials,
                                    const std::optional<std::string>& browser_cookie);
  HtmlDocument render_hybrid_delivery(const AuthorizationResponse& resp,
                                      const ClientRegistration& registration) const;
  TokenSet handle_token_endpoint(const std::string& code_value, const std::string& client_id,
                                 const std::string& client_secret, const std::string& redirect_uri);
  TokenInfo handle_tokeninfo(const std::string& access_token) const;
  UserInfo handle_userinfo(const std::string& access_token) const;

 private:
  const ClientRegistration& check_request(const AuthorizationRequest& req) const;
  OpResponse deliver(const AuthorizationRequest& req, const std::string& user);
  const AccessToken& live_token(const std::string& value) const;
  HttpResponse to_http(const OpResponse& resp) const;

  OpState state_;
  const LogicalClock& clock_;
};

}  // namespace oidcsim
