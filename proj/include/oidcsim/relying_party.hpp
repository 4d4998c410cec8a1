#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oidcsim/http.hpp"
#include "oidcsim/protocol.hpp"
#include "oidcsim/provider.hpp"

namespace oidcsim {

enum class RpFlag {
  AUTH_BY_GOOGLE_ID,
  GOOGLE_ID_WITH_CODE,
  GOOGLE_ID_WITH_ACCESS_TOKEN,
  SUBMITS_ACCESS_TOKEN,
  AUTH_BY_ACCESS_TOKEN,
  VERIFIES_ACCESS_TOKEN,
  SUBMITS_ID_TOKEN,
  PLAINTEXT_SIGNIN_ENDPOINT,
  TOKEN_IN_PLAINTEXT_COOKIE,
  RETURNS_ACCESS_TOKEN_TO_BROWSER,
  RETURNS_USERINFO_PLAINTEXT,
  DOWNGRADE_TO_HTTP_AFTER_SIGNIN,
  NO_STATE,
  FIXED_STATE,
  NULL_STATE_FORWARDED,
  CLIENT_SUBMITS_VIA_POST,
  REQUIRES_EMAIL_WITH_TOKEN,
};

using RpFlags = std::set<RpFlag>;

const std::vector<RpFlag>& all_rp_flags();
std::string_view to_string(RpFlag flag);
std::optional<RpFlag> parse_rp_flag(std::string_view text);

/// Adds the flags implied by `flags` (e.g. AUTH_BY_ACCESS_TOKEN needs
/// SUBMITS_ACCESS_TOKEN).
RpFlags implied_closure(RpFlags flags);

/// The constant a FIXED_STATE RP uses for every login.
inline constexpr std::string_view kFixedState = "STATE";

struct RpConfig {
  std::string name;
  FlowType flow = FlowType::Hybrid;
  ClientRegistration registration;
  RpFlags flags;

  bool has(RpFlag f) const { return flags.contains(f); }
  std::string host() const;
  std::string origin() const { return "https://" + host(); }

  bool authenticates_by_google_id() const {
    return has(RpFlag::AUTH_BY_GOOGLE_ID) || has(RpFlag::GOOGLE_ID_WITH_ACCESS_TOKEN);
  }
  bool submits_google_id() const {
    return authenticates_by_google_id() || has(RpFlag::GOOGLE_ID_WITH_CODE);
  }
  bool weak_state() const {
    return has(RpFlag::NO_STATE) || has(RpFlag::FIXED_STATE) || has(RpFlag::NULL_STATE_FORWARDED);
  }
  /// No customisation of what the RP client sends back.
  bool compliant_submission() const;
  std::string signin_method() const { return has(RpFlag::CLIENT_SUBMITS_VIA_POST) ? "POST" : "GET"; }
  ChannelSecurity signin_channel() const {
    return has(RpFlag::PLAINTEXT_SIGNIN_ENDPOINT) ? ChannelSecurity::Http : ChannelSecurity::Https;
  }
  ChannelSecurity landing_channel() const;
  Url signin_url() const;   // hybrid / client-side sign-in endpoint
  Url callback_url() const; // code flow redirect_uri
  Url login_url() const;

  /// Throws InconsistentRegistration on a flag combination the model forbids.
  void validate() const;

  /// Standard registration for `name`: https://<name>.rp.example origin or
  /// /callback redirect_uri.
  static RpConfig make(std::string name, FlowType flow, RpFlags flags, std::string client_secret);
  /// Empty flag set with session-bound state.
  static RpConfig hardened(std::string name, FlowType flow, std::string client_secret);
};

struct SignInSubmission {
  std::optional<std::string> code;
  std::optional<std::string> access_token;
  std::optional<std::string> id_token;
  std::optional<std::string> google_id;
  std::optional<std::string> email;
  std::optional<StateValue> state;
  std::string http_method = "GET";
  ChannelSecurity channel = ChannelSecurity::Https;

  Params to_params() const;
  static SignInSubmission from_request(const HttpRequest& request);
  HttpRequest to_request(const RpConfig& config) const;
};

/// What the RP client running in the browser posts back after receiving the
/// authorization response. `client_state` is the session-bound value the RP
/// embedded in its login page.
SignInSubmission rp_client_script(const RpConfig& config, const AuthorizationResponse& delivered,
                                  const std::optional<std::string>& client_state);

struct RpSession {
  std::optional<std::string> pending_state;
  std::optional<std::string> logged_in_user;
  std::optional<std::string> access_token;
  std::optional<UserInfo> profile;
};

struct SignInResult {
  std::string session_cookie;
  std::string user;
  HttpResponse page;
};

inline constexpr std::string_view kRpSessionCookie = "rp_sid";
inline constexpr std::string_view kRpTokenCookie = "g_token";

class RelyingParty : public HttpActor {
 public:
  RelyingParty(RpConfig config, OpenIdProvider& op, const LogicalClock& clock, std::uint64_t seed);

  std::string name() const override { return config_.name; }
  HttpResponse handle(const HttpRequest& request) override;

  const RpConfig& config() const { return config_; }
  const std::map<std::string, RpSession>& sessions() const { return sessions_; }
  std::optional<std::string> logged_in_user(const std::string& session_cookie) const;

  HttpResponse render_login_page(const std::optional<std::string>& session_cookie);
  SignInResult handle_signin_endpoint(const SignInSubmission& submission,
                                      const std::optional<std::string>& session_cookie);
  SignInResult handle_code_flow_callback(const Params& redirect_params,
                                         const std::optional<std::string>& session_cookie);
  HttpResponse render_landing_page(const std::optional<std::string>& session_cookie) const;

 private:
  void check_state(const std::optional<StateValue>& state, const std::optional<std::string>& session_cookie) const;
  SignInResult establish_session(const std::string& user, std::optional<std::string> access_token,
                                 std::optional<UserInfo> profile);
  std::string user_from_code(const std::string& code, std::optional<std::string>& access_token,
                             std::optional<UserInfo>& profile);
  std::optional<StateValue> request_state_for(const std::string& session_cookie);

  RpConfig config_;
  OpenIdProvider& op_;
  const LogicalClock& clock_;
  SeededRng rng_;
  std::map<std::string, RpSession> sessions_;
};

}  // namespace oidcsim
