#include "oidcsim/relying_party.hpp"

#include <array>
#include <utility>

#include "oidcsim/error.hpp"

namespace oidcsim {
namespace {

constexpr std::array<std::pair<RpFlag, std::string_view>, 17> kFlagNames{{
    {RpFlag::AUTH_BY_GOOGLE_ID, "AUTH_BY_GOOGLE_ID"},
    {RpFlag::GOOGLE_ID_WITH_CODE, "GOOGLE_ID_WITH_CODE"},
    {RpFlag::GOOGLE_ID_WITH_ACCESS_TOKEN, "GOOGLE_ID_WITH_ACCESS_TOKEN"},
    {RpFlag::SUBMITS_ACCESS_TOKEN, "SUBMITS_ACCESS_TOKEN"},
    {RpFlag::AUTH_BY_ACCESS_TOKEN, "AUTH_BY_ACCESS_TOKEN"},
    {RpFlag::VERIFIES_ACCESS_TOKEN, "VERIFIES_ACCESS_TOKEN"},
    {RpFlag::SUBMITS_ID_TOKEN, "SUBMITS_ID_TOKEN"},
    {RpFlag::PLAINTEXT_SIGNIN_ENDPOINT, "PLAINTEXT_SIGNIN_ENDPOINT"},
    {RpFlag::TOKEN_IN_PLAINTEXT_COOKIE, "TOKEN_IN_PLAINTEXT_COOKIE"},
    {RpFlag::RETURNS_ACCESS_TOKEN_TO_BROWSER, "RETURNS_ACCESS_TOKEN_TO_BROWSER"},
    {RpFlag::RETURNS_USERINFO_PLAINTEXT, "RETURNS_USERINFO_PLAINTEXT"},
    {RpFlag::DOWNGRADE_TO_HTTP_AFTER_SIGNIN, "DOWNGRADE_TO_HTTP_AFTER_SIGNIN"},
    {RpFlag::NO_STATE, "NO_STATE"},
    {RpFlag::FIXED_STATE, "FIXED_STATE"},
    {RpFlag::NULL_STATE_FORWARDED, "NULL_STATE_FORWARDED"},
    {RpFlag::CLIENT_SUBMITS_VIA_POST, "CLIENT_SUBMITS_VIA_POST"},
    {RpFlag::REQUIRES_EMAIL_WITH_TOKEN, "REQUIRES_EMAIL_WITH_TOKEN"},
}};

// Flags describing what the in-browser RP client sends; meaningless without one.
constexpr std::array kClientScriptFlags{
    RpFlag::AUTH_BY_GOOGLE_ID,     RpFlag::GOOGLE_ID_WITH_CODE,   RpFlag::GOOGLE_ID_WITH_ACCESS_TOKEN,
    RpFlag::SUBMITS_ACCESS_TOKEN,  RpFlag::AUTH_BY_ACCESS_TOKEN,  RpFlag::VERIFIES_ACCESS_TOKEN,
    RpFlag::SUBMITS_ID_TOKEN,      RpFlag::CLIENT_SUBMITS_VIA_POST, RpFlag::REQUIRES_EMAIL_WITH_TOKEN,
};

ProtocolError rejected(const std::string& why) { return ProtocolError(Errc::SignInRejected, why); }

}  // namespace

const std::vector<RpFlag>& all_rp_flags() {
  static const std::vector<RpFlag> flags = [] {
    std::vector<RpFlag> v;
    for (const auto& [f, _] : kFlagNames) v.push_back(f);
    return v;
  }();
  return flags;
}

std::string_view to_string(RpFlag flag) {
  for (const auto& [f, n] : kFlagNames) {
    if (f == flag) return n;
  }
  return "?";
}

std::optional<RpFlag> parse_rp_flag(std::string_view text) {
  for (const auto& [f, n] : kFlagNames) {
    if (n == text) return f;
  }
  return std::nullopt;
}

RpFlags implied_closure(RpFlags flags) {
  if (flags.contains(RpFlag::VERIFIES_ACCESS_TOKEN) || flags.contains(RpFlag::REQUIRES_EMAIL_WITH_TOKEN)) {
    flags.insert(RpFlag::AUTH_BY_ACCESS_TOKEN);
  }
  if (flags.contains(RpFlag::AUTH_BY_ACCESS_TOKEN) || flags.contains(RpFlag::GOOGLE_ID_WITH_ACCESS_TOKEN)) {
    flags.insert(RpFlag::SUBMITS_ACCESS_TOKEN);
  }
  return flags;
}

std::string RpConfig::host() const {
  const auto& url = registration.origin ? *registration.origin : registration.redirect_uri.value_or("");
  if (url.empty()) return name + ".rp.example";
  return Url::parse(url).host;
}

bool RpConfig::compliant_submission() const {
  return !(has(RpFlag::SUBMITS_ACCESS_TOKEN) || has(RpFlag::SUBMITS_ID_TOKEN) ||
           has(RpFlag::AUTH_BY_GOOGLE_ID) || has(RpFlag::GOOGLE_ID_WITH_ACCESS_TOKEN) ||
           has(RpFlag::AUTH_BY_ACCESS_TOKEN));
}

ChannelSecurity RpConfig::landing_channel() const {
  const bool plain = has(RpFlag::PLAINTEXT_SIGNIN_ENDPOINT) || has(RpFlag::DOWNGRADE_TO_HTTP_AFTER_SIGNIN) ||
                     has(RpFlag::TOKEN_IN_PLAINTEXT_COOKIE) || has(RpFlag::RETURNS_USERINFO_PLAINTEXT) ||
                     has(RpFlag::RETURNS_ACCESS_TOKEN_TO_BROWSER);
  return plain ? ChannelSecurity::Http : ChannelSecurity::Https;
}

Url RpConfig::signin_url() const {
  Url u;
  u.scheme = scheme_for(signin_channel());
  u.host = host();
  u.path = "/signin/google";
  return u;
}

Url RpConfig::callback_url() const {
  return Url::parse(registration.redirect_uri.value_or("https://" + host() + "/callback"));
}

Url RpConfig::login_url() const {
  Url u;
  u.host = host();
  u.path = "/login";
  return u;
}

void RpConfig::validate() const {
  registration.validate();
  if (registration.registered_flow != flow) {
    throw ProtocolError(Errc::InconsistentRegistration, name + ": registration flow differs from RP flow");
  }
  auto fail = [&](const std::string& why) { throw ProtocolError(Errc::InconsistentRegistration, name + ": " + why); };
  if (has(RpFlag::AUTH_BY_ACCESS_TOKEN) && !has(RpFlag::SUBMITS_ACCESS_TOKEN)) {
    fail("AUTH_BY_ACCESS_TOKEN requires SUBMITS_ACCESS_TOKEN");
  }
  if (has(RpFlag::VERIFIES_ACCESS_TOKEN) && !has(RpFlag::AUTH_BY_ACCESS_TOKEN)) {
    fail("VERIFIES_ACCESS_TOKEN requires AUTH_BY_ACCESS_TOKEN");
  }
  if (has(RpFlag::REQUIRES_EMAIL_WITH_TOKEN) && !has(RpFlag::AUTH_BY_ACCESS_TOKEN)) {
    fail("REQUIRES_EMAIL_WITH_TOKEN requires AUTH_BY_ACCESS_TOKEN");
  }
  if (has(RpFlag::GOOGLE_ID_WITH_ACCESS_TOKEN) && !has(RpFlag::SUBMITS_ACCESS_TOKEN)) {
    fail("GOOGLE_ID_WITH_ACCESS_TOKEN requires SUBMITS_ACCESS_TOKEN");
  }
  if (submits_google_id() && flow != FlowType::Hybrid) fail("Google-ID flags require the Hybrid flow");
  if (flow == FlowType::AuthorizationCode) {
    for (auto f : kClientScriptFlags) {
      if (has(f)) fail(std::string(to_string(f)) + " needs an RP client (Hybrid or ClientSide)");
    }
  }
  const int state_flags = has(RpFlag::NO_STATE) + has(RpFlag::FIXED_STATE) + has(RpFlag::NULL_STATE_FORWARDED);
  if (state_flags > 1) fail("at most one of NO_STATE, FIXED_STATE, NULL_STATE_FORWARDED");
}

RpConfig RpConfig::make(std::string name, FlowType flow, RpFlags flags, std::string client_secret) {
  RpConfig c;
  c.name = name;
  c.flow = flow;
  c.flags = std::move(flags);
  c.registration.client_id = name;
  c.registration.client_secret = std::move(client_secret);
  c.registration.registered_flow = flow;
  const std::string host = name + ".rp.example";
  if (flow == FlowType::AuthorizationCode) {
    c.registration.redirect_uri = scheme_for(c.signin_channel()) + "://" + host + "/callback";
  } else {
    c.registration.origin = "https://" + host;
  }
  return c;
}

RpConfig RpConfig::hardened(std::string name, FlowType flow, std::string client_secret) {
  return make(std::move(name), flow, {}, std::move(client_secret));
}

Params SignInSubmission::to_params() const {
  Params p;
  if (code) p.emplace_back("code", *code);
  if (access_token) p.emplace_back("access_token", *access_token);
  if (id_token) p.emplace_back("id_token", *id_token);
  if (google_id) p.emplace_back("google_id", *google_id);
  if (email) p.emplace_back("email", *email);
  if (state) p.emplace_back("state", state->wire());
  return p;
}

SignInSubmission SignInSubmission::from_request(const HttpRequest& request) {
  const auto& p = request.params();
  SignInSubmission s;
  s.code = find_param(p, "code");
  s.access_token = find_param(p, "access_token");
  s.id_token = find_param(p, "id_token");
  s.google_id = find_param(p, "google_id");
  s.email = find_param(p, "email");
  if (auto st = find_param(p, "state")) s.state = StateValue::from_wire(*st);
  s.http_method = request.method;
  s.channel = request.channel();
  return s;
}

HttpRequest SignInSubmission::to_request(const RpConfig& config) const {
  HttpRequest req;
  req.method = http_method;
  req.url = config.signin_url();
  req.url.scheme = scheme_for(channel);
  if (http_method == "POST") {
    req.form = to_params();
  } else {
    req.url.query = to_params();
  }
  return req;
}

SignInSubmission rp_client_script(const RpConfig& config, const AuthorizationResponse& delivered,
                                  const std::optional<std::string>& client_state) {
  SignInSubmission s;
  std::optional<IdTokenClaims> claims;
  if (delivered.id_token) {
    try {
      claims = decode_id_token_claims(*delivered.id_token);
    } catch (const ProtocolError&) {
    }
  }
  if (config.compliant_submission() || config.has(RpFlag::GOOGLE_ID_WITH_CODE)) s.code = delivered.code;
  if (config.submits_google_id() && claims) s.google_id = claims->subject;
  if (config.has(RpFlag::SUBMITS_ACCESS_TOKEN)) s.access_token = delivered.access_token;
  if (config.has(RpFlag::SUBMITS_ID_TOKEN) || config.flow == FlowType::ClientSide) s.id_token = delivered.id_token;
  if (config.has(RpFlag::REQUIRES_EMAIL_WITH_TOKEN) && claims) s.email = claims->email;

  if (config.has(RpFlag::NO_STATE)) {
    s.state.reset();
  } else if (config.has(RpFlag::FIXED_STATE)) {
    s.state = StateValue::of(std::string(kFixedState));
  } else if (config.has(RpFlag::NULL_STATE_FORWARDED)) {
    s.state = delivered.state.value_or(StateValue::null_marker());
  } else if (client_state) {
    s.state = StateValue::of(*client_state);
  }
  s.http_method = config.signin_method();
  s.channel = config.signin_channel();
  return s;
}

RelyingParty::RelyingParty(RpConfig config, OpenIdProvider& op, const LogicalClock& clock, std::uint64_t seed)
    : config_(std::move(config)), op_(op), clock_(clock), rng_(seed) {
  config_.validate();
}

std::optional<std::string> RelyingParty::logged_in_user(const std::string& session_cookie) const {
  auto it = sessions_.find(session_cookie);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.logged_in_user;
}

std::optional<StateValue> RelyingParty::request_state_for(const std::string& session_cookie) {
  if (config_.has(RpFlag::NO_STATE)) return std::nullopt;
  if (config_.has(RpFlag::FIXED_STATE)) return StateValue::of(std::string(kFixedState));
  if (config_.has(RpFlag::NULL_STATE_FORWARDED) && config_.flow == FlowType::AuthorizationCode) {
    return StateValue::null_marker();
  }
  return StateValue::session_bound(*sessions_.at(session_cookie).pending_state, session_cookie);
}

HttpResponse RelyingParty::render_login_page(const std::optional<std::string>& session_cookie) {
  std::string cookie;
  if (session_cookie && sessions_.contains(*session_cookie)) {
    cookie = *session_cookie;
  } else {
    cookie = rng_.token();
    sessions_[cookie] = {};
  }
  auto& session = sessions_[cookie];
  session.pending_state = rng_.token();

  const auto req = build_authorization_request(config_.registration, config_.flow, request_state_for(cookie),
                                               {"openid", "email", "profile"},
                                               op_.state().flags.null_state_bug);
  Url authorize;
  authorize.host = std::string(kOpHost);
  authorize.path = "/o/auth";
  authorize.query = req.to_query();

  HttpResponse page;
  page.fields = {{"authorize_url", authorize.str()}};
  if (config_.flow != FlowType::AuthorizationCode) page.fields.emplace_back("client_state", *session.pending_state);
  page.set_cookies[std::string(kRpSessionCookie)] = cookie;
  return page;
}

void RelyingParty::check_state(const std::optional<StateValue>& state,
                               const std::optional<std::string>& session_cookie) const {
  if (config_.has(RpFlag::NO_STATE)) return;
  if (config_.has(RpFlag::FIXED_STATE)) {
    if (state && state->value == kFixedState) return;
    throw ProtocolError(Errc::StateMismatch, "expected the fixed state");
  }
  if (config_.has(RpFlag::NULL_STATE_FORWARDED) && state && state->is_null()) return;

  const RpSession* session = nullptr;
  if (session_cookie) {
    if (auto it = sessions_.find(*session_cookie); it != sessions_.end()) session = &it->second;
  }
  if (session == nullptr || !session->pending_state || !state || state->is_null() ||
      *state->value != *session->pending_state) {
    throw ProtocolError(Errc::StateMismatch, "state is not bound to this browser session");
  }
}

std::string RelyingParty::user_from_code(const std::string& code, std::optional<std::string>& access_token,
                                         std::optional<UserInfo>& profile) {
  const auto redirect = config_.flow == FlowType::AuthorizationCode ? config_.registration.redirect_uri.value_or("")
                                                                    : std::string(kPostMessageRedirect);
  try {
    const auto tokens = op_.handle_token_endpoint(code, config_.registration.client_id,
                                                  config_.registration.client_secret, redirect);
    const auto claims = verify_id_token(tokens.id_token.encoded, op_.state().signing_key,
                                        config_.registration.client_id, clock_.now());
    access_token = tokens.access_token.value;
    profile = op_.handle_userinfo(tokens.access_token.value);
    return claims.subject;
  } catch (const ProtocolError& e) {
    throw rejected(std::string("code exchange failed: ") + e.what());
  }
}

SignInResult RelyingParty::establish_session(const std::string& user, std::optional<std::string> access_token,
                                             std::optional<UserInfo> profile) {
  const auto cookie = rng_.token();
  sessions_[cookie] = RpSession{std::nullopt, user, std::move(access_token), std::move(profile)};
  const auto& session = sessions_[cookie];

  Url landing;
  landing.scheme = scheme_for(config_.landing_channel());
  landing.host = config_.host();
  landing.path = "/home";
  SignInResult result{cookie, user, HttpResponse::redirect(landing)};
  result.page.set_cookies[std::string(kRpSessionCookie)] = cookie;
  if (config_.has(RpFlag::TOKEN_IN_PLAINTEXT_COOKIE) && session.access_token) {
    result.page.set_cookies[std::string(kRpTokenCookie)] = *session.access_token;
  }
  return result;
}

SignInResult RelyingParty::handle_signin_endpoint(const SignInSubmission& submission,
                                                  const std::optional<std::string>& session_cookie) {
  check_state(submission.state, session_cookie);
  const auto& own_client = config_.registration.client_id;

  if (config_.authenticates_by_google_id()) {
    if (!submission.google_id) throw ProtocolError(Errc::MissingField, "google_id");
    std::optional<UserInfo> profile;
    if (submission.access_token) {
      try {
        profile = op_.handle_userinfo(*submission.access_token);
      } catch (const ProtocolError&) {
      }
    }
    return establish_session(*submission.google_id, submission.access_token, profile);
  }

  if (config_.has(RpFlag::AUTH_BY_ACCESS_TOKEN)) {
    if (!submission.access_token) throw ProtocolError(Errc::MissingField, "access_token");
    try {
      if (config_.has(RpFlag::VERIFIES_ACCESS_TOKEN)) {
        const auto info = op_.handle_tokeninfo(*submission.access_token);
        if (info.client_id != own_client) throw rejected("access_token issued to " + info.client_id);
      }
      const auto info = op_.handle_userinfo(*submission.access_token);
      // Extra evidence that the bearer of the token can also fetch trivially.
      if (config_.has(RpFlag::REQUIRES_EMAIL_WITH_TOKEN) && submission.email != info.email) {
        throw rejected("email does not match token owner");
      }
      return establish_session(info.numeric_id, submission.access_token, info);
    } catch (const ProtocolError& e) {
      if (e.code() == Errc::SignInRejected) throw;
      throw rejected(e.what());
    }
  }

  if (submission.code) {
    std::optional<std::string> token;
    std::optional<UserInfo> profile;
    const auto user = user_from_code(*submission.code, token, profile);
    return establish_session(user, token, profile);
  }

  if (submission.id_token) {
    try {
      const auto claims = verify_id_token(*submission.id_token, op_.state().signing_key, own_client, clock_.now());
      return establish_session(claims.subject, std::nullopt, UserInfo{claims.subject, claims.email, ""});
    } catch (const ProtocolError& e) {
      throw rejected(e.what());
    }
  }
  throw ProtocolError(Errc::MissingField, "no authentication material");
}

SignInResult RelyingParty::handle_code_flow_callback(const Params& redirect_params,
                                                     const std::optional<std::string>& session_cookie) {
  if (config_.flow != FlowType::AuthorizationCode) throw rejected("not a code-flow RP");
  std::optional<StateValue> state;
  if (auto s = find_param(redirect_params, "state")) state = StateValue::from_wire(*s);
  check_state(state, session_cookie);
  auto code = find_param(redirect_params, "code");
  if (!code) throw ProtocolError(Errc::MissingField, "code");
  std::optional<std::string> token;
  std::optional<UserInfo> profile;
  const auto user = user_from_code(*code, token, profile);
  return establish_session(user, token, profile);
}

HttpResponse RelyingParty::render_landing_page(const std::optional<std::string>& session_cookie) const {
  HttpResponse page;
  const RpSession* session = nullptr;
  if (session_cookie) {
    if (auto it = sessions_.find(*session_cookie); it != sessions_.end()) session = &it->second;
  }
  if (session == nullptr || !session->logged_in_user) {
    page.fields = {{"status", "anonymous"}};
    return page;
  }
  page.fields = {{"status", "signed-in"}};
  if (config_.has(RpFlag::RETURNS_USERINFO_PLAINTEXT) || config_.has(RpFlag::DOWNGRADE_TO_HTTP_AFTER_SIGNIN)) {
    page.fields.emplace_back("sub", *session->logged_in_user);
    if (session->profile) {
      page.fields.emplace_back("email", session->profile->email);
      page.fields.emplace_back("name", session->profile->display_name);
    }
  }
  if (config_.has(RpFlag::RETURNS_ACCESS_TOKEN_TO_BROWSER) && session->access_token) {
    page.fields.emplace_back("access_token", *session->access_token);
  }
  return page;
}

HttpResponse RelyingParty::handle(const HttpRequest& request) {
  std::optional<std::string> cookie;
  if (auto c = request.cookies.find(std::string(kRpSessionCookie)); c != request.cookies.end()) cookie = c->second;
  const auto& path = request.url.path;
  try {
    if (path == "/login") return render_login_page(cookie);
    if (path == "/home") return render_landing_page(cookie);
    if (path == "/signin/google" && config_.flow != FlowType::AuthorizationCode) {
      if (request.method != config_.signin_method()) return HttpResponse::error(405, "MethodNotAllowed");
      return handle_signin_endpoint(SignInSubmission::from_request(request), cookie).page;
    }
    if (path == "/callback" && config_.flow == FlowType::AuthorizationCode) {
      // A response delivered in the fragment reaches the server without a code.
      if (!find_param(request.url.query, "code")) {
        HttpResponse nf = HttpResponse::error(404, "NotFound");
        nf.kind = std::string(response_kind::kNotFound);
        return nf;
      }
      return handle_code_flow_callback(request.url.query, cookie).page;
    }
  } catch (const ProtocolError& e) {
    return HttpResponse::error(400, to_string(e.code()), e.what());
  }
  HttpResponse nf = HttpResponse::error(404, "NotFound");
  nf.kind = std::string(response_kind::kNotFound);
  return nf;
}

}  // namespace oidcsim
