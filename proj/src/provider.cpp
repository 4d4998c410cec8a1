#include "oidcsim/provider.hpp"

#include "oidcsim/error.hpp"

namespace oidcsim {

HttpResponse HtmlDocument::to_http() const {
  HttpResponse r;
  r.kind = std::string(response_kind::kPostMessageHtml);
  r.fields = {{"target_origin", target_origin}};
  for (auto& p : response.to_params()) r.fields.push_back(std::move(p));
  return r;
}

std::optional<HtmlDocument> HtmlDocument::from_http(const HttpResponse& response) {
  if (response.kind != response_kind::kPostMessageHtml) return std::nullopt;
  auto target = response.field("target_origin");
  if (!target) return std::nullopt;
  return HtmlDocument{*target, AuthorizationResponse::from_params(response.fields, Delivery::PostMessageHtml)};
}

const ClientRegistration& OpenIdProvider::check_request(const AuthorizationRequest& req) const {
  auto it = state_.clients.find(req.client_id);
  if (it == state_.clients.end()) throw ProtocolError(Errc::UnknownClient, req.client_id);
  const auto& reg = it->second;
  if (reg.registered_flow == FlowType::AuthorizationCode) {
    if (req.redirect_uri != reg.redirect_uri) {
      throw ProtocolError(Errc::RedirectUriMismatch, req.redirect_uri);
    }
  } else if (req.redirect_uri != kPostMessageRedirect || req.origin != reg.origin) {
    throw ProtocolError(Errc::OriginMismatch, req.origin.value_or("<none>"));
  }
  return reg;
}

OpResponse OpenIdProvider::handle_authorization_request(const AuthorizationRequest& req,
                                                        const std::optional<std::string>& browser_cookie) {
  check_request(req);
  std::optional<std::string> user;
  if (browser_cookie) {
    if (auto s = state_.op_sessions.find(*browser_cookie); s != state_.op_sessions.end()) user = s->second;
  }
  // Automatic authorization granting: live session plus prior consent.
  if (user && state_.grants.contains({*user, req.client_id})) return deliver(req, *user);

  OpResponse resp;
  resp.kind = user ? OpResponse::Kind::ConsentForm : OpResponse::Kind::LoginForm;
  resp.pending_id = state_.rng.token();
  state_.pending.emplace(resp.pending_id, PendingRequest{req, browser_cookie.value_or("")});
  return resp;
}

OpResponse OpenIdProvider::authenticate_and_grant(const std::string& pending_id,
                                                  const std::optional<Credentials>& credentials,
                                                  const std::optional<std::string>& browser_cookie) {
  auto pending = state_.pending.find(pending_id);
  if (pending == state_.pending.end()) throw ProtocolError(Errc::NoPendingRequest, pending_id);

  std::string user;
  std::optional<std::string> new_cookie;
  if (credentials) {
    const UserIdentity* found = nullptr;
    for (const auto& [id, u] : state_.users) {
      if (u.email == credentials->email) found = &u;
    }
    if (found == nullptr || found->password != credentials->password) {
      throw ProtocolError(Errc::BadCredentials, credentials->email);
    }
    user = found->numeric_id;
    new_cookie = state_.rng.token();
    state_.op_sessions[*new_cookie] = user;
  } else {
    auto s = browser_cookie ? state_.op_sessions.find(*browser_cookie) : state_.op_sessions.end();
    if (s == state_.op_sessions.end()) throw ProtocolError(Errc::BadCredentials, "no session for consent");
    user = s->second;
  }

  const auto req = pending->second.request;
  state_.pending.erase(pending);
  state_.grants.insert({user, req.client_id});
  auto resp = deliver(req, user);
  resp.new_session_cookie = new_cookie;
  return resp;
}

OpResponse OpenIdProvider::deliver(const AuthorizationRequest& req, const std::string& user) {
  const auto& reg = state_.clients.at(req.client_id);
  const auto now = clock_.now();
  OpResponse out;
  out.kind = OpResponse::Kind::AuthorizationResponseDelivery;
  AuthorizationResponse resp;
  resp.state = req.state;

  switch (reg.registered_flow) {
    case FlowType::AuthorizationCode: {
      const bool mutated = req.wants(ResponseType::Token) || req.wants(ResponseType::IdToken);
      const auto code = mint_code(state_, req.client_id, user, now);
      resp.code = code.value;
      Url target = Url::parse(*reg.redirect_uri);
      if (mutated && state_.flags.accept_mutated_response_type) {
        auto tokens = mint_token_set(state_, req.client_id, user, req.scope, now);
        resp.access_token = tokens.access_token.value;
        resp.id_token = tokens.id_token.encoded;
        state_.tokens_by_code.emplace(code.value, std::move(tokens));
        resp.delivery = Delivery::FragmentOnRedirect;
        target.fragment = encode_params(resp.to_params());
      } else {
        resp.delivery = Delivery::Redirect302;
        for (auto& p : resp.to_params()) target.query.push_back(std::move(p));
      }
      out.redirect_target = std::move(target);
      break;
    }
    case FlowType::Hybrid: {
      const auto code = mint_code(state_, req.client_id, user, now);
      auto tokens = mint_token_set(state_, req.client_id, user, req.scope, now);
      resp.code = code.value;
      resp.access_token = tokens.access_token.value;
      resp.id_token = tokens.id_token.encoded;
      state_.tokens_by_code.emplace(code.value, std::move(tokens));
      resp.delivery = Delivery::PostMessageHtml;
      out.target_origin = reg.origin;
      break;
    }
    case FlowType::ClientSide: {
      auto tokens = mint_token_set(state_, req.client_id, user, req.scope, now);
      resp.access_token = tokens.access_token.value;
      resp.id_token = tokens.id_token.encoded;
      resp.delivery = Delivery::PostMessageHtml;
      out.target_origin = reg.origin;
      break;
    }
  }
  out.response = std::move(resp);
  return out;
}

HtmlDocument OpenIdProvider::render_hybrid_delivery(const AuthorizationResponse& resp,
                                                    const ClientRegistration& registration) const {
  HtmlDocument doc{registration.origin.value_or(""), resp};
  if (state_.flags.null_state_bug) doc.response.state = StateValue::null_marker();
  return doc;
}

TokenSet OpenIdProvider::handle_token_endpoint(const std::string& code_value, const std::string& client_id,
                                               const std::string& client_secret,
                                               const std::string& redirect_uri) {
  auto it = state_.codes.find(code_value);
  if (it == state_.codes.end()) throw ProtocolError(Errc::InvalidCode, "unknown code");
  Code& code = it->second;
  if (code.redeemed) throw ProtocolError(Errc::InvalidCode, "already redeemed");
  if (clock_.now() >= code.expires_at) throw ProtocolError(Errc::InvalidCode, "expired");
  if (code.client_id != client_id) throw ProtocolError(Errc::InvalidCode, "code bound to another client");

  const auto reg = state_.clients.find(client_id);
  if (reg == state_.clients.end() || reg->second.client_secret != client_secret) {
    throw ProtocolError(Errc::ClientAuthFailed, client_id);
  }
  const auto expected = reg->second.registered_flow == FlowType::AuthorizationCode
                            ? reg->second.redirect_uri.value_or("")
                            : std::string(kPostMessageRedirect);
  if (redirect_uri != expected) throw ProtocolError(Errc::RedirectUriMismatch, redirect_uri);

  // Consumed only after every check passed.
  code.redeemed = true;
  if (auto pre = state_.tokens_by_code.find(code_value); pre != state_.tokens_by_code.end()) {
    return pre->second;
  }
  return mint_token_set(state_, client_id, code.user, {"openid", "email", "profile"}, clock_.now());
}

const AccessToken& OpenIdProvider::live_token(const std::string& value) const {
  auto it = state_.access_tokens.find(value);
  if (it == state_.access_tokens.end()) throw ProtocolError(Errc::InvalidToken, "unknown token");
  if (clock_.now() >= it->second.expires_at) throw ProtocolError(Errc::InvalidToken, "expired");
  return it->second;
}

TokenInfo OpenIdProvider::handle_tokeninfo(const std::string& access_token) const {
  const auto& t = live_token(access_token);
  return {t.client_id, t.user, t.scope, t.expires_at - clock_.now()};
}

UserInfo OpenIdProvider::handle_userinfo(const std::string& access_token) const {
  const auto& t = live_token(access_token);
  const auto& u = state_.users.at(t.user);
  return {u.numeric_id, u.email, u.display_name};
}

HttpResponse OpenIdProvider::to_http(const OpResponse& resp) const {
  HttpResponse http;
  switch (resp.kind) {
    case OpResponse::Kind::LoginForm:
      http.kind = std::string(response_kind::kLoginForm);
      http.fields = {{"pending", resp.pending_id}};
      break;
    case OpResponse::Kind::ConsentForm:
      http.kind = std::string(response_kind::kConsentForm);
      http.fields = {{"pending", resp.pending_id}};
      break;
    case OpResponse::Kind::AuthorizationResponseDelivery:
      if (resp.response->delivery == Delivery::PostMessageHtml) {
        const auto& reg_origin = *resp.target_origin;
        ClientRegistration reg;
        reg.origin = reg_origin;
        http = render_hybrid_delivery(*resp.response, reg).to_http();
      } else {
        http = HttpResponse::redirect(*resp.redirect_target);
      }
      break;
  }
  if (resp.new_session_cookie) http.set_cookies[std::string(kOpSessionCookie)] = *resp.new_session_cookie;
  return http;
}

HttpResponse OpenIdProvider::handle(const HttpRequest& request) {
  std::optional<std::string> cookie;
  if (auto c = request.cookies.find(std::string(kOpSessionCookie)); c != request.cookies.end()) cookie = c->second;
  const auto& params = request.params();
  try {
    const auto& path = request.url.path;
    if (path == "/o/auth") {
      return to_http(handle_authorization_request(AuthorizationRequest::from_query(params), cookie));
    }
    if (path == "/o/login" && request.method == "POST") {
      std::optional<Credentials> creds;
      if (auto email = find_param(params, "email")) {
        creds = Credentials{*email, find_param(params, "password").value_or("")};
      }
      return to_http(authenticate_and_grant(find_param(params, "pending").value_or(""), creds, cookie));
    }
    if (path == "/o/token" && request.method == "POST") {
      const auto set = handle_token_endpoint(
          find_param(params, "code").value_or(""), find_param(params, "client_id").value_or(""),
          find_param(params, "client_secret").value_or(""), find_param(params, "redirect_uri").value_or(""));
      HttpResponse r;
      r.kind = std::string(response_kind::kJson);
      r.fields = {{"access_token", set.access_token.value}, {"id_token", set.id_token.encoded}};
      return r;
    }
    if (path == "/o/tokeninfo") {
      const auto info = handle_tokeninfo(find_param(params, "access_token").value_or(""));
      HttpResponse r;
      r.kind = std::string(response_kind::kJson);
      r.fields = {{"client_id", info.client_id}, {"user", info.user},
                  {"expires_in", std::to_string(info.expires_in)}};
      return r;
    }
    if (path == "/o/userinfo") {
      const auto info = handle_userinfo(find_param(params, "access_token").value_or(""));
      HttpResponse r;
      r.kind = std::string(response_kind::kJson);
      r.fields = {{"sub", info.numeric_id}, {"email", info.email}, {"name", info.display_name}};
      return r;
    }
  } catch (const ProtocolError& e) {
    return HttpResponse::error(400, to_string(e.code()), e.what());
  }
  HttpResponse nf = HttpResponse::error(404, "NotFound");
  nf.kind = std::string(response_kind::kNotFound);
  return nf;
}

}  // namespace oidcsim
