#include "oidcsim/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "oidcsim/codec.hpp"
#include "oidcsim/error.hpp"

namespace oidcsim {
namespace {

constexpr std::string_view kIdTokenHeader = "alg=HS256\ntyp=JWT\n";

std::string claims_document(const IdTokenClaims& c) {
  std::ostringstream out;
  out << "iss=" << c.issuer << '\n'
      << "sub=" << c.subject << '\n'
      << "aud=" << c.audience << '\n'
      << "iat=" << c.issued_at << '\n'
      << "exp=" << c.expires_at << '\n'
      << "email=" << c.email << '\n';
  return out.str();
}

Timestamp parse_timestamp(const std::string& text) {
  if (text.empty()) throw ProtocolError(Errc::MalformedToken, "empty timestamp");
  std::size_t pos = 0;
  Timestamp v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw ProtocolError(Errc::MalformedToken, "bad timestamp '" + text + "'");
  }
  if (pos != text.size()) throw ProtocolError(Errc::MalformedToken, "bad timestamp '" + text + "'");
  return v;
}

struct TokenParts {
  std::string_view header, claims, mac;
};

TokenParts split_token(std::string_view encoded) {
  const auto a = encoded.find('.');
  if (a == std::string_view::npos) throw ProtocolError(Errc::MalformedToken, "expected three parts");
  const auto b = encoded.find('.', a + 1);
  if (b == std::string_view::npos || encoded.find('.', b + 1) != std::string_view::npos) {
    throw ProtocolError(Errc::MalformedToken, "expected three parts");
  }
  return {encoded.substr(0, a), encoded.substr(a + 1, b - a - 1), encoded.substr(b + 1)};
}

std::string sign(std::string_view signing_input, std::string_view key) {
  return base64url_encode(hmac_sha256(key, signing_input));
}

}  // namespace

std::string_view to_string(FlowType flow) {
  switch (flow) {
    case FlowType::AuthorizationCode: return "AuthorizationCode";
    case FlowType::Hybrid: return "Hybrid";
    case FlowType::ClientSide: return "ClientSide";
  }
  return "?";
}

std::optional<FlowType> parse_flow_type(std::string_view text) {
  if (text == "AuthorizationCode" || text == "code") return FlowType::AuthorizationCode;
  if (text == "Hybrid" || text == "hybrid") return FlowType::Hybrid;
  if (text == "ClientSide" || text == "client-side") return FlowType::ClientSide;
  return std::nullopt;
}

bool is_valid_numeric_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isdigit(c); });
}

void ClientRegistration::validate() const {
  if (client_id.empty()) throw ProtocolError(Errc::InconsistentRegistration, "empty client_id");
  const bool code_flow = registered_flow == FlowType::AuthorizationCode;
  if (code_flow != redirect_uri.has_value()) {
    throw ProtocolError(Errc::InconsistentRegistration,
                        client_id + ": redirect_uri is required iff the flow is AuthorizationCode");
  }
  if (code_flow == origin.has_value()) {
    throw ProtocolError(Errc::InconsistentRegistration,
                        client_id + ": origin is required iff the flow is Hybrid or ClientSide");
  }
}

StateValue StateValue::from_wire(std::string_view wire) {
  if (wire == kNullStateWire) return null_marker();
  return of(std::string(wire));
}

std::string response_type_string(const std::vector<ResponseType>& types) {
  std::string out;
  for (auto t : types) {
    if (!out.empty()) out.push_back(' ');
    switch (t) {
      case ResponseType::Code: out += "code"; break;
      case ResponseType::Token: out += "token"; break;
      case ResponseType::IdToken: out += "id_token"; break;
    }
  }
  return out;
}

std::vector<ResponseType> parse_response_type(std::string_view text) {
  std::vector<ResponseType> out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    if (word == "code") out.push_back(ResponseType::Code);
    else if (word == "token") out.push_back(ResponseType::Token);
    else if (word == "id_token") out.push_back(ResponseType::IdToken);
  }
  return out;
}

bool AuthorizationRequest::wants(ResponseType t) const {
  return std::find(response_type.begin(), response_type.end(), t) != response_type.end();
}

Params AuthorizationRequest::to_query() const {
  Params q{{"client_id", client_id},
           {"response_type", response_type_string(response_type)},
           {"redirect_uri", redirect_uri}};
  if (state) q.emplace_back("state", state->wire());
  if (origin) q.emplace_back("origin", *origin);
  std::string scopes;
  for (const auto& s : scope) scopes += (scopes.empty() ? "" : " ") + s;
  q.emplace_back("scope", scopes);
  return q;
}

AuthorizationRequest AuthorizationRequest::from_query(const Params& query) {
  AuthorizationRequest req;
  req.client_id = find_param(query, "client_id").value_or("");
  req.response_type = parse_response_type(find_param(query, "response_type").value_or(""));
  req.redirect_uri = find_param(query, "redirect_uri").value_or("");
  if (auto s = find_param(query, "state")) req.state = StateValue::from_wire(*s);
  req.origin = find_param(query, "origin");
  std::istringstream in{find_param(query, "scope").value_or("")};
  std::string word;
  while (in >> word) req.scope.insert(word);
  return req;
}

std::string_view to_string(Delivery delivery) {
  switch (delivery) {
    case Delivery::PostMessageHtml: return "PostMessageHtml";
    case Delivery::Redirect302: return "Redirect302";
    case Delivery::FragmentOnRedirect: return "FragmentOnRedirect";
  }
  return "?";
}

Params AuthorizationResponse::to_params() const {
  Params p;
  if (code) p.emplace_back("code", *code);
  if (access_token) p.emplace_back("access_token", *access_token);
  if (id_token) p.emplace_back("id_token", *id_token);
  if (state) p.emplace_back("state", state->wire());
  return p;
}

AuthorizationResponse AuthorizationResponse::from_params(const Params& params, Delivery delivery) {
  AuthorizationResponse r;
  r.code = find_param(params, "code");
  r.access_token = find_param(params, "access_token");
  r.id_token = find_param(params, "id_token");
  if (auto s = find_param(params, "state")) r.state = StateValue::from_wire(*s);
  r.delivery = delivery;
  return r;
}

OpState::OpState(std::uint64_t seed, OpFlags f) : flags(f), rng(seed) {
  signing_key = rng.token() + rng.token();
}

void OpState::register_client(ClientRegistration reg) {
  reg.validate();
  const auto id = reg.client_id;
  if (!clients.emplace(id, std::move(reg)).second) {
    throw ProtocolError(Errc::InconsistentRegistration, "duplicate client_id " + id);
  }
}

void OpState::add_user(UserIdentity user) {
  if (!is_valid_numeric_id(user.numeric_id)) {
    throw ProtocolError(Errc::UnknownUser, "numeric_id must be all digits: " + user.numeric_id);
  }
  const auto id = user.numeric_id;
  if (!users.emplace(id, std::move(user)).second) {
    throw ProtocolError(Errc::UnknownUser, "duplicate numeric_id " + id);
  }
}

Code mint_code(OpState& op, const std::string& client_id, const std::string& user, Timestamp now) {
  if (!op.clients.contains(client_id)) throw ProtocolError(Errc::UnknownClient, client_id);
  if (!op.users.contains(user)) throw ProtocolError(Errc::UnknownUser, user);
  Code code{op.rng.token(), client_id, user, now, now + op.flags.code_lifetime, false};
  op.codes.emplace(code.value, code);
  return code;
}

TokenSet mint_token_set(OpState& op, const std::string& client_id, const std::string& user,
                        const ScopeSet& scope, Timestamp now) {
  if (!op.clients.contains(client_id)) throw ProtocolError(Errc::UnknownClient, client_id);
  const auto u = op.users.find(user);
  if (u == op.users.end()) throw ProtocolError(Errc::UnknownUser, user);

  AccessToken at{op.rng.token(), client_id, user, scope, now, now + op.flags.access_token_lifetime};
  IdTokenClaims claims{op.issuer, user, client_id, now, now + op.flags.id_token_lifetime, u->second.email};
  IdToken id{claims, encode_id_token(claims, op.signing_key)};
  op.access_tokens.emplace(at.value, at);
  op.id_tokens.emplace(id.encoded, id);
  return {std::move(at), std::move(id)};
}

std::string encode_id_token(const IdTokenClaims& claims, std::string_view signing_key) {
  const auto signing_input = base64url_encode(kIdTokenHeader) + "." + base64url_encode(claims_document(claims));
  return signing_input + "." + sign(signing_input, signing_key);
}

IdTokenClaims decode_id_token_claims(std::string_view encoded) {
  const auto parts = split_token(encoded);
  if (!base64url_decode(parts.header) || !base64url_decode(parts.mac)) {
    throw ProtocolError(Errc::MalformedToken, "invalid base64url");
  }
  const auto doc = base64url_decode(parts.claims);
  if (!doc) throw ProtocolError(Errc::MalformedToken, "invalid base64url in claims");

  std::map<std::string, std::string> kv;
  std::istringstream in(*doc);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ProtocolError(Errc::MalformedToken, "claim line without '='");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"iss", "sub", "aud", "iat", "exp", "email"}) {
    if (!kv.contains(key)) throw ProtocolError(Errc::MalformedToken, std::string("missing claim ") + key);
  }
  return {kv["iss"], kv["sub"], kv["aud"], parse_timestamp(kv["iat"]), parse_timestamp(kv["exp"]), kv["email"]};
}

IdTokenClaims verify_id_token(std::string_view encoded, std::string_view signing_key,
                              std::string_view expected_audience, Timestamp now) {
  const auto parts = split_token(encoded);
  const auto signing_input = encoded.substr(0, parts.header.size() + 1 + parts.claims.size());
  if (!constant_time_equal(sign(signing_input, signing_key), parts.mac)) {
    throw ProtocolError(Errc::BadSignature);
  }
  auto claims = decode_id_token_claims(encoded);
  if (claims.audience != expected_audience) {
    throw ProtocolError(Errc::AudienceMismatch, claims.audience + " != " + std::string(expected_audience));
  }
  if (now >= claims.expires_at) throw ProtocolError(Errc::Expired);
  return claims;
}

AuthorizationRequest build_authorization_request(const ClientRegistration& registration,
                                                 FlowType flow, std::optional<StateValue> state,
                                                 const ScopeSet& scope, bool api_null_state_bug) {
  if (registration.registered_flow != flow) {
    throw ProtocolError(Errc::InconsistentRegistration,
                        registration.client_id + " is not registered for " + std::string(to_string(flow)));
  }
  registration.validate();
  AuthorizationRequest req;
  req.client_id = registration.client_id;
  req.scope = scope;
  switch (flow) {
    case FlowType::AuthorizationCode:
      req.response_type = {ResponseType::Code};
      req.redirect_uri = *registration.redirect_uri;
      req.state = std::move(state);
      break;
    case FlowType::Hybrid:
      req.response_type = {ResponseType::Code, ResponseType::Token, ResponseType::IdToken};
      req.redirect_uri = std::string(kPostMessageRedirect);
      req.origin = registration.origin;
      req.state = api_null_state_bug ? std::optional(StateValue::null_marker()) : std::move(state);
      break;
    case FlowType::ClientSide:
      req.response_type = {ResponseType::Token, ResponseType::IdToken};
      req.redirect_uri = std::string(kPostMessageRedirect);
      req.origin = registration.origin;
      req.state = std::move(state);
      break;
  }
  return req;
}

}  // namespace oidcsim
