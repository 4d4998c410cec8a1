#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oidcsim/rng.hpp"
#include "oidcsim/url.hpp"

namespace oidcsim {

using Timestamp = std::int64_t;
using ScopeSet = std::set<std::string>;

enum class FlowType { AuthorizationCode, Hybrid, ClientSide };

std::string_view to_string(FlowType flow);
std::optional<FlowType> parse_flow_type(std::string_view text);

struct UserIdentity {
  std::string numeric_id;
  std::string email;
  std::string display_name;
  std::string password;
};

bool is_valid_numeric_id(std::string_view id);

struct ClientRegistration {
  std::string client_id;
  std::string client_secret;
  std::optional<std::string> redirect_uri;  // AuthorizationCode only
  std::optional<std::string> origin;        // Hybrid / ClientSide only
  FlowType registered_flow = FlowType::AuthorizationCode;

  /// Throws InconsistentRegistration when redirect_uri/origin do not match
  /// the registered flow.
  void validate() const;
};

struct Code {
  std::string value;
  std::string client_id;
  std::string user;
  Timestamp issued_at = 0;
  Timestamp expires_at = 0;
  bool redeemed = false;
};

struct AccessToken {
  std::string value;
  std::string client_id;
  std::string user;
  ScopeSet scope;
  Timestamp issued_at = 0;
  Timestamp expires_at = 0;
};

struct IdTokenClaims {
  std::string issuer;
  std::string subject;
  std::string audience;
  Timestamp issued_at = 0;
  Timestamp expires_at = 0;
  std::string email;

  friend bool operator==(const IdTokenClaims&, const IdTokenClaims&) = default;
};

struct IdToken {
  IdTokenClaims claims;
  std::string encoded;
};

/// Wire form of the NULL state the Google-style JS API hands to RP clients.
inline constexpr std::string_view kNullStateWire = "null";

/// A state parameter. An empty `value` is the NULL-marker.
struct StateValue {
  std::optional<std::string> value;
  std::optional<std::string> bound_session;

  static StateValue null_marker() { return {}; }
  static StateValue of(std::string v) { return {std::move(v), std::nullopt}; }
  static StateValue session_bound(std::string v, std::string session) {
    return {std::move(v), std::move(session)};
  }
  static StateValue from_wire(std::string_view wire);

  bool is_null() const { return !value.has_value(); }
  std::string wire() const { return value ? *value : std::string(kNullStateWire); }

  friend bool operator==(const StateValue& a, const StateValue& b) { return a.value == b.value; }
};

enum class ResponseType { Code, Token, IdToken };

std::string response_type_string(const std::vector<ResponseType>& types);
std::vector<ResponseType> parse_response_type(std::string_view text);

/// Literal redirect_uri value used by postMessage-delivered flows.
inline constexpr std::string_view kPostMessageRedirect = "postmessage";

struct AuthorizationRequest {
  std::string client_id;
  std::vector<ResponseType> response_type;
  std::string redirect_uri;
  std::optional<StateValue> state;
  std::optional<std::string> origin;
  ScopeSet scope;

  bool wants(ResponseType t) const;
  Params to_query() const;
  static AuthorizationRequest from_query(const Params& query);
};

enum class Delivery { PostMessageHtml, Redirect302, FragmentOnRedirect };

std::string_view to_string(Delivery delivery);

struct AuthorizationResponse {
  std::optional<std::string> code;
  std::optional<std::string> access_token;
  std::optional<std::string> id_token;
  std::optional<StateValue> state;
  Delivery delivery = Delivery::Redirect302;

  /// Parameter form used in query strings, fragments and postMessage payloads.
  Params to_params() const;
  static AuthorizationResponse from_params(const Params& params, Delivery delivery);
};

struct TokenSet {
  AccessToken access_token;
  IdToken id_token;
};

struct OpFlags {
  bool null_state_bug = false;
  bool accept_mutated_response_type = true;
  Timestamp code_lifetime = 60;
  Timestamp access_token_lifetime = 3600;
  Timestamp id_token_lifetime = 3600;
};

/// Authorization request parked at the OP while the login form is shown.
struct PendingRequest {
  AuthorizationRequest request;
  std::string browser_cookie;
};

/// Everything the OP knows. Owned by a single OpenIdProvider actor.
struct OpState {
  explicit OpState(std::uint64_t seed, OpFlags f = {});

  std::string issuer = "https://accounts.op.example";
  std::string signing_key;
  OpFlags flags;

  std::map<std::string, ClientRegistration> clients;
  std::map<std::string, UserIdentity> users;
  std::map<std::string, std::string> op_sessions;  // browser cookie -> numeric_id
  std::set<std::pair<std::string, std::string>> grants;  // (numeric_id, client_id)
  std::map<std::string, Code> codes;
  std::map<std::string, AccessToken> access_tokens;
  std::map<std::string, IdToken> id_tokens;
  std::map<std::string, TokenSet> tokens_by_code;  // hybrid: pre-issued at delivery
  std::map<std::string, PendingRequest> pending;
  SeededRng rng;

  void register_client(ClientRegistration reg);
  void add_user(UserIdentity user);
};

Code mint_code(OpState& op, const std::string& client_id, const std::string& user, Timestamp now);

TokenSet mint_token_set(OpState& op, const std::string& client_id, const std::string& user,
                        const ScopeSet& scope, Timestamp now);

std::string encode_id_token(const IdTokenClaims& claims, std::string_view signing_key);

/// Reads the claims without any key; throws MalformedToken.
IdTokenClaims decode_id_token_claims(std::string_view encoded);

/// Throws MalformedToken, BadSignature, AudienceMismatch or Expired.
IdTokenClaims verify_id_token(std::string_view encoded, std::string_view signing_key,
                              std::string_view expected_audience, Timestamp now);

/// `api_null_state_bug` models the JS API that drops the hybrid state.
AuthorizationRequest build_authorization_request(const ClientRegistration& registration,
                                                 FlowType flow, std::optional<StateValue> state,
                                                 const ScopeSet& scope,
                                                 bool api_null_state_bug = false);

}  // namespace oidcsim
