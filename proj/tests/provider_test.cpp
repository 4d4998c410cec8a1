#include <gtest/gtest.h>

#include "oidcsim/error.hpp"
#include "oidcsim/provider.hpp"

namespace oidcsim {
namespace {

const UserIdentity kVictim{"115722834054889887046", "victim@example.com", "Victim", "pw"};

class ProviderTest : public ::testing::Test {
 protected:
  ProviderTest() : op_(make_state(OpFlags{}), clock_) {}

  static OpState make_state(OpFlags flags) {
    OpState s(99, flags);
    s.add_user(kVictim);
    s.register_client({"rp-code", "secret-code", "https://rp-code.example/callback", std::nullopt,
                       FlowType::AuthorizationCode});
    s.register_client({"rp-hybrid", "secret-hybrid", std::nullopt, "https://rp-hybrid.example", FlowType::Hybrid});
    s.register_client({"rp-client", "secret-client", std::nullopt, "https://rp-client.example", FlowType::ClientSide});
    return s;
  }

  AuthorizationRequest request(const std::string& client, FlowType flow, bool null_bug = false) {
    return build_authorization_request(op_.state().clients.at(client), flow, StateValue::of("S"),
                                       {"openid", "email"}, null_bug);
  }

  // Log in through the form and return the delivery plus the OP session cookie.
  OpResponse login(const AuthorizationRequest& req, std::optional<std::string>* cookie = nullptr) {
    const auto form = op_.handle_authorization_request(req, std::nullopt);
    EXPECT_EQ(form.kind, OpResponse::Kind::LoginForm);
    auto resp = op_.authenticate_and_grant(form.pending_id, Credentials{kVictim.email, kVictim.password}, std::nullopt);
    if (cookie) *cookie = resp.new_session_cookie;
    return resp;
  }

  Errc token_error(const std::string& code, const std::string& client, const std::string& secret,
                   const std::string& redirect) {
    try {
      op_.handle_token_endpoint(code, client, secret, redirect);
    } catch (const ProtocolError& e) {
      return e.code();
    }
    ADD_FAILURE() << "token endpoint accepted";
    return Errc::Unclassifiable;
  }

  LogicalClock clock_;
  OpenIdProvider op_;
};

TEST_F(ProviderTest, CodeFlowDeliversCodeAndStateByRedirect) {
  const auto resp = login(request("rp-code", FlowType::AuthorizationCode));
  ASSERT_EQ(resp.kind, OpResponse::Kind::AuthorizationResponseDelivery);
  ASSERT_TRUE(resp.redirect_target);
  EXPECT_EQ(resp.redirect_target->host, "rp-code.example");
  EXPECT_TRUE(find_param(resp.redirect_target->query, "code"));
  EXPECT_EQ(find_param(resp.redirect_target->query, "state"), "S");
  EXPECT_FALSE(find_param(resp.redirect_target->query, "access_token"));
  EXPECT_FALSE(resp.redirect_target->fragment);
  EXPECT_EQ(resp.response->delivery, Delivery::Redirect302);
}

TEST_F(ProviderTest, CodeIsSingleUse) {
  const auto resp = login(request("rp-code", FlowType::AuthorizationCode));
  const auto code = *resp.response->code;
  const auto tokens = op_.handle_token_endpoint(code, "rp-code", "secret-code", "https://rp-code.example/callback");
  EXPECT_EQ(verify_id_token(tokens.id_token.encoded, op_.state().signing_key, "rp-code", clock_.now()).subject,
            kVictim.numeric_id);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(token_error(code, "rp-code", "secret-code", "https://rp-code.example/callback"), Errc::InvalidCode);
  }
}

TEST_F(ProviderTest, FailedClientAuthDoesNotConsumeCode) {
  const auto code = *login(request("rp-code", FlowType::AuthorizationCode)).response->code;
  EXPECT_EQ(token_error(code, "rp-code", "wrong", "https://rp-code.example/callback"), Errc::ClientAuthFailed);
  EXPECT_EQ(token_error(code, "rp-code", "secret-code", "https://evil.example/callback"), Errc::RedirectUriMismatch);
  EXPECT_NO_THROW(op_.handle_token_endpoint(code, "rp-code", "secret-code", "https://rp-code.example/callback"));
}

TEST_F(ProviderTest, CodeBoundToClientAndExpires) {
  const auto code = *login(request("rp-code", FlowType::AuthorizationCode)).response->code;
  EXPECT_EQ(token_error(code, "rp-hybrid", "secret-hybrid", "postmessage"), Errc::InvalidCode);
  clock_.advance(op_.state().flags.code_lifetime);
  EXPECT_EQ(token_error(code, "rp-code", "secret-code", "https://rp-code.example/callback"), Errc::InvalidCode);
  EXPECT_EQ(token_error("nonexistent", "rp-code", "secret-code", "x"), Errc::InvalidCode);
}

TEST_F(ProviderTest, HybridTokenEndpointReturnsTheDeliveredIdToken) {
  for (int i = 0; i < 20; ++i) {
    const auto resp = login(request("rp-hybrid", FlowType::Hybrid));
    ASSERT_EQ(resp.target_origin, "https://rp-hybrid.example");
    const auto tokens = op_.handle_token_endpoint(*resp.response->code, "rp-hybrid", "secret-hybrid", "postmessage");
    EXPECT_EQ(tokens.id_token.encoded, *resp.response->id_token);
    EXPECT_EQ(tokens.access_token.value, *resp.response->access_token);
  }
}

TEST_F(ProviderTest, ClientSideDeliversTokensOnly) {
  const auto resp = login(request("rp-client", FlowType::ClientSide));
  EXPECT_FALSE(resp.response->code);
  EXPECT_TRUE(resp.response->access_token);
  EXPECT_TRUE(resp.response->id_token);
}

TEST_F(ProviderTest, AutoGrantNeedsSessionAndGrant) {
  std::optional<std::string> cookie;
  login(request("rp-code", FlowType::AuthorizationCode), &cookie);
  ASSERT_TRUE(cookie);
  const auto again = op_.handle_authorization_request(request("rp-code", FlowType::AuthorizationCode), cookie);
  EXPECT_EQ(again.kind, OpResponse::Kind::AuthorizationResponseDelivery);

  const auto other = op_.handle_authorization_request(request("rp-hybrid", FlowType::Hybrid), cookie);
  EXPECT_EQ(other.kind, OpResponse::Kind::ConsentForm);
  const auto consented = op_.authenticate_and_grant(other.pending_id, std::nullopt, cookie);
  EXPECT_EQ(consented.kind, OpResponse::Kind::AuthorizationResponseDelivery);

  const auto anonymous = op_.handle_authorization_request(request("rp-code", FlowType::AuthorizationCode), std::nullopt);
  EXPECT_EQ(anonymous.kind, OpResponse::Kind::LoginForm);
}

TEST_F(ProviderTest, BadCredentialsAndUnknownPending) {
  const auto form = op_.handle_authorization_request(request("rp-code", FlowType::AuthorizationCode), std::nullopt);
  EXPECT_THROW(op_.authenticate_and_grant(form.pending_id, Credentials{kVictim.email, "nope"}, std::nullopt),
               ProtocolError);
  EXPECT_THROW(op_.authenticate_and_grant("missing", Credentials{kVictim.email, kVictim.password}, std::nullopt),
               ProtocolError);
}

TEST_F(ProviderTest, RejectsMismatchedRedirectAndOrigin) {
  auto req = request("rp-code", FlowType::AuthorizationCode);
  req.redirect_uri = "https://evil.example/callback";
  EXPECT_THROW(op_.handle_authorization_request(req, std::nullopt), ProtocolError);
  auto h = request("rp-hybrid", FlowType::Hybrid);
  h.origin = "https://evil.example";
  EXPECT_THROW(op_.handle_authorization_request(h, std::nullopt), ProtocolError);
  req.client_id = "unknown";
  EXPECT_THROW(op_.handle_authorization_request(req, std::nullopt), ProtocolError);
}

TEST_F(ProviderTest, MutatedCodeFlowRequestPutsTokensInFragment) {
  auto req = request("rp-code", FlowType::AuthorizationCode);
  req.response_type = {ResponseType::Code, ResponseType::Token, ResponseType::IdToken};
  const auto resp = login(req);
  ASSERT_TRUE(resp.redirect_target && resp.redirect_target->fragment);
  EXPECT_TRUE(find_param(parse_params(*resp.redirect_target->fragment), "access_token"));
  EXPECT_FALSE(find_param(resp.redirect_target->query, "access_token"));
  EXPECT_EQ(resp.response->delivery, Delivery::FragmentOnRedirect);
}

TEST(Provider, FixedOpIgnoresMutatedResponseType) {
  LogicalClock clock;
  OpFlags flags;
  flags.accept_mutated_response_type = false;
  OpState s(5, flags);
  s.add_user(kVictim);
  s.register_client({"rp-code", "x", "https://rp-code.example/callback", std::nullopt, FlowType::AuthorizationCode});
  OpenIdProvider op(std::move(s), clock);
  auto req = build_authorization_request(op.state().clients.at("rp-code"), FlowType::AuthorizationCode, std::nullopt, {});
  req.response_type = {ResponseType::Code, ResponseType::Token};
  const auto form = op.handle_authorization_request(req, std::nullopt);
  const auto resp = op.authenticate_and_grant(form.pending_id, Credentials{kVictim.email, kVictim.password}, std::nullopt);
  EXPECT_FALSE(resp.redirect_target->fragment);
  EXPECT_FALSE(resp.response->access_token);
}

TEST_F(ProviderTest, HybridDeliveryPostsOnlyToRegisteredOrigin) {
  const auto resp = login(request("rp-hybrid", FlowType::Hybrid));
  const auto doc = op_.render_hybrid_delivery(*resp.response, op_.state().clients.at("rp-hybrid"));
  EXPECT_EQ(doc.target_origin, "https://rp-hybrid.example");
  const auto back = HtmlDocument::from_http(doc.to_http());
  ASSERT_TRUE(back);
  EXPECT_EQ(back->response.code, resp.response->code);
}

TEST(Provider, NullStateBugDropsStateInDelivery) {
  LogicalClock clock;
  OpFlags flags;
  flags.null_state_bug = true;
  OpState s(5, flags);
  s.add_user(kVictim);
  s.register_client({"rp-hybrid", "x", std::nullopt, "https://rp-hybrid.example", FlowType::Hybrid});
  OpenIdProvider op(std::move(s), clock);
  const auto req = build_authorization_request(op.state().clients.at("rp-hybrid"), FlowType::Hybrid,
                                               StateValue::of("S"), {}, true);
  const auto form = op.handle_authorization_request(req, std::nullopt);
  const auto resp = op.authenticate_and_grant(form.pending_id, Credentials{kVictim.email, kVictim.password}, std::nullopt);
  const auto doc = op.render_hybrid_delivery(*resp.response, op.state().clients.at("rp-hybrid"));
  ASSERT_TRUE(doc.response.state);
  EXPECT_TRUE(doc.response.state->is_null());
}

TEST_F(ProviderTest, TokenInfoAndUserInfo) {
  const auto resp = login(request("rp-hybrid", FlowType::Hybrid));
  const auto info = op_.handle_tokeninfo(*resp.response->access_token);
  EXPECT_EQ(info.client_id, "rp-hybrid");
  EXPECT_EQ(info.user, kVictim.numeric_id);
  const auto user = op_.handle_userinfo(*resp.response->access_token);
  EXPECT_EQ(user.email, kVictim.email);
  EXPECT_THROW(op_.handle_userinfo("bogus"), ProtocolError);
  clock_.advance(op_.state().flags.access_token_lifetime + 1);
  EXPECT_THROW(op_.handle_userinfo(*resp.response->access_token), ProtocolError);
}

TEST_F(ProviderTest, HttpRoutingReportsErrorsAsPages) {
  HttpRequest req;
  req.url = Url::parse("https://accounts.op.example/o/userinfo?access_token=bogus");
  const auto r = op_.handle(req);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.field("error"), "InvalidToken");
}

}  // namespace
}  // namespace oidcsim
