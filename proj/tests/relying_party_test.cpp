#include <gtest/gtest.h>

#include "oidcsim/error.hpp"
#include "oidcsim/scenario.hpp"

namespace oidcsim {
namespace {

using F = RpFlag;

AuthorizationResponse delivered() {
  const IdTokenClaims claims{"https://accounts.op.example", "115722834054889887046", "rp-x", 0, 100, "v@example.com"};
  return {"CODE", "TOKEN", encode_id_token(claims, "k"), StateValue::null_marker(), Delivery::PostMessageHtml};
}

SignInSubmission script(FlowType flow, RpFlags flags) {
  return rp_client_script(RpConfig::make("rp-x", flow, flags, "s"), delivered(), std::string("CLIENTSTATE"));
}

TEST(RpClientScript, HardenedSubmitsCodeAndBoundState) {
  const auto s = script(FlowType::Hybrid, {});
  EXPECT_EQ(s.code, "CODE");
  EXPECT_FALSE(s.access_token || s.id_token || s.google_id || s.email);
  EXPECT_EQ(s.state, StateValue::of("CLIENTSTATE"));
  EXPECT_EQ(s.http_method, "GET");
  EXPECT_EQ(s.channel, ChannelSecurity::Https);
}

TEST(RpClientScript, TokenPostWithoutState) {
  const auto s = script(FlowType::Hybrid, {F::SUBMITS_ACCESS_TOKEN, F::NO_STATE, F::CLIENT_SUBMITS_VIA_POST});
  EXPECT_EQ(s.access_token, "TOKEN");
  EXPECT_FALSE(s.code || s.id_token || s.google_id || s.state);
  EXPECT_EQ(s.http_method, "POST");
}

TEST(RpClientScript, GoogleIdOnly) {
  const auto s = script(FlowType::Hybrid, {F::AUTH_BY_GOOGLE_ID});
  EXPECT_EQ(s.google_id, "115722834054889887046");
  EXPECT_FALSE(s.code || s.access_token || s.id_token);
}

TEST(RpClientScript, GoogleIdVariants) {
  auto s = script(FlowType::Hybrid, {F::GOOGLE_ID_WITH_CODE});
  EXPECT_TRUE(s.google_id && s.code);
  s = script(FlowType::Hybrid, {F::GOOGLE_ID_WITH_ACCESS_TOKEN, F::SUBMITS_ACCESS_TOKEN});
  EXPECT_TRUE(s.google_id && s.access_token);
  EXPECT_FALSE(s.code);
}

TEST(RpClientScript, StateVariants) {
  EXPECT_EQ(script(FlowType::Hybrid, {F::FIXED_STATE}).state, StateValue::of("STATE"));
  const auto forwarded = script(FlowType::Hybrid, {F::NULL_STATE_FORWARDED}).state;
  ASSERT_TRUE(forwarded);
  EXPECT_TRUE(forwarded->is_null());
}

TEST(RpClientScript, ChannelAndEmailAndIdToken) {
  auto s = script(FlowType::Hybrid, {F::PLAINTEXT_SIGNIN_ENDPOINT});
  EXPECT_EQ(s.channel, ChannelSecurity::Http);
  EXPECT_EQ(s.to_request(RpConfig::make("rp-x", FlowType::Hybrid, {F::PLAINTEXT_SIGNIN_ENDPOINT}, "s")).url.scheme,
            "http");
  s = script(FlowType::Hybrid,
             {F::SUBMITS_ACCESS_TOKEN, F::AUTH_BY_ACCESS_TOKEN, F::REQUIRES_EMAIL_WITH_TOKEN, F::SUBMITS_ID_TOKEN});
  EXPECT_EQ(s.email, "v@example.com");
  EXPECT_TRUE(s.id_token);
  s = script(FlowType::ClientSide, {});
  EXPECT_TRUE(s.id_token);
}

TEST(RpConfig, ValidationEnforcesFlagConstraints) {
  EXPECT_THROW(RpConfig::make("a", FlowType::Hybrid, {F::AUTH_BY_ACCESS_TOKEN}, "s").validate(), ProtocolError);
  EXPECT_THROW(RpConfig::make("a", FlowType::Hybrid, {F::VERIFIES_ACCESS_TOKEN, F::SUBMITS_ACCESS_TOKEN}, "s").validate(),
               ProtocolError);
  EXPECT_THROW(RpConfig::make("a", FlowType::AuthorizationCode, {F::GOOGLE_ID_WITH_CODE}, "s").validate(),
               ProtocolError);
  EXPECT_THROW(RpConfig::make("a", FlowType::ClientSide, {F::AUTH_BY_GOOGLE_ID}, "s").validate(), ProtocolError);
  EXPECT_THROW(RpConfig::make("a", FlowType::Hybrid, {F::NO_STATE, F::FIXED_STATE}, "s").validate(), ProtocolError);
  EXPECT_NO_THROW(RpConfig::make("a", FlowType::Hybrid, implied_closure({F::VERIFIES_ACCESS_TOKEN}), "s").validate());
  EXPECT_NO_THROW(RpConfig::hardened("a", FlowType::AuthorizationCode, "s").validate());
}

TEST(RpConfig, FlagNamesRoundTrip) {
  EXPECT_EQ(all_rp_flags().size(), 17u);
  for (auto f : all_rp_flags()) EXPECT_EQ(parse_rp_flag(to_string(f)), f);
  EXPECT_FALSE(parse_rp_flag("NOT_A_FLAG"));
}

TEST(RpConfig, Channels) {
  EXPECT_EQ(RpConfig::make("a", FlowType::Hybrid, {}, "s").landing_channel(), ChannelSecurity::Https);
  EXPECT_EQ(RpConfig::make("a", FlowType::Hybrid, {F::DOWNGRADE_TO_HTTP_AFTER_SIGNIN}, "s").landing_channel(),
            ChannelSecurity::Http);
  const auto code = RpConfig::make("a", FlowType::AuthorizationCode, {F::PLAINTEXT_SIGNIN_ENDPOINT}, "s");
  EXPECT_EQ(code.callback_url().scheme, "http");
}

class RpScenario : public ::testing::Test {
 protected:
  static ScenarioOptions options() {
    ScenarioOptions o;
    o.seed = 11;
    o.op_flags.null_state_bug = true;
    return o;
  }
};

TEST_F(RpScenario, CompliantLoginsSucceedForEveryFlow) {
  for (auto flow : {FlowType::AuthorizationCode, FlowType::Hybrid, FlowType::ClientSide}) {
    Environment env(RpConfig::hardened("rp-t", flow, "s"), options());
    auto& trace = env.new_trace("t");
    auto& b = env.new_browser("victim", trace);
    const auto r = env.login(b, env.target(), env.victim());
    EXPECT_TRUE(r.success) << to_string(flow) << ": " << r.error;
    ASSERT_TRUE(r.final_page);
    EXPECT_EQ(r.final_page->url.path, "/home");
    EXPECT_EQ(r.final_page->response.field("status"), "signed-in");
  }
}

TEST_F(RpScenario, StateEchoForCompliantHybrid) {
  Environment env(RpConfig::hardened("rp-t", FlowType::Hybrid, "s"), options());
  auto& trace = env.new_trace("t");
  auto& b = env.new_browser("victim", trace);
  const auto r = env.login(b, env.target(), env.victim());
  ASSERT_TRUE(r.submission && r.submission->state);
  const auto& login_page = trace.messages.front();
  EXPECT_EQ(find_param(login_page.response_fields, "client_state"), r.submission->state->value);
}

TEST_F(RpScenario, SignInEndpointDecisionProcedure) {
  auto make_env = [&](RpFlags flags) {
    return std::make_unique<Environment>(RpConfig::make("rp-t", FlowType::Hybrid, flags, "s"), options());
  };
  const auto& victim_id = std::string("115722834054889887046");

  // google_id path: no token check at all.
  auto env = make_env({F::AUTH_BY_GOOGLE_ID, F::NO_STATE});
  SignInSubmission forged;
  forged.google_id = victim_id;
  EXPECT_EQ(env->target().handle_signin_endpoint(forged, std::nullopt).user, victim_id);

  // access_token path with tokeninfo: a token for another client is refused.
  env = make_env(implied_closure({F::VERIFIES_ACCESS_TOKEN, F::NO_STATE}));
  const auto foreign = mint_token_set(env->op().state(), std::string(kMaliciousRpName), victim_id, {}, 0);
  SignInSubmission with_token;
  with_token.access_token = foreign.access_token.value;
  try {
    env->target().handle_signin_endpoint(with_token, std::nullopt);
    FAIL() << "foreign token accepted";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), Errc::SignInRejected);
  }

  // Without verification the same token works; the email check does not help.
  env = make_env(implied_closure({F::REQUIRES_EMAIL_WITH_TOKEN, F::NO_STATE}));
  const auto foreign2 = mint_token_set(env->op().state(), std::string(kMaliciousRpName), victim_id, {}, 0);
  with_token.access_token = foreign2.access_token.value;
  with_token.email = "victim@example.com";
  EXPECT_EQ(env->target().handle_signin_endpoint(with_token, std::nullopt).user, victim_id);

  // Nothing usable.
  env = make_env({F::NO_STATE});
  try {
    env->target().handle_signin_endpoint(SignInSubmission{}, std::nullopt);
    FAIL() << "empty submission accepted";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), Errc::MissingField);
  }
}

TEST_F(RpScenario, StateChecks) {
  auto expect_state = [&](RpFlags flags, std::optional<StateValue> state, bool accepted) {
    Environment env(RpConfig::make("rp-t", FlowType::Hybrid, flags, "s"), options());
    SignInSubmission s;
    s.state = state;
    try {
      env.target().handle_signin_endpoint(s, std::nullopt);
    } catch (const ProtocolError& e) {
      EXPECT_EQ(e.code() == Errc::StateMismatch, !accepted) << to_string(e.code());
      return;
    }
    ADD_FAILURE() << "empty submission cannot sign in";
  };
  expect_state({}, std::nullopt, false);
  expect_state({}, StateValue::of("guess"), false);
  expect_state({F::NO_STATE}, std::nullopt, true);
  expect_state({F::FIXED_STATE}, StateValue::of("STATE"), true);
  expect_state({F::FIXED_STATE}, StateValue::of("OTHER"), false);
  expect_state({F::NULL_STATE_FORWARDED}, StateValue::null_marker(), true);
}

TEST_F(RpScenario, CodeFlowCallbackRejectsForeignState) {
  Environment env(RpConfig::hardened("rp-t", FlowType::AuthorizationCode, "s"), options());
  try {
    env.target().handle_code_flow_callback({{"code", "x"}, {"state", "wrong"}}, std::nullopt);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), Errc::StateMismatch);
  }
}

TEST_F(RpScenario, LandingPageExposure) {
  Environment env(RpConfig::make("rp-t", FlowType::AuthorizationCode,
                                 {F::RETURNS_USERINFO_PLAINTEXT, F::RETURNS_ACCESS_TOKEN_TO_BROWSER}, "s"),
                  options());
  auto& trace = env.new_trace("t");
  auto& b = env.new_browser("victim", trace);
  const auto r = env.login(b, env.target(), env.victim());
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.final_page->url.scheme, "http");
  EXPECT_EQ(r.final_page->response.field("email"), "victim@example.com");
  EXPECT_TRUE(r.final_page->response.field("access_token"));
}

TEST_F(RpScenario, TokenCookieOnlyWhenFlagged) {
  Environment env(RpConfig::make("rp-t", FlowType::Hybrid, {F::TOKEN_IN_PLAINTEXT_COOKIE}, "s"), options());
  auto& trace = env.new_trace("t");
  auto& b = env.new_browser("victim", trace);
  ASSERT_TRUE(env.login(b, env.target(), env.victim()).success);
  EXPECT_TRUE(b.cookie(env.target().config().host(), std::string(kRpTokenCookie)));

  Environment plain(RpConfig::hardened("rp-t", FlowType::Hybrid, "s"), options());
  auto& t2 = plain.new_trace("t");
  auto& b2 = plain.new_browser("victim", t2);
  ASSERT_TRUE(plain.login(b2, plain.target(), plain.victim()).success);
  EXPECT_FALSE(b2.cookie(plain.target().config().host(), std::string(kRpTokenCookie)));
}

TEST_F(RpScenario, WrongMethodIsRefused) {
  Environment env(RpConfig::make("rp-t", FlowType::Hybrid, {F::CLIENT_SUBMITS_VIA_POST}, "s"), options());
  HttpRequest get;
  get.url = env.target().config().signin_url();
  EXPECT_EQ(env.target().handle(get).status, 405);
}

TEST_F(RpScenario, EnvironmentRejectsReservedName) {
  EXPECT_THROW(Environment(RpConfig::hardened(std::string(kMaliciousRpName), FlowType::Hybrid, "s"), options()),
               ProtocolError);
}

}  // namespace
}  // namespace oidcsim
