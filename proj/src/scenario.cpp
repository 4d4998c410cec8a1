#include "oidcsim/scenario.hpp"

#include "oidcsim/error.hpp"

namespace oidcsim {

UserIdentity default_victim() {
  return {"115722834054889887046", "victim@example.com", "Victim User", "victim-password"};
}

UserIdentity default_attacker() {
  return {"104857600000000000001", "attacker@evil.example", "Attacker", "attacker-password"};
}

Params PendingDelivery::redirect_params() const {
  if (op_response.status != 302 || !op_response.location) return {};
  return op_response.location->query;
}

Environment::Environment(const RpConfig& target, ScenarioOptions options)
    : options_(options), victim_(default_victim()), attacker_(default_attacker()) {
  if (target.name == kMaliciousRpName) {
    throw ProtocolError(Errc::ScenarioSetupFailed, "target name collides with the malicious RP");
  }
  OpState state(splitmix64(options.seed ^ 0x6f70), options.op_flags);
  state.add_user(victim_);
  state.add_user(attacker_);

  auto malicious = RpConfig::hardened(std::string(kMaliciousRpName), FlowType::Hybrid,
                                      "secret-" + std::string(kMaliciousRpName));
  try {
    state.register_client(target.registration);
    state.register_client(malicious.registration);
  } catch (const ProtocolError& e) {
    throw ProtocolError(Errc::ScenarioSetupFailed, e.what());
  }

  op_ = std::make_unique<OpenIdProvider>(std::move(state), clock_);
  target_ = std::make_unique<RelyingParty>(target, *op_, clock_, splitmix64(options.seed ^ 0x7270));
  malicious_ = std::make_unique<RelyingParty>(malicious, *op_, clock_, splitmix64(options.seed ^ 0x6d72));
  network_.attach(std::string(kOpHost), *op_);
  network_.attach(target_->config().host(), *target_);
  network_.attach(malicious_->config().host(), *malicious_);
}

Trace& Environment::new_trace(const std::string& label) {
  auto& t = traces_.emplace_back();
  t.meta = {target_->config().name, std::string(to_string(target_->config().flow)), options_.seed, label};
  return t;
}

Browser& Environment::new_browser(const std::string& label, Trace& trace, bool universal_xss) {
  return browsers_.emplace_back(label, network_, clock_, trace, universal_xss);
}

PendingDelivery Environment::drive_to_delivery(Browser& browser, RelyingParty& rp, const UserIdentity& user) {
  const auto login_page = browser.navigate(rp.config().login_url());
  const auto authorize = login_page.response.field("authorize_url");
  if (!authorize) throw ProtocolError(Errc::ScenarioSetupFailed, "login page without authorization URL");

  PendingDelivery out;
  out.authorize_url = Url::parse(*authorize);
  out.client_state = login_page.response.field("client_state");

  HttpRequest auth;
  auth.url = out.authorize_url;
  auto resp = browser.send(auth);

  Url login_endpoint;
  login_endpoint.host = std::string(kOpHost);
  login_endpoint.path = "/o/login";
  if (resp.kind == response_kind::kLoginForm || resp.kind == response_kind::kConsentForm) {
    HttpRequest form;
    form.method = "POST";
    form.url = login_endpoint;
    form.form = {{"pending", resp.field("pending").value_or("")}};
    if (resp.kind == response_kind::kLoginForm) {
      form.form.emplace_back("email", user.email);
      form.form.emplace_back("password", user.password);
    } else {
      form.form.emplace_back("consent", "yes");
    }
    resp = browser.send(form);
  }
  if (resp.kind == response_kind::kError) {
    throw ProtocolError(Errc::ScenarioSetupFailed, "OP refused: " + resp.field("error").value_or("?"));
  }
  out.op_response = std::move(resp);
  return out;
}

LoginResult Environment::login(Browser& browser, RelyingParty& rp, const UserIdentity& user) {
  LoginResult result;
  try {
    auto pending = drive_to_delivery(browser, rp, user);
    if (auto html = pending.html()) {
      result.submission = browser.run_postmessage_delivery(*html, rp.config().origin(), rp.config(),
                                                           pending.client_state);
      result.final_page = browser.last_page();
    } else {
      result.final_page = browser.follow(pending.authorize_url, pending.op_response);
    }
  } catch (const ProtocolError& e) {
    result.error = e.what();
    return result;
  }
  result.rp_session = browser.cookie(rp.config().host(), std::string(kRpSessionCookie));
  const auto who = result.rp_session ? rp.logged_in_user(*result.rp_session) : std::nullopt;
  result.success = who == user.numeric_id;
  if (!result.success && result.final_page) {
    result.error = result.final_page->response.field("error").value_or("not signed in");
  }
  return result;
}

std::optional<std::string> Environment::session_user(const Browser& browser, const RelyingParty& rp) const {
  const auto cookie = browser.cookie(rp.config().host(), std::string(kRpSessionCookie));
  if (!cookie) return std::nullopt;
  return rp.logged_in_user(*cookie);
}

}  // namespace oidcsim
