#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "oidcsim/browser.hpp"
#include "oidcsim/provider.hpp"
#include "oidcsim/relying_party.hpp"

namespace oidcsim {

struct ScenarioOptions {
  OpFlags op_flags;
  bool universal_xss = false;  // victim browser
  std::uint64_t seed = 0;
};

/// Victim and attacker accounts used by every scenario.
UserIdentity default_victim();
UserIdentity default_attacker();

/// Name of the attacker-operated RP every scenario registers next to the target.
inline constexpr std::string_view kMaliciousRpName = "rp-m";

/// Where a flow stands once the OP has produced its authorization response,
/// before the browser hands it on to the RP.
struct PendingDelivery {
  HttpResponse op_response;     // postmessage-html or 302
  Url authorize_url;
  std::optional<std::string> client_state;

  std::optional<HtmlDocument> html() const { return HtmlDocument::from_http(op_response); }
  /// Parameters the OP attached to the redirect (query), code flow only.
  Params redirect_params() const;
};

struct LoginResult {
  bool success = false;
  std::optional<std::string> rp_session;
  std::optional<SignInSubmission> submission;
  std::optional<Page> final_page;
  std::string error;
};

/// One isolated world: clock, network, OP, the target RP, the malicious RP
/// and the two users. Nothing is shared between environments.
class Environment {
 public:
  Environment(const RpConfig& target, ScenarioOptions options);
  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;

  LogicalClock& clock() { return clock_; }
  Network& network() { return network_; }
  OpenIdProvider& op() { return *op_; }
  RelyingParty& target() { return *target_; }
  RelyingParty& malicious() { return *malicious_; }
  const UserIdentity& victim() const { return victim_; }
  const UserIdentity& attacker() const { return attacker_; }
  const ScenarioOptions& options() const { return options_; }

  /// Traces live as long as the environment; browsers write into them.
  Trace& new_trace(const std::string& label);
  Browser& new_browser(const std::string& label, Trace& trace, bool universal_xss = false);

  /// Runs the user-visible login up to the OP's authorization response.
  PendingDelivery drive_to_delivery(Browser& browser, RelyingParty& rp, const UserIdentity& user);
  /// Full login as `user` at `rp`. Failures are reported, not thrown.
  LoginResult login(Browser& browser, RelyingParty& rp, const UserIdentity& user);

  /// RP session cookie currently held by `browser` for `rp`, and its user.
  std::optional<std::string> session_user(const Browser& browser, const RelyingParty& rp) const;

 private:
  ScenarioOptions options_;
  LogicalClock clock_;
  Network network_;
  std::unique_ptr<OpenIdProvider> op_;
  std::unique_ptr<RelyingParty> target_;
  std::unique_ptr<RelyingParty> malicious_;
  UserIdentity victim_;
  UserIdentity attacker_;
  std::deque<Trace> traces_;
  std::deque<Browser> browsers_;
};

}  // namespace oidcsim
