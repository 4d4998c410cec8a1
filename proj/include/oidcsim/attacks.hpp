#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oidcsim/scenario.hpp"
#include "oidcsim/trace.hpp"

namespace oidcsim {

namespace playbook {
inline constexpr std::string_view kGoogleId = "google-id-impersonation";
inline constexpr std::string_view kCrossRpToken = "cross-rp-token-impersonation";
inline constexpr std::string_view kTokenSniff = "token-sniff";
inline constexpr std::string_view kPrivacySniff = "privacy-sniff";
inline constexpr std::string_view kSessionSwap = "session-swap";
inline constexpr std::string_view kXssTokenTheft = "xss-token-theft";
inline constexpr std::string_view kForcedLogin = "forced-login-csrf";
}  // namespace playbook

const std::vector<std::string_view>& all_playbooks();
bool is_playbook(std::string_view id);
/// Playbooks the scanner runs against an RP of the given flow, in run order.
std::vector<std::string_view> applicable_playbooks(FlowType flow);

/// Where a sniffed token was seen on the wire.
namespace sniff_source {
inline constexpr std::string_view kSignInSubmission = "signin-submission";
inline constexpr std::string_view kCookie = "cookie";
inline constexpr std::string_view kResponseBody = "response-body";
}  // namespace sniff_source

struct SniffedValue {
  std::string value;
  std::string source;
  std::int64_t seq = 0;

  friend bool operator==(const SniffedValue&, const SniffedValue&) = default;
};

/// What a passive observer of Http messages learns from one trace.
struct SniffReport {
  std::vector<SniffedValue> access_tokens;
  std::vector<SniffedValue> id_tokens;
  std::set<std::string> google_ids;
  std::set<std::string> emails;
  std::set<std::string> subjects;
  std::set<std::string> names;
  std::set<std::int64_t> seqs;

  bool empty() const { return seqs.empty(); }
  bool has_profile() const { return !google_ids.empty() || !emails.empty() || !subjects.empty() || !names.empty(); }
  std::set<std::string> token_sources() const;
};

SniffReport sniff_token_or_info(const Trace& trace);

struct AttackOutcome {
  std::string playbook;
  std::string rp;
  bool success = false;
  bool preconditions_met = true;
  /// Playbook-specific qualifier: "code"/"token" for session-swap, the token
  /// sources for token-sniff.
  std::string detail;
  std::vector<std::string> evidence;
  std::vector<std::int64_t> trace_refs;
  Trace trace;
};

struct PlaybookOptions {
  bool victim_op_session = true;  // victim signed in at the OP beforehand
  bool victim_grant = true;       // ...and already granted the target
};

AttackOutcome impersonate_via_google_id(Environment& env);
AttackOutcome impersonate_via_cross_rp_token(Environment& env);
AttackOutcome token_sniff(Environment& env);
AttackOutcome privacy_sniff(Environment& env);
AttackOutcome session_swap(Environment& env);
AttackOutcome xss_steal_token(Environment& env, const PlaybookOptions& opts = {});
AttackOutcome forced_login_csrf(Environment& env, const PlaybookOptions& opts = {});

/// Builds a fresh environment for `target` and runs one playbook in it.
/// Throws UnknownPlaybook or ScenarioSetupFailed.
AttackOutcome run_playbook(std::string_view id, const RpConfig& target, const ScenarioOptions& options,
                           const PlaybookOptions& opts = {});

}  // namespace oidcsim
