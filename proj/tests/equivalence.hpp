#pragma once

#include <algorithm>
#include <optional>
#include <string_view>

#include "oidcsim/attacks.hpp"

namespace oidcsim::testing {

// Closed-form expectation for a config holding at most one trigger flag
// (plus whatever that flag implies).
inline bool expected_success(std::string_view id, FlowType flow, std::optional<RpFlag> flag) {
  using F = RpFlag;
  auto is = [&](std::initializer_list<RpFlag> any) {
    return flag && std::find(any.begin(), any.end(), *flag) != any.end();
  };
  const bool code = flow == FlowType::AuthorizationCode;
  if (id == playbook::kGoogleId) return !code && is({F::AUTH_BY_GOOGLE_ID, F::GOOGLE_ID_WITH_ACCESS_TOKEN});
  if (id == playbook::kCrossRpToken) return !code && is({F::AUTH_BY_ACCESS_TOKEN, F::REQUIRES_EMAIL_WITH_TOKEN});
  // A client-side RP signs in with the id_token alone and never holds an access token.
  const bool client_side = flow == FlowType::ClientSide;
  if (id == playbook::kTokenSniff) {
    return !client_side && is({F::TOKEN_IN_PLAINTEXT_COOKIE, F::RETURNS_ACCESS_TOKEN_TO_BROWSER});
  }
  if (id == playbook::kPrivacySniff) {
    if (client_side) {
      return is({F::PLAINTEXT_SIGNIN_ENDPOINT, F::RETURNS_USERINFO_PLAINTEXT, F::DOWNGRADE_TO_HTTP_AFTER_SIGNIN});
    }
    return is({F::TOKEN_IN_PLAINTEXT_COOKIE, F::RETURNS_ACCESS_TOKEN_TO_BROWSER, F::RETURNS_USERINFO_PLAINTEXT,
               F::DOWNGRADE_TO_HTTP_AFTER_SIGNIN});
  }
  if (id == playbook::kSessionSwap) return is({F::NO_STATE, F::FIXED_STATE, F::NULL_STATE_FORWARDED});
  if (id == playbook::kForcedLogin) return code && is({F::NO_STATE, F::FIXED_STATE, F::NULL_STATE_FORWARDED});
  if (id == playbook::kXssTokenTheft) return code;  // the browser bug, not an RP flag
  return false;
}

}  // namespace oidcsim::testing
