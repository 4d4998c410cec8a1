#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oidcsim {

enum class Errc {
  UnknownClient,
  UnknownUser,
  MalformedToken,
  BadSignature,
  AudienceMismatch,
  Expired,
  InconsistentRegistration,
  OriginMismatch,
  RedirectUriMismatch,
  BadCredentials,
  NoPendingRequest,
  InvalidCode,
  ClientAuthFailed,
  InvalidToken,
  SignInRejected,
  MissingField,
  StateMismatch,
  RedirectLoop,
  XssBlocked,
  NoAutoGrant,
  StaleCode,
  ScenarioSetupFailed,
  Unclassifiable,
  MalformedTrace,
  InvalidManifest,
  UnknownPlaybook,
};

std::string_view to_string(Errc code);

/// Every simulator failure carries one of the distinct codes above so that
/// callers (and tests) can branch on the reason rather than the message.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  explicit ProtocolError(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace oidcsim
