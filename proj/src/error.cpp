#include "oidcsim/error.hpp"

namespace oidcsim {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnknownClient: return "UnknownClient";
    case Errc::UnknownUser: return "UnknownUser";
    case Errc::MalformedToken: return "MalformedToken";
    case Errc::BadSignature: return "BadSignature";
    case Errc::AudienceMismatch: return "AudienceMismatch";
    case Errc::Expired: return "Expired";
    case Errc::InconsistentRegistration: return "InconsistentRegistration";
    case Errc::OriginMismatch: return "OriginMismatch";
    case Errc::RedirectUriMismatch: return "RedirectUriMismatch";
    case Errc::BadCredentials: return "BadCredentials";
    case Errc::NoPendingRequest: return "NoPendingRequest";
    case Errc::InvalidCode: return "InvalidCode";
    case Errc::ClientAuthFailed: return "ClientAuthFailed";
    case Errc::InvalidToken: return "InvalidToken";
    case Errc::SignInRejected: return "SignInRejected";
    case Errc::MissingField: return "MissingField";
    case Errc::StateMismatch: return "StateMismatch";
    case Errc::RedirectLoop: return "RedirectLoop";
    case Errc::XssBlocked: return "XssBlocked";
    case Errc::NoAutoGrant: return "NoAutoGrant";
    case Errc::StaleCode: return "StaleCode";
    case Errc::ScenarioSetupFailed: return "ScenarioSetupFailed";
    case Errc::Unclassifiable: return "Unclassifiable";
    case Errc::MalformedTrace: return "MalformedTrace";
    case Errc::InvalidManifest: return "InvalidManifest";
    case Errc::UnknownPlaybook: return "UnknownPlaybook";
  }
  return "Unknown";
}

}  // namespace oidcsim
