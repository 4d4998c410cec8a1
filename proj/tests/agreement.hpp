#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oidcsim/scanner.hpp"

namespace oidcsim::testing {

// Static signature that must accompany a confirmed dynamic finding.
inline std::optional<VulnClass> static_witness(VulnClass dynamic) {
  switch (dynamic) {
    case VulnClass::SessionSwap:
    case VulnClass::ForcedLoginCsrf:
      return VulnClass::WeakState;
    case VulnClass::XssTokenTheft:
    case VulnClass::WeakState:
      return std::nullopt;  // browser bug, or static-only
    default:
      return dynamic;
  }
}

// Passive-observation classes: the login trace alone decides them.
inline bool passive_class(VulnClass c) {
  return c == VulnClass::TokenSniffable || c == VulnClass::PrivacyLeak || c == VulnClass::TokenToBrowser;
}

/// Disagreements between signatures of the login trace and playbook findings
/// for one RP. Empty means they agree.
inline std::vector<std::string> static_dynamic_disagreements(const ScanResult& r) {
  std::set<VulnClass> statics;
  std::set<VulnClass> static_confirmed;
  for (const auto& f : detect_signatures(r.login_trace)) {
    statics.insert(f.vuln);
    if (f.confirmed()) static_confirmed.insert(f.vuln);
  }
  std::set<VulnClass> dynamics;
  for (const auto& f : dynamic_findings(r.outcomes)) dynamics.insert(f.vuln);

  std::vector<std::string> out;
  for (auto c : dynamics) {
    if (auto w = static_witness(c); w && !statics.contains(*w)) {
      out.push_back(r.config.name + ": dynamic " + std::string(to_string(c)) + " has no static signature");
    }
  }
  for (auto c : static_confirmed) {
    if (passive_class(c) && !dynamics.contains(c)) {
      out.push_back(r.config.name + ": static " + std::string(to_string(c)) + " not confirmed by a playbook");
    }
  }
  return out;
}

}  // namespace oidcsim::testing
