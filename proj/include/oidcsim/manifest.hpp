#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oidcsim/protocol.hpp"
#include "oidcsim/relying_party.hpp"

namespace oidcsim {

struct BrowserFlags {
  bool universal_xss = false;
};

/// A fleet to scan. Schema (JSON):
///   seed         unsigned integer, required
///   op           {null_state_bug, accept_mutated_response_type}: booleans, optional
///   browser      {universal_xss}: boolean, optional
///   assumptions  array of strings, optional
///   rps          array of {name, flow, flags[], client_secret?, note?}, required
/// Unknown keys are rejected.
struct FleetManifest {
  std::uint64_t seed = 0;
  OpFlags op_flags;
  BrowserFlags browser;
  std::vector<std::string> assumptions;
  std::vector<RpConfig> rps;
};

/// Throws InvalidManifest naming the field path and the source line.
FleetManifest parse_manifest(std::string_view text, const std::string& source = "manifest");
FleetManifest load_manifest(const std::filesystem::path& path);

}  // namespace oidcsim
