#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oidcsim/attacks.hpp"
#include "oidcsim/relying_party.hpp"
#include "oidcsim/trace.hpp"

namespace oidcsim {

enum class VulnClass {
  GoogleIdAuth,
  UnverifiedTokenAuth,
  TokenSniffable,
  PrivacyLeak,
  SessionSwap,
  ForcedLoginCsrf,
  XssTokenTheft,
  TokenToBrowser,
  WeakState,
};

const std::vector<VulnClass>& all_vuln_classes();
std::string_view to_string(VulnClass c);
std::optional<VulnClass> parse_vuln_class(std::string_view text);

/// Candidate marks a static signature that needs a dynamic exploit to confirm.
enum class Severity { High, Medium, Low, Candidate };
std::string_view to_string(Severity s);
Severity default_severity(VulnClass c);

enum class FindingSource { DynamicPlaybook, StaticSignature };
std::string_view to_string(FindingSource s);

struct Finding {
  std::string rp;
  VulnClass vuln = VulnClass::WeakState;
  Severity severity = Severity::Medium;
  FindingSource source = FindingSource::StaticSignature;
  std::string detail;
  std::vector<std::string> evidence;  // "<trace label>#<seq>" references and notes

  bool confirmed() const { return severity != Severity::Candidate; }
  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Throws Unclassifiable when the trace holds no authorization response.
FlowType classify_flow(const Trace& trace);

/// Static BRM rules over one login trace.
std::vector<Finding> detect_signatures(const Trace& trace);

/// One finding per (rp, class); a dynamic finding absorbs the static one.
std::vector<Finding> dedup(std::vector<Finding> findings);

struct ScanOptions {
  OpFlags op_flags;
  bool universal_xss = false;
  std::uint64_t seed = 0;
};

struct ScanResult {
  RpConfig config;
  std::vector<Finding> findings;
  Trace login_trace;
  std::vector<AttackOutcome> outcomes;
};

/// Per-RP seed, independent of the position of the RP in the fleet.
std::uint64_t rp_seed(std::uint64_t fleet_seed, std::string_view rp_name);

/// Throws ScenarioSetupFailed.
ScanResult scan_rp(const RpConfig& config, const ScanOptions& options);

/// Findings the playbook outcomes establish on their own.
std::vector<Finding> dynamic_findings(const std::vector<AttackOutcome>& outcomes);

struct FleetRow {
  FlowType flow = FlowType::Hybrid;
  std::string metric;
  int count = 0;
  int population = 0;
};

struct FleetReport {
  std::map<FlowType, int> population;
  std::vector<FleetRow> rows;

  int total() const;
  /// -1 when no such row exists.
  int count(FlowType flow, std::string_view metric) const;
};

/// Integer percent, half rounded up.
int percent(int count, int population);

FleetReport aggregate_fleet(const std::vector<ScanResult>& results);

std::string format_fleet_report(const FleetReport& report);
nlohmann::ordered_json fleet_report_json(const FleetReport& report);
std::string format_findings_table(const std::vector<ScanResult>& results);
/// One JSON object per line, one line per finding.
std::string format_findings_records(const std::vector<ScanResult>& results);
nlohmann::ordered_json finding_json(const Finding& f);

}  // namespace oidcsim
