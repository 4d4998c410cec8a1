#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oidcsim/manifest.hpp"
#include "oidcsim/scanner.hpp"

namespace oidcsim {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kHighFinding = 2;
}  // namespace exit_code

enum class OutputFormat { Table, Records };

struct FleetScan {
  FleetManifest manifest;
  std::vector<ScanResult> results;  // manifest order
  FleetReport report;

  bool any_high() const;
};

/// Scans every RP of the manifest on `jobs` worker threads.
FleetScan run_fleet(const FleetManifest& manifest, int jobs = 1);

/// Writes findings, fleet report and traces under `out_dir`.
void write_scan_outputs(const FleetScan& scan, const std::filesystem::path& out_dir);

struct ScanArgs {
  std::filesystem::path manifest;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::filesystem::path out = "scan-out";
  OutputFormat format = OutputFormat::Table;
};

struct DemoArgs {
  std::string playbook;
  std::uint64_t seed = 1;
  bool patched_browser = false;
  bool no_grant = false;
  bool no_op_session = false;
  bool hardened = false;
};

int cmd_scan(const ScanArgs& args, std::ostream& out, std::ostream& err);
int cmd_fleet_report(const ScanArgs& args, std::ostream& out, std::ostream& err);
int cmd_analyze_trace(const std::filesystem::path& trace, OutputFormat format, std::ostream& out, std::ostream& err);
int cmd_demo(const DemoArgs& args, std::ostream& out, std::ostream& err);

/// The target each demo runs against unless `hardened` is set.
RpConfig demo_target(std::string_view playbook_id, bool hardened);

/// Parses the command line and dispatches to a command.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace oidcsim
