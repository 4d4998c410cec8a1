#include "oidcsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "oidcsim/error.hpp"

namespace oidcsim {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

FleetManifest load_with_seed(const ScanArgs& args) {
  auto manifest = load_manifest(args.manifest);
  if (args.seed) manifest.seed = *args.seed;
  return manifest;
}

}  // namespace

bool FleetScan::any_high() const {
  for (const auto& r : results) {
    for (const auto& f : r.findings) {
      if (f.severity == Severity::High) return true;
    }
  }
  return false;
}

FleetScan run_fleet(const FleetManifest& manifest, int jobs) {
  FleetScan scan;
  scan.manifest = manifest;
  scan.results.resize(manifest.rps.size());
  const ScanOptions options{manifest.op_flags, manifest.browser.universal_xss, manifest.seed};

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.rps.size(); i = next++) {
      try {
        scan.results[i] = scan_rp(manifest.rps[i], options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  scan.report = aggregate_fleet(scan.results);
  return scan;
}

void write_scan_outputs(const FleetScan& scan, const std::filesystem::path& out_dir) {
  const auto traces = out_dir / "traces";
  std::filesystem::create_directories(traces);
  write_file(out_dir / "findings.jsonl", format_findings_records(scan.results));
  write_file(out_dir / "findings.txt", format_findings_table(scan.results));
  write_file(out_dir / "fleet_report.txt", format_fleet_report(scan.report));
  write_file(out_dir / "fleet_report.json", fleet_report_json(scan.report).dump(2) + "\n");
  for (const auto& r : scan.results) {
    write_file(traces / (r.config.name + ".login.jsonl"), trace_to_string(r.login_trace));
    for (const auto& o : r.outcomes) {
      write_file(traces / (r.config.name + "." + o.playbook + ".jsonl"), trace_to_string(o.trace));
    }
  }
}

int cmd_scan(const ScanArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto scan = run_fleet(load_with_seed(args), args.jobs);
    write_scan_outputs(scan, args.out);
    if (args.format == OutputFormat::Records) {
      out << format_findings_records(scan.results);
    } else {
      out << format_fleet_report(scan.report);
      std::size_t n = 0;
      for (const auto& r : scan.results) n += r.findings.size();
      out << "\n" << n << " findings over " << scan.results.size() << " RPs written to " << args.out.string() << "\n";
    }
    return scan.any_high() ? exit_code::kHighFinding : exit_code::kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
}

int cmd_fleet_report(const ScanArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto scan = run_fleet(load_with_seed(args), args.jobs);
    if (args.format == OutputFormat::Records) {
      out << fleet_report_json(scan.report).dump(2) << "\n";
    } else {
      out << format_fleet_report(scan.report);
    }
    return scan.any_high() ? exit_code::kHighFinding : exit_code::kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
}

int cmd_analyze_trace(const std::filesystem::path& path, OutputFormat format, std::ostream& out, std::ostream& err) {
  Trace trace;
  try {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProtocolError(Errc::MalformedTrace, "cannot open " + path.string());
    trace = read_trace(in);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kError;
  }
  std::string flow;
  int status = exit_code::kOk;
  try {
    flow = std::string(to_string(classify_flow(trace)));
  } catch (const ProtocolError& e) {
    flow = "Unclassifiable";
    err << "error: " << e.what() << "\n";
    status = exit_code::kError;
  }
  const auto findings = detect_signatures(trace);
  if (format == OutputFormat::Records) {
    nlohmann::ordered_json j{{"rp", trace.meta.rp}, {"flow", flow}, {"findings", nlohmann::ordered_json::array()}};
    for (const auto& f : findings) j["findings"].push_back(finding_json(f));
    out << j.dump() << "\n";
  } else {
    out << "rp: " << trace.meta.rp << "\nflow: " << flow << "\nsignatures: " << findings.size() << "\n";
    for (const auto& f : findings) {
      out << "  " << to_string(f.vuln) << " [" << to_string(f.severity) << "]";
      if (!f.detail.empty()) out << " " << f.detail;
      for (const auto& e : f.evidence) out << " " << e;
      out << "\n";
    }
  }
  return status;
}

namespace {

const std::map<std::string_view, std::vector<std::string_view>>& demo_steps() {
  static const std::map<std::string_view, std::vector<std::string_view>> steps{
      {playbook::kGoogleId,
       {"attacker looks up the victim's numeric Google ID",
        "attacker signs in at the target with their own account",
        "attacker replaces the submitted google_id with the victim's",
        "the target opens a session for the victim"}},
      {playbook::kCrossRpToken,
       {"victim signs in at the attacker-run RP, which keeps the access_token",
        "attacker opens the target's login page",
        "attacker submits the victim's token to the target's sign-in endpoint",
        "the target asks userinfo who owns the token and logs the attacker in as the victim"}},
      {playbook::kTokenSniff,
       {"victim signs in normally", "a passive observer reads every http message",
        "any access_token seen is replayed against userinfo"}},
      {playbook::kPrivacySniff,
       {"victim signs in normally", "a passive observer reads every http message",
        "profile attributes and decodable tokens are collected"}},
      {playbook::kSessionSwap,
       {"attacker signs in with their own account and keeps the authorization response",
        "attacker embeds it in an auto-loading page", "victim's browser loads the page with the victim's cookies",
        "the victim's RP session now belongs to the attacker"}},
      {playbook::kXssTokenTheft,
       {"victim is signed in at the OP and has granted the target before",
        "injected script opens the authorization URL with response_type mutated to code token id_token",
        "the OP auto-grants and redirects with tokens in the fragment to the target's error page",
        "the script reads the fragment and sends the access_token to the attacker"}},
      {playbook::kForcedLogin,
       {"victim is signed in at the OP and has granted the target before",
        "attacker page embeds the target's authorization URL in an img tag",
        "the OP auto-grants and the callback signs the victim in without any action"}},
  };
  return steps;
}

std::string describe(const RpConfig& c) {
  std::string s = std::string(to_string(c.flow)) + ":";
  if (c.flags.empty()) return s + " hardened";
  for (auto f : c.flags) s += " " + std::string(to_string(f));
  return s;
}

}  // namespace

RpConfig demo_target(std::string_view id, bool hardened) {
  using F = RpFlag;
  FlowType flow = FlowType::Hybrid;
  RpFlags flags;
  if (id == playbook::kGoogleId) flags = {F::AUTH_BY_GOOGLE_ID};
  if (id == playbook::kCrossRpToken) flags = {F::SUBMITS_ACCESS_TOKEN, F::AUTH_BY_ACCESS_TOKEN};
  if (id == playbook::kTokenSniff) flags = {F::SUBMITS_ACCESS_TOKEN, F::AUTH_BY_ACCESS_TOKEN, F::PLAINTEXT_SIGNIN_ENDPOINT};
  if (id == playbook::kPrivacySniff) flags = {F::PLAINTEXT_SIGNIN_ENDPOINT, F::RETURNS_USERINFO_PLAINTEXT};
  if (id == playbook::kSessionSwap) {
    flags = {F::SUBMITS_ACCESS_TOKEN, F::AUTH_BY_ACCESS_TOKEN, F::NO_STATE, F::CLIENT_SUBMITS_VIA_POST};
  }
  if (id == playbook::kXssTokenTheft) flow = FlowType::AuthorizationCode;
  if (id == playbook::kForcedLogin) {
    flow = FlowType::AuthorizationCode;
    flags = {F::NO_STATE};
  }
  if (hardened) flags.clear();
  return RpConfig::make("demo-rp", flow, std::move(flags), "secret-demo-rp");
}

int cmd_demo(const DemoArgs& args, std::ostream& out, std::ostream& err) {
  if (!is_playbook(args.playbook)) {
    err << "error: unknown playbook '" << args.playbook << "'; valid ids:";
    for (auto id : all_playbooks()) err << " " << id;
    err << "\n";
    return exit_code::kError;
  }
  const auto target = demo_target(args.playbook, args.hardened);
  ScenarioOptions options;
  options.op_flags.null_state_bug = true;
  options.universal_xss = !args.patched_browser;
  options.seed = args.seed;
  PlaybookOptions popts;
  popts.victim_grant = !args.no_grant;
  popts.victim_op_session = !args.no_op_session;

  AttackOutcome outcome;
  try {
    outcome = run_playbook(args.playbook, target, options, popts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kError;
  }

  out << "demo: " << args.playbook << " against " << target.name << " (" << describe(target) << ")\n";
  out << "browser: " << (options.universal_xss ? "vulnerable (universal XSS)" : "patched") << "\n\nsteps:\n";
  int n = 0;
  for (auto s : demo_steps().at(outcome.playbook)) out << "  " << ++n << ". " << s << "\n";
  out << "\nmessages:\n";
  for (const auto& m : outcome.trace.messages) {
    out << "  #" << m.seq << " " << m.from << " " << m.method << " " << m.url << " -> " << m.status << " "
        << m.response_kind;
    if (!m.location.empty()) out << " " << m.location;
    if (m.channel == ChannelSecurity::Http) out << "  [plaintext]";
    out << "\n";
  }
  for (const auto& note : outcome.trace.notes) out << "  note: " << note << "\n";
  out << "\nevidence:\n";
  for (const auto& e : outcome.evidence) out << "  " << e << "\n";
  out << "\nresult: " << (outcome.success ? "SUCCESS" : "FAILURE") << "\n";
  return exit_code::kOk;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic OpenID Connect testbed and RP scanner", "oidcscan"};
  app.require_subcommand(1);

  const std::map<std::string, OutputFormat> formats{{"table", OutputFormat::Table}, {"records", OutputFormat::Records}};
  ScanArgs scan_args;
  std::uint64_t seed = 0;
  auto add_scan_opts = [&](CLI::App* sub) {
    sub->add_option("--manifest", scan_args.manifest, "fleet manifest (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the manifest seed");
    sub->add_option("--jobs", scan_args.jobs, "worker threads")->check(CLI::Range(1, 64));
    sub->add_option("--format", scan_args.format, "table or records")->transform(CLI::CheckedTransformer(formats));
  };
  auto* scan = app.add_subcommand("scan", "scan every RP of a manifest and write reports and traces");
  add_scan_opts(scan);
  scan->add_option("--out", scan_args.out, "output directory");
  auto* report = app.add_subcommand("fleet-report", "scan in memory and print only the fleet report");
  add_scan_opts(report);

  std::filesystem::path trace_path;
  OutputFormat trace_format = OutputFormat::Table;
  auto* analyze = app.add_subcommand("analyze-trace", "classify a trace and list static signatures");
  analyze->add_option("trace", trace_path, "trace file (JSON lines)")->required();
  analyze->add_option("--format", trace_format, "table or records")->transform(CLI::CheckedTransformer(formats));

  DemoArgs demo_args;
  auto* demo = app.add_subcommand("demo", "run one playbook against a canned RP and narrate it");
  demo->add_option("playbook", demo_args.playbook, "playbook id")->required();
  demo->add_option("--seed", demo_args.seed, "scenario seed");
  demo->add_flag("--patched-browser", demo_args.patched_browser, "victim browser without the XSS bug");
  demo->add_flag("--no-grant", demo_args.no_grant, "victim never granted the target");
  demo->add_flag("--no-op-session", demo_args.no_op_session, "victim not signed in at the OP");
  demo->add_flag("--hardened", demo_args.hardened, "run against a hardened target instead");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_code::kOk : exit_code::kError;
  }
  if (scan->count("--seed") + report->count("--seed") > 0) scan_args.seed = seed;

  if (*scan) return cmd_scan(scan_args, out, err);
  if (*report) return cmd_fleet_report(scan_args, out, err);
  if (*analyze) return cmd_analyze_trace(trace_path, trace_format, out, err);
  return cmd_demo(demo_args, out, err);
}

}  // namespace oidcsim
