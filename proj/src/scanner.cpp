#include "oidcsim/scanner.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include "oidcsim/error.hpp"

namespace oidcsim {
namespace {

constexpr std::array<std::pair<VulnClass, std::string_view>, 9> kClassNames{{
    {VulnClass::GoogleIdAuth, "google-id-auth"},
    {VulnClass::UnverifiedTokenAuth, "unverified-token-auth"},
    {VulnClass::TokenSniffable, "token-sniffable"},
    {VulnClass::PrivacyLeak, "privacy-leak"},
    {VulnClass::SessionSwap, "session-swap"},
    {VulnClass::ForcedLoginCsrf, "forced-login-csrf"},
    {VulnClass::XssTokenTheft, "xss-token-theft"},
    {VulnClass::TokenToBrowser, "token-to-browser"},
    {VulnClass::WeakState, "null-absent-fixed-state"},
}};

// Session-bound states are 22 characters; anything this short is a constant.
constexpr std::size_t kMinStateLength = 16;

bool from_op(const BrowserRelayedMessage& m) { return m.to == OpenIdProvider::origin(); }

Params request_params(const BrowserRelayedMessage& m) {
  Params p = Url::parse(m.url).query;
  p.insert(p.end(), m.body.begin(), m.body.end());
  return p;
}

bool is_submission(const BrowserRelayedMessage& m) {
  if (from_op(m)) return false;
  const auto path = Url::parse(m.url).path;
  return path == "/signin/google" || path == "/callback";
}

std::string ref(const Trace& trace, std::int64_t seq) { return trace.meta.label + "#" + std::to_string(seq); }

Finding make(const Trace& trace, VulnClass c, Severity s, std::string detail) {
  Finding f;
  f.rp = trace.meta.rp;
  f.vuln = c;
  f.severity = s;
  f.source = FindingSource::StaticSignature;
  f.detail = std::move(detail);
  return f;
}

}  // namespace

const std::vector<VulnClass>& all_vuln_classes() {
  static const std::vector<VulnClass> v = [] {
    std::vector<VulnClass> out;
    for (const auto& [c, _] : kClassNames) out.push_back(c);
    return out;
  }();
  return v;
}

std::string_view to_string(VulnClass c) {
  for (const auto& [k, n] : kClassNames) {
    if (k == c) return n;
  }
  return "?";
}

std::optional<VulnClass> parse_vuln_class(std::string_view text) {
  for (const auto& [k, n] : kClassNames) {
    if (n == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::High: return "High";
    case Severity::Medium: return "Medium";
    case Severity::Low: return "Low";
    case Severity::Candidate: return "Candidate";
  }
  return "?";
}

Severity default_severity(VulnClass c) {
  switch (c) {
    case VulnClass::GoogleIdAuth:
    case VulnClass::UnverifiedTokenAuth:
    case VulnClass::SessionSwap:
      return Severity::High;
    case VulnClass::ForcedLoginCsrf:
      return Severity::Low;
    default:
      return Severity::Medium;
  }
}

std::string_view to_string(FindingSource s) {
  return s == FindingSource::DynamicPlaybook ? "dynamic-playbook" : "static-signature";
}

FlowType classify_flow(const Trace& trace) {
  for (const auto& m : trace.messages) {
    if (!from_op(m)) continue;
    if (m.response_kind == response_kind::kPostMessageHtml) {
      if (find_param(m.response_fields, "code")) return FlowType::Hybrid;
      if (find_param(m.response_fields, "access_token") || find_param(m.response_fields, "id_token")) {
        return FlowType::ClientSide;
      }
    }
    if (m.status == 302 && !m.location.empty()) {
      const auto q = Url::parse(m.location).query;
      if (find_param(q, "code") && !find_param(q, "access_token")) return FlowType::AuthorizationCode;
    }
  }
  throw ProtocolError(Errc::Unclassifiable, "no authorization response in trace '" + trace.meta.label + "'");
}

std::vector<Finding> detect_signatures(const Trace& trace) {
  std::map<VulnClass, Finding> found;
  auto hit = [&](VulnClass c, Severity s, std::int64_t seq, const std::string& detail) {
    auto [it, fresh] = found.try_emplace(c, make(trace, c, s, detail));
    if (!fresh && !detail.empty()) {
      auto& d = it->second.detail;
      if (("," + d + ",").find("," + detail + ",") == std::string::npos) d += d.empty() ? detail : "," + detail;
    }
    const auto r = ref(trace, seq);
    auto& ev = it->second.evidence;
    if (std::find(ev.begin(), ev.end(), r) == ev.end()) ev.push_back(r);
  };

  for (const auto& m : trace.messages) {
    const bool http = m.channel == ChannelSecurity::Http;
    const auto params = request_params(m);
    if (is_submission(m)) {
      if (find_param(params, "google_id")) hit(VulnClass::GoogleIdAuth, Severity::Candidate, m.seq, "");
      if (find_param(params, "access_token")) hit(VulnClass::UnverifiedTokenAuth, Severity::Candidate, m.seq, "");
      const auto state = find_param(params, "state");
      if (!state) {
        hit(VulnClass::WeakState, Severity::Medium, m.seq, "absent");
      } else if (*state == kNullStateWire) {
        hit(VulnClass::WeakState, Severity::Medium, m.seq, "null");
      } else if (state->size() < kMinStateLength) {
        hit(VulnClass::WeakState, Severity::Medium, m.seq, "fixed");
      }
    }
    if (!from_op(m) && find_param(m.response_fields, "access_token")) {
      hit(VulnClass::TokenToBrowser, Severity::Medium, m.seq, "");
    }
    if (!http) continue;
    if (find_param(params, "access_token")) {
      hit(VulnClass::TokenSniffable, Severity::Medium, m.seq, std::string(sniff_source::kSignInSubmission));
    }
    if (m.cookies.contains(std::string(kRpTokenCookie)) || m.set_cookies.contains(std::string(kRpTokenCookie))) {
      hit(VulnClass::TokenSniffable, Severity::Medium, m.seq, std::string(sniff_source::kCookie));
    }
    static constexpr std::array<std::string_view, 6> kProfileKeys{"email", "sub", "name",
                                                                  "google_id", "id_token", "access_token"};
    bool leaks = m.cookies.contains(std::string(kRpTokenCookie)) || m.set_cookies.contains(std::string(kRpTokenCookie));
    for (auto key : kProfileKeys) leaks = leaks || find_param(params, key) || find_param(m.response_fields, key);
    if (leaks) hit(VulnClass::PrivacyLeak, Severity::Medium, m.seq, "");
  }

  std::vector<Finding> out;
  for (auto& [_, f] : found) out.push_back(std::move(f));
  return out;
}

std::vector<Finding> dedup(std::vector<Finding> findings) {
  std::map<std::pair<std::string, VulnClass>, Finding> merged;
  for (auto& f : findings) {
    auto key = std::make_pair(f.rp, f.vuln);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(std::move(key), std::move(f));
      continue;
    }
    Finding& kept = it->second;
    const bool replace = f.source == FindingSource::DynamicPlaybook && kept.source != FindingSource::DynamicPlaybook;
    Finding& winner = replace ? f : kept;
    const Finding& loser = replace ? kept : f;
    for (const auto& e : loser.evidence) {
      if (std::find(winner.evidence.begin(), winner.evidence.end(), e) == winner.evidence.end()) {
        winner.evidence.push_back(e);
      }
    }
    if (replace) kept = std::move(f);
  }
  std::vector<Finding> out;
  for (auto& [_, f] : merged) out.push_back(std::move(f));
  return out;
}

std::uint64_t rp_seed(std::uint64_t fleet_seed, std::string_view rp_name) {
  return splitmix64(fleet_seed ^ fnv1a(rp_name));
}

std::vector<Finding> dynamic_findings(const std::vector<AttackOutcome>& outcomes) {
  std::vector<Finding> out;
  for (const auto& o : outcomes) {
    if (!o.success) continue;
    auto emit = [&](VulnClass c, std::string detail) {
      Finding f;
      f.rp = o.rp;
      f.vuln = c;
      f.severity = default_severity(c);
      f.source = FindingSource::DynamicPlaybook;
      f.detail = std::move(detail);
      for (auto seq : o.trace_refs) f.evidence.push_back(o.playbook + "#" + std::to_string(seq));
      out.push_back(std::move(f));
    };
    if (o.playbook == playbook::kGoogleId) emit(VulnClass::GoogleIdAuth, "");
    if (o.playbook == playbook::kCrossRpToken) emit(VulnClass::UnverifiedTokenAuth, "");
    if (o.playbook == playbook::kPrivacySniff) emit(VulnClass::PrivacyLeak, "");
    if (o.playbook == playbook::kSessionSwap) emit(VulnClass::SessionSwap, o.detail);
    if (o.playbook == playbook::kXssTokenTheft) emit(VulnClass::XssTokenTheft, "");
    if (o.playbook == playbook::kForcedLogin) emit(VulnClass::ForcedLoginCsrf, "");
    if (o.playbook == playbook::kTokenSniff) {
      // Tokens the RP itself echoes into a page are a separate class from
      // tokens that merely travel in clear.
      std::string wire;
      bool body = false;
      std::stringstream ss(o.detail);
      for (std::string s; std::getline(ss, s, ',');) {
        if (s == sniff_source::kResponseBody) {
          body = true;
        } else {
          wire += (wire.empty() ? "" : ",") + s;
        }
      }
      if (!wire.empty()) emit(VulnClass::TokenSniffable, wire);
      if (body) emit(VulnClass::TokenToBrowser, "");
    }
  }
  return out;
}

ScanResult scan_rp(const RpConfig& config, const ScanOptions& options) {
  ScanResult result;
  result.config = config;
  const auto seed = rp_seed(options.seed, config.name);
  ScenarioOptions scenario{options.op_flags, options.universal_xss, seed};

  try {
    Environment env(config, scenario);
    Trace& trace = env.new_trace("login");
    Browser& victim = env.new_browser("victim", trace);
    env.login(victim, env.target(), env.victim());
    result.login_trace = trace;
  } catch (const ProtocolError& e) {
    throw ProtocolError(Errc::ScenarioSetupFailed, config.name + ": " + e.what());
  }

  for (auto id : applicable_playbooks(config.flow)) {
    ScenarioOptions per = scenario;
    per.seed = splitmix64(seed ^ fnv1a(id));
    result.outcomes.push_back(run_playbook(id, config, per));
  }

  auto findings = detect_signatures(result.login_trace);
  auto dynamic = dynamic_findings(result.outcomes);
  findings.insert(findings.end(), dynamic.begin(), dynamic.end());
  result.findings = dedup(std::move(findings));
  return result;
}

int FleetReport::total() const {
  int n = 0;
  for (const auto& [_, p] : population) n += p;
  return n;
}

int FleetReport::count(FlowType flow, std::string_view metric) const {
  for (const auto& r : rows) {
    if (r.flow == flow && r.metric == metric) return r.count;
  }
  return -1;
}

int percent(int count, int population) {
  if (population <= 0) return 0;
  return (200 * count + population) / (2 * population);
}

namespace {

bool has_finding(const ScanResult& r, VulnClass c, bool confirmed_only, std::string_view detail_part = {}) {
  for (const auto& f : r.findings) {
    if (f.vuln != c || (confirmed_only && !f.confirmed())) continue;
    if (detail_part.empty()) return true;
    std::stringstream ss(f.detail);
    for (std::string s; std::getline(ss, s, ',');) {
      if (s == detail_part) return true;
    }
  }
  return false;
}

}  // namespace

FleetReport aggregate_fleet(const std::vector<ScanResult>& results) {
  FleetReport report;
  for (const auto flow : {FlowType::AuthorizationCode, FlowType::Hybrid, FlowType::ClientSide}) {
    std::vector<const ScanResult*> members;
    for (const auto& r : results) {
      if (r.config.flow == flow) members.push_back(&r);
    }
    report.population[flow] = static_cast<int>(members.size());
    auto row = [&](std::string metric, auto pred) {
      int n = 0;
      for (const auto* m : members) n += pred(*m) ? 1 : 0;
      report.rows.push_back({flow, std::move(metric), n, static_cast<int>(members.size())});
    };
    for (const auto c : all_vuln_classes()) {
      row(std::string(to_string(c)), [c](const ScanResult& r) { return has_finding(r, c, true); });
    }
    row("google-id-submitted", [](const ScanResult& r) { return has_finding(r, VulnClass::GoogleIdAuth, false); });
    row("token-submitting", [](const ScanResult& r) { return has_finding(r, VulnClass::UnverifiedTokenAuth, false); });
    row("token-sniffable/signin-submission", [](const ScanResult& r) {
      return has_finding(r, VulnClass::TokenSniffable, true, sniff_source::kSignInSubmission);
    });
    row("token-sniffable/cookie", [](const ScanResult& r) {
      return has_finding(r, VulnClass::TokenSniffable, true, sniff_source::kCookie);
    });
    row("session-swap/code-submitting",
        [](const ScanResult& r) { return has_finding(r, VulnClass::SessionSwap, true, "code"); });
    row("session-swap/token-or-id-submitting",
        [](const ScanResult& r) { return has_finding(r, VulnClass::SessionSwap, true, "token"); });
  }
  return report;
}

std::string format_fleet_report(const FleetReport& report) {
  std::ostringstream out;
  out << "Fleet: " << report.total() << " RPs";
  std::string sep = " (";
  for (const auto& [flow, n] : report.population) {
    out << sep << n << " " << to_string(flow) << ", " << percent(n, report.total()) << "%";
    sep = "; ";
  }
  out << ")\n";
  std::optional<FlowType> current;
  for (const auto& r : report.rows) {
    if (r.population == 0) continue;
    if (current != r.flow) {
      out << "\n" << to_string(r.flow) << " (" << r.population << " RPs)\n";
      current = r.flow;
    }
    out << "  " << std::left << std::setw(38) << r.metric << r.count << " out of " << r.population << ", "
        << percent(r.count, r.population) << "%\n";
  }
  return out.str();
}

nlohmann::ordered_json fleet_report_json(const FleetReport& report) {
  nlohmann::ordered_json j;
  j["total"] = report.total();
  auto& pop = j["population"] = nlohmann::ordered_json::object();
  for (const auto& [flow, n] : report.population) pop[std::string(to_string(flow))] = n;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"flow", to_string(r.flow)},
                    {"metric", r.metric},
                    {"count", r.count},
                    {"population", r.population},
                    {"percent", percent(r.count, r.population)}});
  }
  return j;
}

nlohmann::ordered_json finding_json(const Finding& f) {
  return {{"rp", f.rp},
          {"class", to_string(f.vuln)},
          {"severity", to_string(f.severity)},
          {"source", to_string(f.source)},
          {"detail", f.detail},
          {"evidence", f.evidence}};
}

std::string format_findings_table(const std::vector<ScanResult>& results) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "RP" << std::setw(19) << "FLOW" << std::setw(25) << "CLASS" << std::setw(11)
      << "SEVERITY" << std::setw(18) << "SOURCE"
      << "DETAIL\n";
  for (const auto& r : results) {
    for (const auto& f : r.findings) {
      out << std::setw(14) << f.rp << std::setw(19) << to_string(r.config.flow) << std::setw(25) << to_string(f.vuln)
          << std::setw(11) << to_string(f.severity) << std::setw(18) << to_string(f.source) << f.detail << "\n";
    }
  }
  return out.str();
}

std::string format_findings_records(const std::vector<ScanResult>& results) {
  std::string out;
  for (const auto& r : results) {
    for (const auto& f : r.findings) {
      auto j = finding_json(f);
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace oidcsim
