#include "oidcsim/attacks.hpp"

#include <algorithm>

#include "oidcsim/error.hpp"

namespace oidcsim {
namespace {

AttackOutcome begin(Environment& env, std::string_view id) {
  AttackOutcome out;
  out.playbook = std::string(id);
  out.rp = env.target().config().name;
  return out;
}

void refs_since(AttackOutcome& out, const Trace& trace, std::int64_t first_seq) {
  for (const auto& m : trace.messages) {
    if (m.seq >= first_seq) out.trace_refs.push_back(m.seq);
  }
}

AttackOutcome finish(AttackOutcome out, const Trace& trace) {
  out.trace = trace;
  return out;
}

std::optional<UserInfo> userinfo_for(Environment& env, const std::string& token) {
  try {
    return env.op().handle_userinfo(token);
  } catch (const ProtocolError&) {
    return std::nullopt;
  }
}

void note_params(SniffReport& r, const Params& params, std::int64_t seq, std::string_view token_source) {
  for (const auto& [k, v] : params) {
    bool hit = true;
    if (k == "access_token") {
      r.access_tokens.push_back({v, std::string(token_source), seq});
    } else if (k == "id_token") {
      r.id_tokens.push_back({v, std::string(token_source), seq});
      try {
        const auto claims = decode_id_token_claims(v);
        r.subjects.insert(claims.subject);
        r.emails.insert(claims.email);
      } catch (const ProtocolError&) {
      }
    } else if (k == "google_id") {
      r.google_ids.insert(v);
    } else if (k == "email") {
      r.emails.insert(v);
    } else if (k == "sub") {
      r.subjects.insert(v);
    } else if (k == "name") {
      r.names.insert(v);
    } else {
      hit = false;
    }
    if (hit) r.seqs.insert(seq);
  }
}

void note_cookies(SniffReport& r, const CookieMap& cookies, std::int64_t seq) {
  if (auto it = cookies.find(std::string(kRpTokenCookie)); it != cookies.end()) {
    r.access_tokens.push_back({it->second, std::string(sniff_source::kCookie), seq});
    r.seqs.insert(seq);
  }
}

}  // namespace

const std::vector<std::string_view>& all_playbooks() {
  static const std::vector<std::string_view> ids{
      playbook::kGoogleId,    playbook::kCrossRpToken,  playbook::kTokenSniff, playbook::kPrivacySniff,
      playbook::kSessionSwap, playbook::kXssTokenTheft, playbook::kForcedLogin,
  };
  return ids;
}

bool is_playbook(std::string_view id) {
  const auto& ids = all_playbooks();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<std::string_view> applicable_playbooks(FlowType flow) {
  if (flow == FlowType::AuthorizationCode) {
    return {playbook::kTokenSniff, playbook::kPrivacySniff, playbook::kSessionSwap, playbook::kForcedLogin,
            playbook::kXssTokenTheft};
  }
  return {playbook::kGoogleId, playbook::kCrossRpToken, playbook::kTokenSniff, playbook::kPrivacySniff,
          playbook::kSessionSwap};
}

std::set<std::string> SniffReport::token_sources() const {
  std::set<std::string> out;
  for (const auto& t : access_tokens) out.insert(t.source);
  return out;
}

SniffReport sniff_token_or_info(const Trace& trace) {
  SniffReport r;
  for (const auto& m : trace.messages) {
    if (m.channel != ChannelSecurity::Http) continue;
    Params request_params;
    try {
      request_params = Url::parse(m.url).query;
    } catch (const ProtocolError&) {
    }
    request_params.insert(request_params.end(), m.body.begin(), m.body.end());
    note_params(r, request_params, m.seq, sniff_source::kSignInSubmission);
    note_cookies(r, m.cookies, m.seq);
    note_cookies(r, m.set_cookies, m.seq);
    note_params(r, m.response_fields, m.seq, sniff_source::kResponseBody);
  }
  return r;
}

AttackOutcome impersonate_via_google_id(Environment& env) {
  auto out = begin(env, playbook::kGoogleId);
  Trace& trace = env.new_trace(out.playbook);
  const auto& cfg = env.target().config();
  if (cfg.flow == FlowType::AuthorizationCode) {
    out.preconditions_met = false;
    out.evidence.push_back("no RP client submission to forge in the code flow");
    return finish(std::move(out), trace);
  }
  Browser& attacker = env.new_browser("attacker", trace);
  try {
    // The attacker signs in with their own account and swaps in the victim's identifier.
    auto pending = env.drive_to_delivery(attacker, env.target(), env.attacker());
    auto html = pending.html();
    if (!html) throw ProtocolError(Errc::ScenarioSetupFailed, "no postMessage delivery");
    auto forged = rp_client_script(cfg, html->response, pending.client_state);
    forged.google_id = env.victim().numeric_id;
    const auto first = trace.next_seq();
    auto request = forged.to_request(cfg);
    attacker.follow(request.url, attacker.send(request));
    refs_since(out, trace, first);
  } catch (const ProtocolError& e) {
    out.evidence.push_back(e.what());
    return finish(std::move(out), trace);
  }
  const auto who = env.session_user(attacker, env.target());
  out.success = who == env.victim().numeric_id;
  out.evidence.push_back("attacker session at " + cfg.name + " belongs to " + who.value_or("nobody"));
  return finish(std::move(out), trace);
}

AttackOutcome impersonate_via_cross_rp_token(Environment& env) {
  auto out = begin(env, playbook::kCrossRpToken);
  Trace& trace = env.new_trace(out.playbook);
  const auto& cfg = env.target().config();
  if (cfg.flow == FlowType::AuthorizationCode) {
    out.preconditions_met = false;
    out.evidence.push_back("code-flow RPs accept no tokens from the browser");
    return finish(std::move(out), trace);
  }
  Browser& victim = env.new_browser("victim", trace);
  Browser& attacker = env.new_browser("attacker", trace);

  const auto login = env.login(victim, env.malicious(), env.victim());
  std::optional<std::string> harvested;
  if (login.success && login.rp_session) {
    harvested = env.malicious().sessions().at(*login.rp_session).access_token;
  }
  if (!harvested) {
    out.preconditions_met = false;
    out.evidence.push_back("victim never signed in to the malicious RP");
    return finish(std::move(out), trace);
  }
  out.evidence.push_back("token audienced to " + std::string(kMaliciousRpName) + ": " + *harvested);

  try {
    const auto page = attacker.navigate(cfg.login_url());
    SignInSubmission s = rp_client_script(cfg, AuthorizationResponse{}, page.response.field("client_state"));
    s.access_token = harvested;
    if (cfg.has(RpFlag::REQUIRES_EMAIL_WITH_TOKEN)) {
      if (auto info = userinfo_for(env, *harvested)) s.email = info->email;
    }
    const auto first = trace.next_seq();
    auto request = s.to_request(cfg);
    attacker.follow(request.url, attacker.send(request));
    refs_since(out, trace, first);
  } catch (const ProtocolError& e) {
    out.evidence.push_back(e.what());
    return finish(std::move(out), trace);
  }
  const auto who = env.session_user(attacker, env.target());
  out.success = who == env.victim().numeric_id;
  out.evidence.push_back("attacker session at " + cfg.name + " belongs to " + who.value_or("nobody"));
  return finish(std::move(out), trace);
}

namespace {

// The passive attacker only watches; the victim's ordinary login produces the traffic.
struct Observed {
  SniffReport report;
  bool login_ok = false;
};

Observed observe_victim_login(Environment& env, Trace& trace) {
  Browser& victim = env.new_browser("victim", trace);
  Observed o;
  o.login_ok = env.login(victim, env.target(), env.victim()).success;
  o.report = sniff_token_or_info(trace);
  return o;
}

}  // namespace

AttackOutcome token_sniff(Environment& env) {
  auto out = begin(env, playbook::kTokenSniff);
  Trace& trace = env.new_trace(out.playbook);
  const auto observed = observe_victim_login(env, trace);
  out.preconditions_met = observed.login_ok;

  std::set<std::string> live_sources;
  for (const auto& t : observed.report.access_tokens) {
    const auto info = userinfo_for(env, t.value);
    if (!info || info->numeric_id != env.victim().numeric_id) continue;
    live_sources.insert(t.source);
    out.trace_refs.push_back(t.seq);
    out.evidence.push_back("live access_token via " + t.source + " at seq " + std::to_string(t.seq));
  }
  out.success = !live_sources.empty();
  for (const auto& s : live_sources) out.detail += (out.detail.empty() ? "" : ",") + s;
  std::sort(out.trace_refs.begin(), out.trace_refs.end());
  out.trace_refs.erase(std::unique(out.trace_refs.begin(), out.trace_refs.end()), out.trace_refs.end());
  return finish(std::move(out), trace);
}

AttackOutcome privacy_sniff(Environment& env) {
  auto out = begin(env, playbook::kPrivacySniff);
  Trace& trace = env.new_trace(out.playbook);
  auto observed = observe_victim_login(env, trace);
  out.preconditions_met = observed.login_ok;
  auto& r = observed.report;

  // A sniffed bearer token is as good as the profile it unlocks.
  for (const auto& t : r.access_tokens) {
    if (auto info = userinfo_for(env, t.value)) {
      r.subjects.insert(info->numeric_id);
      r.emails.insert(info->email);
      r.names.insert(info->display_name);
    }
  }
  for (const auto& id : r.google_ids) out.evidence.push_back("google_id " + id);
  for (const auto& s : r.subjects) out.evidence.push_back("sub " + s);
  for (const auto& e : r.emails) out.evidence.push_back("email " + e);
  for (const auto& n : r.names) out.evidence.push_back("name " + n);
  out.trace_refs.assign(r.seqs.begin(), r.seqs.end());
  const auto& v = env.victim();
  out.success = r.google_ids.contains(v.numeric_id) || r.subjects.contains(v.numeric_id) ||
                r.emails.contains(v.email) || r.names.contains(v.display_name);
  return finish(std::move(out), trace);
}

namespace {

struct Harvest {
  AttackPage page;
  bool carries_code = false;
};

// Attacker signs in as themselves but stops before the material reaches the RP.
Harvest harvest_own_material(Environment& env, Browser& attacker) {
  const auto& cfg = env.target().config();
  auto pending = env.drive_to_delivery(attacker, env.target(), env.attacker());
  Harvest h;
  if (cfg.flow == FlowType::AuthorizationCode) {
    if (pending.op_response.status != 302 || !pending.op_response.location) {
      throw ProtocolError(Errc::ScenarioSetupFailed, "no redirect delivery for the attacker");
    }
    Url target = *pending.op_response.location;
    h.page.kind = AttackPage::Kind::IMG_SRC;
    h.page.fields = target.query;
    target.query.clear();
    h.page.target = target;
    h.carries_code = find_param(h.page.fields, "code").has_value();
    return h;
  }
  auto html = pending.html();
  if (!html) throw ProtocolError(Errc::ScenarioSetupFailed, "no postMessage delivery for the attacker");
  const auto submission = rp_client_script(cfg, html->response, pending.client_state);
  h.page.kind = submission.http_method == "POST" ? AttackPage::Kind::AUTO_POST_FORM : AttackPage::Kind::IMG_SRC;
  h.page.target = submission.to_request(cfg).url;
  h.page.target.query.clear();
  h.page.fields = submission.to_params();
  h.carries_code = submission.code.has_value();
  return h;
}

bool stale_code(const std::vector<Page>& pages) {
  for (const auto& p : pages) {
    if (p.response.field("detail").value_or("").find(to_string(Errc::InvalidCode)) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

AttackOutcome session_swap(Environment& env) {
  auto out = begin(env, playbook::kSessionSwap);
  Trace& trace = env.new_trace(out.playbook);
  const auto& cfg = env.target().config();
  Browser& attacker = env.new_browser("attacker", trace);
  Browser& victim = env.new_browser("victim", trace);

  try {
    victim.navigate(cfg.login_url());
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto harvest = harvest_own_material(env, attacker);
      out.detail = harvest.carries_code ? "code" : "token";
      const auto first = trace.next_seq();
      const auto pages = victim.load_attack_page(harvest.page);
      refs_since(out, trace, first);
      if (!stale_code(pages)) break;
      out.evidence.push_back(std::string(to_string(Errc::StaleCode)) + ": re-minting attacker material");
    }
  } catch (const ProtocolError& e) {
    out.preconditions_met = e.code() != Errc::ScenarioSetupFailed;
    out.evidence.push_back(e.what());
    return finish(std::move(out), trace);
  }
  const auto who = env.session_user(victim, env.target());
  out.success = who == env.attacker().numeric_id;
  out.evidence.push_back("victim session at " + cfg.name + " belongs to " + who.value_or("nobody"));
  return finish(std::move(out), trace);
}

namespace {

// Puts the victim into the state the silent-flow attacks need: an OP session
// and, optionally, an earlier grant for the target.
void prepare_victim(Environment& env, Browser& victim, const PlaybookOptions& opts) {
  if (!opts.victim_op_session) return;
  env.login(victim, opts.victim_grant ? env.target() : env.malicious(), env.victim());
  victim.clear_cookies(env.target().config().host());
}

}  // namespace

AttackOutcome xss_steal_token(Environment& env, const PlaybookOptions& opts) {
  auto out = begin(env, playbook::kXssTokenTheft);
  Trace& trace = env.new_trace(out.playbook);
  const auto& cfg = env.target().config();
  if (cfg.flow != FlowType::AuthorizationCode) {
    out.preconditions_met = false;
    out.evidence.push_back("exploit targets the code flow's redirect delivery");
    return finish(std::move(out), trace);
  }
  Browser& attacker = env.new_browser("attacker", trace);
  Browser& victim = env.new_browser("victim", trace, env.options().universal_xss);
  prepare_victim(env, victim, opts);

  try {
    const auto login_page = attacker.navigate(cfg.login_url());
    Url mutated = Url::parse(login_page.response.field("authorize_url").value_or(""));
    for (auto& [k, v] : mutated.query) {
      if (k == "response_type") v = response_type_string({ResponseType::Code, ResponseType::Token, ResponseType::IdToken});
    }
    const auto first = trace.next_seq();
    const auto stolen = victim.xss_execute(cfg.origin(), ExploitScript{mutated});
    refs_since(out, trace, first);
    const auto token = *stolen.access_token();
    const auto info = userinfo_for(env, token);
    out.success = info && info->numeric_id == env.victim().numeric_id;
    out.evidence.push_back("fragment read from " + stolen.landing_url.without_fragment());
    out.evidence.push_back("access_token " + token + (out.success ? " is live for the victim" : " is not usable"));
  } catch (const ProtocolError& e) {
    out.evidence.push_back(e.what());
  }
  return finish(std::move(out), trace);
}

AttackOutcome forced_login_csrf(Environment& env, const PlaybookOptions& opts) {
  auto out = begin(env, playbook::kForcedLogin);
  Trace& trace = env.new_trace(out.playbook);
  const auto& cfg = env.target().config();
  if (cfg.flow != FlowType::AuthorizationCode) {
    out.preconditions_met = false;
    out.evidence.push_back("needs a redirect-delivered authorization response");
    return finish(std::move(out), trace);
  }
  Browser& attacker = env.new_browser("attacker", trace);
  Browser& victim = env.new_browser("victim", trace);
  prepare_victim(env, victim, opts);

  try {
    const auto login_page = attacker.navigate(cfg.login_url());
    AttackPage page;
    page.kind = AttackPage::Kind::IMG_SRC;
    page.target = Url::parse(login_page.response.field("authorize_url").value_or(""));
    const auto first = trace.next_seq();
    victim.load_attack_page(page);
    refs_since(out, trace, first);
  } catch (const ProtocolError& e) {
    out.evidence.push_back(e.what());
    return finish(std::move(out), trace);
  }
  const auto who = env.session_user(victim, env.target());
  out.success = who == env.victim().numeric_id;
  out.evidence.push_back("victim session at " + cfg.name + " belongs to " + who.value_or("nobody"));
  return finish(std::move(out), trace);
}

AttackOutcome run_playbook(std::string_view id, const RpConfig& target, const ScenarioOptions& options,
                           const PlaybookOptions& opts) {
  if (!is_playbook(id)) throw ProtocolError(Errc::UnknownPlaybook, std::string(id));
  Environment env(target, options);
  if (id == playbook::kGoogleId) return impersonate_via_google_id(env);
  if (id == playbook::kCrossRpToken) return impersonate_via_cross_rp_token(env);
  if (id == playbook::kTokenSniff) return token_sniff(env);
  if (id == playbook::kPrivacySniff) return privacy_sniff(env);
  if (id == playbook::kSessionSwap) return session_swap(env);
  if (id == playbook::kXssTokenTheft) return xss_steal_token(env, opts);
  return forced_login_csrf(env, opts);
}

}  // namespace oidcsim
