#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oidcsim/http.hpp"
#include "oidcsim/provider.hpp"
#include "oidcsim/relying_party.hpp"
#include "oidcsim/rng.hpp"
#include "oidcsim/trace.hpp"

namespace oidcsim {

inline constexpr int kMaxRedirects = 10;

struct Page {
  Url url;  // may carry a fragment
  HttpResponse response;
};

/// Attacker-hosted HTML whose embedded request fires on load.
struct AttackPage {
  enum class Kind { IMG_SRC, IFRAME_SRC, AUTO_POST_FORM };
  Kind kind = Kind::IMG_SRC;
  Url target;
  Params fields;  // query for *_SRC, form body for AUTO_POST_FORM

  bool empty() const { return target.host.empty(); }
};

/// Script injected through the universal-XSS bug: open the mutated
/// authorization URL and read the landing window's fragment.
struct ExploitScript {
  Url authorization_url;
};

struct ExfiltratedData {
  Url landing_url;
  Params fragment;
  std::optional<std::string> access_token() const { return find_param(fragment, "access_token"); }
};

class Browser {
 public:
  Browser(std::string label, Network& network, LogicalClock& clock, Trace& trace, bool universal_xss = false)
      : label_(std::move(label)), network_(network), clock_(clock), trace_(trace), universal_xss_(universal_xss) {}

  const std::string& label() const { return label_; }
  bool universal_xss() const { return universal_xss_; }
  void set_universal_xss(bool on) { universal_xss_ = on; }
  Trace& trace() { return trace_; }

  /// One exchange, no redirect following. Cookies for the destination host
  /// are attached and Set-Cookie is stored.
  HttpResponse send(HttpRequest request);

  /// GET `url`, following 302s up to kMaxRedirects hops (RedirectLoop beyond).
  Page navigate(const Url& url);
  Page submit_form(const Url& action, const std::string& method, const Params& fields);
  Page follow(const Url& origin_url, HttpResponse response);

  /// Executes an OP postMessage document. The RP client listening at
  /// `listener_origin` receives it only if the origins match; the client
  /// script's submission is then relayed to the sign-in endpoint.
  SignInSubmission run_postmessage_delivery(const HtmlDocument& html, const std::string& listener_origin,
                                            const RpConfig& rp_client,
                                            const std::optional<std::string>& client_state);
  const std::optional<Page>& last_page() const { return last_page_; }

  std::vector<Page> load_attack_page(const AttackPage& page);

  ExfiltratedData xss_execute(const std::string& target_origin, const ExploitScript& script);

  std::optional<std::string> cookie(const std::string& host, const std::string& name) const;
  void set_cookie(const std::string& host, const std::string& name, const std::string& value);
  void clear_cookies(const std::string& host) { jars_.erase(host); }
  const std::map<std::string, CookieMap>& jars() const { return jars_; }

 private:
  std::string label_;
  Network& network_;
  LogicalClock& clock_;
  Trace& trace_;
  bool universal_xss_;
  std::map<std::string, CookieMap> jars_;
  std::optional<Page> last_page_;
};

}  // namespace oidcsim
