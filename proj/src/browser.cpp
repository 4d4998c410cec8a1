#include "oidcsim/browser.hpp"

#include "oidcsim/error.hpp"

namespace oidcsim {

HttpResponse Browser::send(HttpRequest request) {
  request.url.fragment.reset();
  if (auto jar = jars_.find(request.url.host); jar != jars_.end()) request.cookies = jar->second;
  clock_.tick();
  auto response = network_.dispatch(request);
  for (const auto& [k, v] : response.set_cookies) jars_[request.url.host][k] = v;

  BrowserRelayedMessage m;
  m.from = label_;
  m.to = request.url.origin();
  m.method = request.method;
  m.url = request.url.without_fragment();
  if (request.method == "POST") m.headers = {{"Content-Type", "application/x-www-form-urlencoded"}};
  m.body = request.form;
  m.cookies = request.cookies;
  m.channel = request.channel();
  m.status = response.status;
  m.response_kind = response.kind;
  if (response.location) m.location = response.location->without_fragment();
  m.response_fields = response.fields;
  m.set_cookies = response.set_cookies;
  trace_.append(std::move(m));
  return response;
}

Page Browser::follow(const Url& origin_url, HttpResponse response) {
  Url current = origin_url;
  int hops = 0;
  while (response.status == 302 && response.location) {
    if (++hops > kMaxRedirects) throw ProtocolError(Errc::RedirectLoop, current.str());
    Url next = *response.location;
    HttpRequest req;
    req.url = next;
    response = send(req);
    current = next;  // fragment is kept on the window URL only
  }
  last_page_ = Page{current, response};
  return *last_page_;
}

Page Browser::navigate(const Url& url) {
  HttpRequest req;
  req.url = url;
  return follow(url, send(req));
}

Page Browser::submit_form(const Url& action, const std::string& method, const Params& fields) {
  HttpRequest req;
  req.method = method;
  req.url = action;
  if (method == "POST") {
    req.form = fields;
  } else {
    for (const auto& p : fields) req.url.query.push_back(p);
  }
  return follow(action, send(req));
}

SignInSubmission Browser::run_postmessage_delivery(const HtmlDocument& html, const std::string& listener_origin,
                                                   const RpConfig& rp_client,
                                                   const std::optional<std::string>& client_state) {
  if (html.target_origin != listener_origin) {
    trace_.notes.push_back("postMessage dropped: target " + html.target_origin + " != listener " + listener_origin);
    throw ProtocolError(Errc::OriginMismatch, html.target_origin + " != " + listener_origin);
  }
  auto submission = rp_client_script(rp_client, html.response, client_state);
  auto request = submission.to_request(rp_client);
  follow(request.url, send(request));
  return submission;
}

std::vector<Page> Browser::load_attack_page(const AttackPage& page) {
  std::vector<Page> loaded;
  if (page.empty()) return loaded;
  switch (page.kind) {
    case AttackPage::Kind::IMG_SRC:
    case AttackPage::Kind::IFRAME_SRC: {
      Url url = page.target;
      for (const auto& p : page.fields) url.query.push_back(p);
      loaded.push_back(navigate(url));
      break;
    }
    case AttackPage::Kind::AUTO_POST_FORM:
      loaded.push_back(submit_form(page.target, "POST", page.fields));
      break;
  }
  return loaded;
}

ExfiltratedData Browser::xss_execute(const std::string& target_origin, const ExploitScript& script) {
  if (!universal_xss_) throw ProtocolError(Errc::XssBlocked, target_origin);
  // window.open(mutated request); the opened window ends on the RP's error
  // page whose URL still holds the fragment.
  const auto page = navigate(script.authorization_url);
  if (!page.url.fragment || page.url.host != Url::parse(target_origin).host) {
    throw ProtocolError(Errc::NoAutoGrant, "no authorization response reached " + target_origin);
  }
  ExfiltratedData out{page.url, parse_params(*page.url.fragment)};
  if (!out.access_token()) throw ProtocolError(Errc::NoAutoGrant, "fragment without access_token");
  return out;
}

std::optional<std::string> Browser::cookie(const std::string& host, const std::string& name) const {
  auto jar = jars_.find(host);
  if (jar == jars_.end()) return std::nullopt;
  auto it = jar->second.find(name);
  if (it == jar->second.end()) return std::nullopt;
  return it->second;
}

void Browser::set_cookie(const std::string& host, const std::string& name, const std::string& value) {
  jars_[host][name] = value;
}

}  // namespace oidcsim
