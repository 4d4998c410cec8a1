#include "oidcsim/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "oidcsim/error.hpp"

namespace oidcsim {
namespace {

using ojson = nlohmann::ordered_json;

ojson params_json(const Params& p) {
  ojson a = ojson::array();
  for (const auto& [k, v] : p) a.push_back(ojson::array({k, v}));
  return a;
}

Params params_from(const ojson& j) {
  Params p;
  for (const auto& kv : j) p.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
  return p;
}

ojson cookies_json(const CookieMap& c) {
  ojson o = ojson::object();
  for (const auto& [k, v] : c) o[k] = v;
  return o;
}

CookieMap cookies_from(const ojson& j) {
  CookieMap c;
  for (auto it = j.begin(); it != j.end(); ++it) c[it.key()] = it.value().get<std::string>();
  return c;
}

}  // namespace

void Trace::append(BrowserRelayedMessage m) {
  m.seq = next_seq();
  messages.push_back(std::move(m));
}

void Trace::append_all(const Trace& other) {
  for (const auto& m : other.messages) append(m);
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

void write_trace(std::ostream& out, const Trace& trace) {
  ojson meta;
  meta["type"] = "meta";
  meta["rp"] = trace.meta.rp;
  meta["flow"] = trace.meta.flow;
  meta["seed"] = trace.meta.seed;
  meta["label"] = trace.meta.label;
  out << meta.dump() << '\n';
  for (const auto& m : trace.messages) {
    ojson j;
    j["type"] = "brm";
    j["seq"] = m.seq;
    j["from"] = m.from;
    j["to"] = m.to;
    j["method"] = m.method;
    j["url"] = m.url;
    j["headers"] = params_json(m.headers);
    j["body"] = params_json(m.body);
    j["cookies"] = cookies_json(m.cookies);
    j["channel"] = std::string(to_string(m.channel));
    j["status"] = m.status;
    j["response_kind"] = m.response_kind;
    j["location"] = m.location;
    j["response_fields"] = params_json(m.response_fields);
    j["set_cookies"] = cookies_json(m.set_cookies);
    out << j.dump() << '\n';
  }
  for (const auto& n : trace.notes) {
    ojson j;
    j["type"] = "note";
    j["text"] = n;
    out << j.dump() << '\n';
  }
}

std::string trace_to_string(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  int line_no = 0;
  bool saw_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = ojson::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "meta") {
        trace.meta = {j.at("rp").get<std::string>(), j.at("flow").get<std::string>(),
                      j.at("seed").get<std::uint64_t>(), j.at("label").get<std::string>()};
        saw_meta = true;
      } else if (type == "brm") {
        BrowserRelayedMessage m;
        m.seq = j.at("seq").get<std::int64_t>();
        m.from = j.at("from").get<std::string>();
        m.to = j.at("to").get<std::string>();
        m.method = j.at("method").get<std::string>();
        m.url = j.at("url").get<std::string>();
        m.headers = params_from(j.at("headers"));
        m.body = params_from(j.at("body"));
        m.cookies = cookies_from(j.at("cookies"));
        const auto ch = j.at("channel").get<std::string>();
        if (ch != "http" && ch != "https") throw ProtocolError(Errc::MalformedTrace, "bad channel " + ch);
        m.channel = ch == "http" ? ChannelSecurity::Http : ChannelSecurity::Https;
        m.status = j.at("status").get<int>();
        m.response_kind = j.at("response_kind").get<std::string>();
        m.location = j.at("location").get<std::string>();
        m.response_fields = params_from(j.at("response_fields"));
        m.set_cookies = cookies_from(j.at("set_cookies"));
        if (!trace.messages.empty() && m.seq <= trace.messages.back().seq) {
          throw ProtocolError(Errc::MalformedTrace, "seq not strictly increasing");
        }
        trace.messages.push_back(std::move(m));
      } else if (type == "note") {
        trace.notes.push_back(j.at("text").get<std::string>());
      } else {
        throw ProtocolError(Errc::MalformedTrace, "unknown record type " + type);
      }
    } catch (const ProtocolError& e) {
      throw ProtocolError(Errc::MalformedTrace, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ProtocolError(Errc::MalformedTrace, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_meta && trace.messages.empty()) throw ProtocolError(Errc::MalformedTrace, "empty trace");
  return trace;
}

}  // namespace oidcsim
