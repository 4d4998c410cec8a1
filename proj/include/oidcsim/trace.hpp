#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "oidcsim/http.hpp"

namespace oidcsim {

/// One HTTP exchange relayed by a browser, as a passive observer on the
/// wire or an intercepting proxy would capture it.
struct BrowserRelayedMessage {
  std::int64_t seq = 0;
  std::string from;  // browser label
  std::string to;    // destination origin
  std::string method;
  std::string url;   // never carries a fragment
  Params headers;
  Params body;
  CookieMap cookies;
  ChannelSecurity channel = ChannelSecurity::Https;
  int status = 0;
  std::string response_kind;
  std::string location;
  Params response_fields;
  CookieMap set_cookies;

  friend bool operator==(const BrowserRelayedMessage&, const BrowserRelayedMessage&) = default;
};

struct TraceMeta {
  std::string rp;
  std::string flow;
  std::uint64_t seed = 0;
  std::string label;

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<BrowserRelayedMessage> messages;
  std::vector<std::string> notes;  // dropped postMessages and similar client-side events

  std::int64_t next_seq() const { return messages.empty() ? 1 : messages.back().seq + 1; }
  void append(BrowserRelayedMessage m);
  void append_all(const Trace& other);

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Line-delimited records: a "meta" line, one "brm" line per message with a
/// fixed field order, then "note" lines.
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);
/// Throws MalformedTrace.
Trace read_trace(std::istream& in);

}  // namespace oidcsim
