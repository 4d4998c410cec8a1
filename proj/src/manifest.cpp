#include "oidcsim/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "oidcsim/error.hpp"
#include "oidcsim/scenario.hpp"

namespace oidcsim {
namespace {

using json = nlohmann::json;

struct Context {
  std::string_view text;
  std::string source;

  std::string line_of(std::size_t offset) const {
    std::size_t line = 1;
    std::size_t start = 0;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        start = i + 1;
      }
    }
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    return source + ":" + std::to_string(line) + ": " + std::string(text.substr(start, end - start));
  }

  // Best-effort location for a schema error: the first line quoting `needle`.
  [[noreturn]] void fail(const std::string& path, const std::string& why, const std::string& needle = {}) const {
    std::string msg = path + ": " + why;
    if (!needle.empty()) {
      if (auto pos = text.find("\"" + needle + "\""); pos != std::string_view::npos) msg += "\n  at " + line_of(pos);
    }
    throw ProtocolError(Errc::InvalidManifest, msg);
  }
};

void only_keys(const Context& ctx, const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) ctx.fail(path, "expected an object");
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.contains(k)) ctx.fail(path + "." + k, "unknown field", k);
  }
}

bool get_bool(const Context& ctx, const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) ctx.fail(path + "." + key, "expected a boolean", key);
  return obj[key].get<bool>();
}

std::string get_string(const Context& ctx, const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) ctx.fail(path + "." + key, "required field missing");
  if (!obj[key].is_string()) ctx.fail(path + "." + key, "expected a string", key);
  return obj[key].get<std::string>();
}

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 63) return false;
  for (char c : name) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
  }
  return true;
}

RpConfig parse_rp(const Context& ctx, const json& obj, const std::string& path) {
  only_keys(ctx, obj, path, {"name", "flow", "flags", "client_secret", "note"});
  const auto name = get_string(ctx, obj, path, "name");
  if (!valid_name(name)) ctx.fail(path + ".name", "must match [a-z0-9-]{1,63}", name);
  if (name == kMaliciousRpName) ctx.fail(path + ".name", "'" + name + "' is reserved for the attacker RP", name);
  const auto flow_text = get_string(ctx, obj, path, "flow");
  const auto flow = parse_flow_type(flow_text);
  if (!flow) ctx.fail(path + ".flow", "unknown flow '" + flow_text + "'", name);

  RpFlags flags;
  if (obj.contains("flags")) {
    const auto& arr = obj["flags"];
    if (!arr.is_array()) ctx.fail(path + ".flags", "expected an array", name);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto fpath = path + ".flags[" + std::to_string(i) + "]";
      if (!arr[i].is_string()) ctx.fail(fpath, "expected a string", name);
      const auto flag = parse_rp_flag(arr[i].get<std::string>());
      if (!flag) ctx.fail(fpath, "unknown flag '" + arr[i].get<std::string>() + "'", arr[i].get<std::string>());
      flags.insert(*flag);
    }
  }
  if (obj.contains("note") && !obj["note"].is_string()) ctx.fail(path + ".note", "expected a string", name);
  std::string secret = "secret-" + name;
  if (obj.contains("client_secret")) secret = get_string(ctx, obj, path, "client_secret");

  auto config = RpConfig::make(name, *flow, std::move(flags), std::move(secret));
  try {
    config.validate();
  } catch (const ProtocolError& e) {
    ctx.fail(path + ".flags", e.what(), name);
  }
  return config;
}

}  // namespace

FleetManifest parse_manifest(std::string_view text, const std::string& source) {
  Context ctx{text, source};
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto at = e.byte == 0 ? 0 : e.byte - 1;
    throw ProtocolError(Errc::InvalidManifest, "malformed JSON: " + std::string(e.what()) + "\n  at " + ctx.line_of(at));
  }
  only_keys(ctx, root, "$", {"seed", "op", "browser", "assumptions", "rps", "description"});

  FleetManifest m;
  if (!root.contains("seed")) ctx.fail("$.seed", "required field missing (scans must be reproducible)");
  if (!root["seed"].is_number_unsigned()) ctx.fail("$.seed", "expected a non-negative integer", "seed");
  m.seed = root["seed"].get<std::uint64_t>();

  if (root.contains("op")) {
    const auto& op = root["op"];
    only_keys(ctx, op, "$.op", {"null_state_bug", "accept_mutated_response_type"});
    m.op_flags.null_state_bug = get_bool(ctx, op, "$.op", "null_state_bug", m.op_flags.null_state_bug);
    m.op_flags.accept_mutated_response_type =
        get_bool(ctx, op, "$.op", "accept_mutated_response_type", m.op_flags.accept_mutated_response_type);
  }
  if (root.contains("browser")) {
    only_keys(ctx, root["browser"], "$.browser", {"universal_xss"});
    m.browser.universal_xss = get_bool(ctx, root["browser"], "$.browser", "universal_xss", false);
  }
  if (root.contains("assumptions")) {
    const auto& a = root["assumptions"];
    if (!a.is_array()) ctx.fail("$.assumptions", "expected an array", "assumptions");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string()) ctx.fail("$.assumptions[" + std::to_string(i) + "]", "expected a string", "assumptions");
      m.assumptions.push_back(a[i].get<std::string>());
    }
  }
  if (root.contains("description") && !root["description"].is_string()) {
    ctx.fail("$.description", "expected a string", "description");
  }

  if (!root.contains("rps")) ctx.fail("$.rps", "required field missing");
  const auto& rps = root["rps"];
  if (!rps.is_array()) ctx.fail("$.rps", "expected an array", "rps");
  std::set<std::string> names;
  for (std::size_t i = 0; i < rps.size(); ++i) {
    const auto path = "$.rps[" + std::to_string(i) + "]";
    auto rp = parse_rp(ctx, rps[i], path);
    if (!names.insert(rp.name).second) ctx.fail(path + ".name", "duplicate RP name '" + rp.name + "'", rp.name);
    m.rps.push_back(std::move(rp));
  }
  return m;
}

FleetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError(Errc::InvalidManifest, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.string());
}

}  // namespace oidcsim
