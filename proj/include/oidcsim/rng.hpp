#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace oidcsim {

/// Deterministic source of token material. All secrets in a scenario come
/// from one of these so that equal seeds reproduce equal traces.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// 128 random bits rendered as 22 URL-safe Base64 characters.
  std::string token();
  std::string token_with_prefix(std::string_view prefix) { return std::string(prefix) + token(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t fnv1a(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

/// Monotonic simulator time. Every relayed message advances it by one tick.
class LogicalClock {
 public:
  std::int64_t now() const { return now_; }
  std::int64_t tick() { return ++now_; }
  void advance(std::int64_t ticks) { now_ += ticks; }

 private:
  std::int64_t now_ = 0;
};

}  // namespace oidcsim
