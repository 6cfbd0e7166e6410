#pragma once

// Password hashing (PBKDF2-HMAC-SHA256) and in-memory bearer sessions.

#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "procplan/store.hpp"

namespace procplan {

using TimePoint = std::chrono::system_clock::time_point;
using Clock = std::function<TimePoint()>;

inline constexpr int kPasswordIterations = 60'000;

// Hex encoding of `bytes` bytes from the OpenSSL CSPRNG.
std::string random_hex(std::size_t bytes);

PasswordRecord hash_password(std::string_view password, int iterations = kPasswordIterations);
// Constant-time comparison of the derived key.
bool verify_password(std::string_view password, const PasswordRecord& record);

// ISO 8601 UTC with second precision, e.g. 2024-05-01T08:30:00Z.
std::string format_timestamp(TimePoint t);

struct Session {
  std::string token;  // 256 random bits, hex
  std::string username;
  TimePoint expiry;
};

class SessionManager {
 public:
  SessionManager(Clock clock, std::chrono::seconds ttl)
      : clock_(std::move(clock)), ttl_(ttl) {}

  Session create(const std::string& username);
  // Username for a live token. Expired tokens are dropped and rejected
  // exactly like unknown ones.
  std::optional<std::string> authenticate(std::string_view token);
  bool is_live(std::string_view token);

  TimePoint now() const { return clock_(); }

 private:
  Clock clock_;
  std::chrono::seconds ttl_;
  std::mutex mutex_;
  std::unordered_map<std::string, Session> sessions_;
};

}  // namespace procplan
