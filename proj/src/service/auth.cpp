#include "procplan/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <ctime>
#include <stdexcept>
#include <vector>

namespace procplan {

namespace {

std::string to_hex(const unsigned char* data, std::size_t size) {
  static const char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xf]);
  }
  return out;
}

std::optional<std::vector<unsigned char>> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<unsigned char>(hi * 16 + lo));
  }
  return out;
}

constexpr std::size_t kKeyBytes = 32;

std::vector<unsigned char> derive(std::string_view password, const std::vector<unsigned char>& salt,
                                  int iterations) {
  std::vector<unsigned char> key(kKeyBytes);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), iterations, EVP_sha256(),
                        static_cast<int>(key.size()), key.data()) != 1) {
    throw std::runtime_error("PBKDF2 failed");
  }
  return key;
}

}  // namespace

std::string random_hex(std::size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
    throw std::runtime_error("random generator failure");
  }
  return to_hex(buf.data(), buf.size());
}

PasswordRecord hash_password(std::string_view password, int iterations) {
  std::string salt_hex = random_hex(16);
  auto salt = *from_hex(salt_hex);
  auto key = derive(password, salt, iterations);
  return {salt_hex, to_hex(key.data(), key.size()), iterations};
}

bool verify_password(std::string_view password, const PasswordRecord& record) {
  auto salt = from_hex(record.salt);
  auto expected = from_hex(record.hash);
  if (!salt || !expected || expected->size() != kKeyBytes || record.iterations < 1) return false;
  auto key = derive(password, *salt, record.iterations);
  return CRYPTO_memcmp(key.data(), expected->data(), kKeyBytes) == 0;
}

std::string format_timestamp(TimePoint t) {
  std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Session SessionManager::create(const std::string& username) {
  Session session{random_hex(32), username, clock_() + ttl_};
  std::lock_guard lock(mutex_);
  // Drop expired sessions so the table does not grow without bound.
  TimePoint now = clock_();
  std::erase_if(sessions_, [&](const auto& kv) { return kv.second.expiry <= now; });
  sessions_[session.token] = session;
  return session;
}

std::optional<std::string> SessionManager::authenticate(std::string_view token) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(std::string(token));
  if (it == sessions_.end()) return std::nullopt;
  if (it->second.expiry <= clock_()) {
    sessions_.erase(it);
    return std::nullopt;
  }
  return it->second.username;
}

bool SessionManager::is_live(std::string_view token) { return authenticate(token).has_value(); }

}  // namespace procplan
