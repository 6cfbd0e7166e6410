#pragma once

// File-backed persistence for the document service.
//
// Layout of the data directory:
//   users.json                    username -> salted password hash
//   docs/<id>.proc                canonical text
//   docs/<id>.json                owner, revision, updated_at, text hash
//   drafts/<user>/<id>.proc       draft text, stored verbatim
//   drafts/<user>/<id>.json       draft updated_at and base revision
//
// Every file is replaced atomically (temporary file, fsync, rename). A
// document's text is written before its metadata; when a crash lands between
// the two, the text hash in the metadata no longer matches and loading
// reports revision + 1, so a document is always at revision n or n + 1.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procplan/expected.hpp"

namespace procplan {

struct DocumentMeta {
  std::string owner;
  std::uint64_t revision = 0;
  std::string updated_at;  // ISO 8601, UTC
};

struct StoredDocument {
  std::string id;
  DocumentMeta meta;
  std::string text;
};

struct StoredDraft {
  std::string text;
  std::string updated_at;
  std::uint64_t base_revision = 0;
};

struct PasswordRecord {
  std::string salt;  // hex
  std::string hash;  // hex
  int iterations = 0;
  friend bool operator==(const PasswordRecord&, const PasswordRecord&) = default;
};

// Writes `content` to `path` atomically. Throws std::system_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// 64-bit FNV-1a, hex encoded.
std::string text_hash(std::string_view text);

// Ids and usernames are restricted to [A-Za-z0-9_.-] (no leading dot) so
// they are always safe as file names.
bool is_safe_name(std::string_view name);

class FileStore {
 public:
  // Creates the directory layout if needed and checks it is writable.
  static Expected<FileStore, std::string> open(const std::filesystem::path& dir);

  const std::filesystem::path& root() const { return root_; }

  // All persisted I/O below throws std::system_error or
  // nlohmann::json::exception on failure.
  std::vector<StoredDocument> load_documents() const;
  void save_document(const StoredDocument& doc) const;

  std::map<std::string, PasswordRecord> load_users() const;
  void save_users(const std::map<std::string, PasswordRecord>& users) const;

  std::optional<StoredDraft> load_draft(std::string_view user, std::string_view id) const;
  void save_draft(std::string_view user, std::string_view id, const StoredDraft& draft) const;
  // False if there was no draft.
  bool delete_draft(std::string_view user, std::string_view id) const;

 private:
  explicit FileStore(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path root_;
};

}  // namespace procplan
