#include "procplan/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace procplan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(ENOENT, std::generic_category(), "open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void fsync_directory(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

fs::path docs_dir(const fs::path& root) { return root / "docs"; }
fs::path drafts_dir(const fs::path& root, std::string_view user) {
  return root / "drafts" / std::string(user);
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("open " + tmp.string());
  const char* data = content.data();
  std::size_t left = content.size();
  while (left > 0) {
    ssize_t n = ::write(fd, data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      int saved = errno;
      ::close(fd);
      errno = saved;
      throw_errno("write " + tmp.string());
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    int saved = errno;
    ::close(fd);
    errno = saved;
    throw_errno("fsync " + tmp.string());
  }
  if (::close(fd) != 0) throw_errno("close " + tmp.string());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw_errno("rename " + path.string());
  fsync_directory(path.parent_path());
}

std::string text_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_safe_name(std::string_view name) {
  if (name.empty() || name.size() > 128 || name.front() == '.') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

Expected<FileStore, std::string> FileStore::open(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(docs_dir(dir), ec);
  if (!ec) fs::create_directories(dir / "drafts", ec);
  if (ec) return Unexpected{"cannot create data directory " + dir.string() + ": " + ec.message()};
  try {
    write_file_atomic(dir / ".probe", "");
    fs::remove(dir / ".probe");
  } catch (const std::system_error& e) {
    return Unexpected{"data directory " + dir.string() + " is not writable: " + e.what()};
  }
  return FileStore(fs::absolute(dir));
}

std::vector<StoredDocument> FileStore::load_documents() const {
  std::vector<StoredDocument> out;
  for (const auto& entry : fs::directory_iterator(docs_dir(root_))) {
    const fs::path& path = entry.path();
    if (path.extension() != ".json") continue;
    std::string id = path.stem().string();
    if (!is_safe_name(id)) continue;
    fs::path text_path = docs_dir(root_) / (id + ".proc");
    if (!fs::exists(text_path)) continue;

    json meta = json::parse(read_file(path));
    StoredDocument doc;
    doc.id = id;
    doc.meta.owner = meta.at("owner").get<std::string>();
    doc.meta.revision = meta.at("revision").get<std::uint64_t>();
    doc.meta.updated_at = meta.at("updated_at").get<std::string>();
    doc.text = read_file(text_path);
    if (meta.at("text_hash").get<std::string>() != text_hash(doc.text)) {
      // The text of the next revision reached disk but its metadata did not.
      ++doc.meta.revision;
      save_document(doc);
    }
    out.push_back(std::move(doc));
  }
  return out;
}

void FileStore::save_document(const StoredDocument& doc) const {
  write_file_atomic(docs_dir(root_) / (doc.id + ".proc"), doc.text);
  json meta = {{"owner", doc.meta.owner},
               {"revision", doc.meta.revision},
               {"updated_at", doc.meta.updated_at},
               {"text_hash", text_hash(doc.text)}};
  write_file_atomic(docs_dir(root_) / (doc.id + ".json"), meta.dump(2) + "\n");
}

std::map<std::string, PasswordRecord> FileStore::load_users() const {
  std::map<std::string, PasswordRecord> users;
  fs::path path = root_ / "users.json";
  if (!fs::exists(path)) return users;
  json j = json::parse(read_file(path));
  for (const auto& [name, rec] : j.at("users").items()) {
    users[name] = {rec.at("salt").get<std::string>(), rec.at("hash").get<std::string>(),
                   rec.at("iterations").get<int>()};
  }
  return users;
}

void FileStore::save_users(const std::map<std::string, PasswordRecord>& users) const {
  json j = {{"users", json::object()}};
  for (const auto& [name, rec] : users) {
    j["users"][name] = {{"salt", rec.salt}, {"hash", rec.hash}, {"iterations", rec.iterations}};
  }
  write_file_atomic(root_ / "users.json", j.dump(2) + "\n");
}

std::optional<StoredDraft> FileStore::load_draft(std::string_view user,
                                                 std::string_view id) const {
  fs::path dir = drafts_dir(root_, user);
  fs::path text_path = dir / (std::string(id) + ".proc");
  fs::path meta_path = dir / (std::string(id) + ".json");
  if (!fs::exists(text_path) || !fs::exists(meta_path)) return std::nullopt;
  json meta = json::parse(read_file(meta_path));
  return StoredDraft{read_file(text_path), meta.at("updated_at").get<std::string>(),
                     meta.at("base_revision").get<std::uint64_t>()};
}

void FileStore::save_draft(std::string_view user, std::string_view id,
                           const StoredDraft& draft) const {
  fs::path dir = drafts_dir(root_, user);
  fs::create_directories(dir);
  write_file_atomic(dir / (std::string(id) + ".proc"), draft.text);
  json meta = {{"updated_at", draft.updated_at}, {"base_revision", draft.base_revision}};
  write_file_atomic(dir / (std::string(id) + ".json"), meta.dump(2) + "\n");
}

bool FileStore::delete_draft(std::string_view user, std::string_view id) const {
  fs::path dir = drafts_dir(root_, user);
  bool had_meta = fs::remove(dir / (std::string(id) + ".json"));
  bool had_text = fs::remove(dir / (std::string(id) + ".proc"));
  return had_meta || had_text;
}

}  // namespace procplan
