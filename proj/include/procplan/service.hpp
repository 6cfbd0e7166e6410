#pragma once

// Transport-independent document service. Every operation authenticates a
// bearer token, checks ownership and returns either a JSON payload or a
// ServiceError carrying the HTTP status the transport should use.
//
// Status conventions:
//   400 BAD_REQUEST            malformed request body or parameters
//   401 AUTH_REQUIRED          missing, unknown or expired token
//   401 AUTH_FAILED            login with unknown user or wrong password
//   403 FORBIDDEN              document owned by someone else
//   404 NOT_FOUND              no such document or view kind
//   404 UNKNOWN_VIEW_SUBJECT   view parameters name nothing in the document
//   409 REVISION_CONFLICT      expected_revision differs from the stored one
//   422 VALIDATION_FAILED      text rejected, with the full diagnostic list
//   422 CMD_*                  command engine errors, passed through
//   500 INTERNAL               persistence failure

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "procplan/auth.hpp"
#include "procplan/commands.hpp"
#include "procplan/diagnostic.hpp"
#include "procplan/expected.hpp"
#include "procplan/store.hpp"

namespace procplan {

struct ServiceConfig {
  std::filesystem::path data_dir;
  std::chrono::seconds session_ttl = std::chrono::hours(8);
  Clock clock = [] { return std::chrono::system_clock::now(); };
};

struct ServiceError {
  int status = 500;
  std::string code;
  std::string message;
  nlohmann::json extra = nlohmann::json::object();  // merged into the body

  nlohmann::json body() const;
};

using Reply = Expected<nlohmann::json, ServiceError>;

nlohmann::json diagnostic_json(const Diagnostic& d);
nlohmann::json diagnostics_json(const std::vector<Diagnostic>& diags);

// Text of a freshly created document when the client supplies none.
std::string default_document_text();

class DocumentService {
 public:
  static Expected<std::unique_ptr<DocumentService>, std::string> open(ServiceConfig config);

  // Creates the account or replaces its password.
  void provision_user(const std::string& username, std::string_view password);

  Reply login(const std::string& username, std::string_view password);

  Reply list_files(std::string_view token);
  Reply create_file(std::string_view token, const std::optional<std::string>& text,
                    bool allow_invalid);
  Reply get_file(std::string_view token, const std::string& id);
  Reply put_file(std::string_view token, const std::string& id, std::string_view text,
                 std::uint64_t expected_revision, bool allow_invalid);

  // `commands` is a JSON array in the command wire format.
  Reply apply_commands(std::string_view token, const std::string& id,
                       std::uint64_t expected_revision, const nlohmann::json& commands);
  Reply undo(std::string_view token, const std::string& id,
             std::optional<std::uint64_t> expected_revision);
  Reply redo(std::string_view token, const std::string& id,
             std::optional<std::uint64_t> expected_revision);

  Reply get_draft(std::string_view token, const std::string& id);
  Reply save_draft(std::string_view token, const std::string& id, const std::string& text);
  Reply delete_draft(std::string_view token, const std::string& id);

  // Validates `text` when given, the stored document otherwise.
  Reply validate(std::string_view token, const std::string& id,
                 const std::optional<std::string>& text);
  Reply get_view(std::string_view token, const std::string& id, std::string_view kind,
                 const std::map<std::string, std::string>& params);

 private:
  struct DocState {
    std::mutex write;                // serializes mutations
    mutable std::shared_mutex read;  // guards the fields below
    std::string owner;
    std::string name;  // process name from the header
    std::string text;
    std::uint64_t revision = 0;
    std::string updated_at;
  };

  // Undo/redo history of one session on one document. It is only valid
  // while the document is still at `synced_revision`; any other writer
  // invalidates it.
  struct SessionHistory {
    History history;
    std::uint64_t synced_revision = 0;
  };

  struct Snapshot {
    std::string text;
    std::uint64_t revision;
    std::string updated_at;
  };

  DocumentService(ServiceConfig config, FileStore store);

  Expected<std::string, ServiceError> authenticate(std::string_view token);
  Expected<std::shared_ptr<DocState>, ServiceError> owned(std::string_view token,
                                                          const std::string& id,
                                                          std::string* user = nullptr);
  static Snapshot snapshot(const DocState& doc);
  // Persists and publishes a new revision. Caller holds doc.write.
  Reply commit(const std::string& id, DocState& doc, std::string text);
  Reply run_history(std::string_view token, const std::string& id,
                    std::optional<std::uint64_t> expected_revision, bool is_undo);
  std::shared_ptr<SessionHistory> history_for(std::string_view token, const std::string& id,
                                              std::uint64_t revision);
  void forget_dead_histories();

  ServiceConfig config_;
  FileStore store_;
  SessionManager sessions_;

  std::mutex users_mutex_;
  std::map<std::string, PasswordRecord> users_;
  PasswordRecord decoy_;  // verified against for unknown users

  std::shared_mutex docs_mutex_;
  std::map<std::string, std::shared_ptr<DocState>> docs_;

  std::mutex histories_mutex_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<SessionHistory>> histories_;
};

}  // namespace procplan
