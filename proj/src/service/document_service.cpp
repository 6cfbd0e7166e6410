#include <stdexcept>
#include <system_error>

#include "procplan/service.hpp"
#include "procplan/syntax.hpp"
#include "procplan/validate.hpp"
#include "procplan/views.hpp"

namespace procplan {

using nlohmann::json;

namespace {

ServiceError fail(int status, std::string_view code, std::string message,
                  json extra = json::object()) {
  return ServiceError{status, std::string(code), std::move(message), std::move(extra)};
}

ServiceError not_found(const std::string& id) {
  return fail(404, "NOT_FOUND", "no document '" + id + "'");
}

ServiceError internal(const std::exception& e) {
  return fail(500, "INTERNAL", std::string("storage failure: ") + e.what());
}

ServiceError validation_failed(const std::vector<Diagnostic>& diags) {
  return fail(422, "VALIDATION_FAILED", "document has errors",
              {{"diagnostics", diagnostics_json(diags)}});
}

ServiceError revision_conflict(std::uint64_t expected, std::uint64_t current) {
  return fail(409, "REVISION_CONFLICT",
              "expected revision " + std::to_string(expected) + " but the document is at " +
                  std::to_string(current),
              {{"revision", current}});
}

ServiceError command_failed(const CommandError& e) {
  json extra = json::object();
  if (e.index) extra["index"] = *e.index;
  if (!e.cause.empty()) extra["cause"] = e.cause;
  return fail(422, e.code, e.message, std::move(extra));
}

// Canonical text for `text`, or VALIDATION_FAILED. Syntax errors are always
// fatal; semantic errors only when `allow_invalid` is false.
Expected<std::string, ServiceError> canonicalize(std::string_view text, bool allow_invalid) {
  ParseResult parsed = parse(text);
  if (!parsed.model) return Unexpected{validation_failed(parsed.diagnostics)};
  if (!allow_invalid) {
    auto diags = validate_text(text);
    if (has_errors(diags)) return Unexpected{validation_failed(diags)};
  }
  return print(*parsed.model);
}

std::string header_name(std::string_view text) {
  ParseResult parsed = parse(text);
  return parsed.model ? parsed.model->header().name : std::string();
}

}  // namespace

json ServiceError::body() const {
  json out = extra.is_object() ? extra : json::object();
  out["code"] = code;
  out["message"] = message;
  return out;
}

json diagnostic_json(const Diagnostic& d) {
  json out = {{"severity", to_string(d.severity)}, {"code", d.code}, {"message", d.message}};
  out["line"] = d.loc ? json(d.loc->line) : json(nullptr);
  out["column"] = d.loc ? json(d.loc->column) : json(nullptr);
  return out;
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  json out = json::array();
  for (const auto& d : diags) out.push_back(diagnostic_json(d));
  return out;
}

std::string default_document_text() {
  ProcessModel model(ProcessHeader{"Untitled", "1", WeeksTimeline{52}});
  return print(model);
}

Expected<std::unique_ptr<DocumentService>, std::string> DocumentService::open(
    ServiceConfig config) {
  auto store = FileStore::open(config.data_dir);
  if (!store) return Unexpected{store.error()};
  std::unique_ptr<DocumentService> service(new DocumentService(config, std::move(*store)));
  try {
    service->users_ = service->store_.load_users();
    for (auto& doc : service->store_.load_documents()) {
      auto state = std::make_shared<DocState>();
      state->owner = doc.meta.owner;
      state->name = header_name(doc.text);
      state->text = std::move(doc.text);
      state->revision = doc.meta.revision;
      state->updated_at = doc.meta.updated_at;
      service->docs_.emplace(doc.id, std::move(state));
    }
  } catch (const std::exception& e) {
    return Unexpected{std::string("cannot load data directory: ") + e.what()};
  }
  return service;
}

DocumentService::DocumentService(ServiceConfig config, FileStore store)
    : config_(std::move(config)),
      store_(std::move(store)),
      sessions_(config_.clock, config_.session_ttl),
      decoy_(hash_password(random_hex(16))) {}

void DocumentService::provision_user(const std::string& username, std::string_view password) {
  if (!is_safe_name(username)) {
    throw std::invalid_argument("invalid username '" + username + "'");
  }
  std::lock_guard lock(users_mutex_);
  auto it = users_.find(username);
  if (it != users_.end() && verify_password(password, it->second)) return;
  users_[username] = hash_password(password);
  store_.save_users(users_);
}

Reply DocumentService::login(const std::string& username, std::string_view password) {
  std::optional<PasswordRecord> record;
  {
    std::lock_guard lock(users_mutex_);
    auto it = users_.find(username);
    if (it != users_.end()) record = it->second;
  }
  // Unknown users cost the same work as a wrong password.
  bool ok = verify_password(password, record ? *record : decoy_) && record.has_value();
  if (!ok) return Unexpected{fail(401, "AUTH_FAILED", "invalid username or password")};
  Session session = sessions_.create(username);
  forget_dead_histories();
  return json{{"token", session.token},
              {"username", session.username},
              {"expires_at", format_timestamp(session.expiry)}};
}

Expected<std::string, ServiceError> DocumentService::authenticate(std::string_view token) {
  auto user = sessions_.authenticate(token);
  if (!user) return Unexpected{fail(401, "AUTH_REQUIRED", "a valid session token is required")};
  return *user;
}

Expected<std::shared_ptr<DocumentService::DocState>, ServiceError> DocumentService::owned(
    std::string_view token, const std::string& id, std::string* user_out) {
  auto user = authenticate(token);
  if (!user) return Unexpected{user.error()};
  std::shared_ptr<DocState> doc;
  {
    std::shared_lock lock(docs_mutex_);
    auto it = docs_.find(id);
    if (it != docs_.end()) doc = it->second;
  }
  if (!doc) return Unexpected{not_found(id)};
  if (doc->owner != *user) {
    return Unexpected{fail(403, "FORBIDDEN", "document belongs to another user")};
  }
  if (user_out) *user_out = *user;
  return doc;
}

DocumentService::Snapshot DocumentService::snapshot(const DocState& doc) {
  std::shared_lock lock(doc.read);
  return {doc.text, doc.revision, doc.updated_at};
}

Reply DocumentService::commit(const std::string& id, DocState& doc, std::string text) {
  StoredDocument stored{id, {doc.owner, doc.revision + 1, format_timestamp(sessions_.now())},
                        std::move(text)};
  try {
    store_.save_document(stored);
  } catch (const std::exception& e) {
    return Unexpected{internal(e)};
  }
  std::string name = header_name(stored.text);
  {
    std::unique_lock lock(doc.read);
    doc.text = stored.text;
    doc.name = std::move(name);
    doc.revision = stored.meta.revision;
    doc.updated_at = stored.meta.updated_at;
  }
  return json{{"id", id},
              {"revision", stored.meta.revision},
              {"text", std::move(stored.text)},
              {"updated_at", stored.meta.updated_at}};
}

Reply DocumentService::list_files(std::string_view token) {
  auto user = authenticate(token);
  if (!user) return Unexpected{user.error()};
  json files = json::array();
  std::shared_lock lock(docs_mutex_);
  for (const auto& [id, doc] : docs_) {
    if (doc->owner != *user) continue;
    std::shared_lock doc_lock(doc->read);
    files.push_back({{"id", id},
                     {"name", doc->name},
                     {"revision", doc->revision},
                     {"updated_at", doc->updated_at}});
  }
  return json{{"files", std::move(files)}};
}

Reply DocumentService::create_file(std::string_view token, const std::optional<std::string>& text,
                                   bool allow_invalid) {
  auto user = authenticate(token);
  if (!user) return Unexpected{user.error()};
  auto canonical = canonicalize(text ? *text : default_document_text(), allow_invalid);
  if (!canonical) return Unexpected{canonical.error()};

  auto doc = std::make_shared<DocState>();
  doc->owner = *user;
  std::string id = random_hex(16);
  std::lock_guard write(doc->write);
  {
    std::unique_lock lock(docs_mutex_);
    docs_.emplace(id, doc);
  }
  auto reply = commit(id, *doc, std::move(*canonical));
  if (!reply) {
    std::unique_lock lock(docs_mutex_);
    docs_.erase(id);
  }
  return reply;
}

Reply DocumentService::get_file(std::string_view token, const std::string& id) {
  auto doc = owned(token, id);
  if (!doc) return Unexpected{doc.error()};
  Snapshot s = snapshot(**doc);
  return json{{"id", id}, {"revision", s.revision}, {"text", s.text}, {"updated_at", s.updated_at}};
}

Reply DocumentService::put_file(std::string_view token, const std::string& id,
                                std::string_view text, std::uint64_t expected_revision,
                                bool allow_invalid) {
  auto doc = owned(token, id);
  if (!doc) return Unexpected{doc.error()};
  std::lock_guard write((*doc)->write);
  if ((*doc)->revision != expected_revision) {
    return Unexpected{revision_conflict(expected_revision, (*doc)->revision)};
  }
  auto canonical = canonicalize(text, allow_invalid);
  if (!canonical) return Unexpected{canonical.error()};
  return commit(id, **doc, std::move(*canonical));
}

std::shared_ptr<DocumentService::SessionHistory> DocumentService::history_for(
    std::string_view token, const std::string& id, std::uint64_t revision) {
  std::lock_guard lock(histories_mutex_);
  auto& slot = histories_[{std::string(token), id}];
  if (!slot || slot->synced_revision != revision) {
    slot = std::make_shared<SessionHistory>();
    slot->synced_revision = revision;
  }
  return slot;
}

void DocumentService::forget_dead_histories() {
  std::lock_guard lock(histories_mutex_);
  std::erase_if(histories_, [&](const auto& kv) { return !sessions_.is_live(kv.first.first); });
}

Reply DocumentService::apply_commands(std::string_view token, const std::string& id,
                                      std::uint64_t expected_revision, const json& commands) {
  auto doc = owned(token, id);
  if (!doc) return Unexpected{doc.error()};
  if (!commands.is_array()) {
    return Unexpected{fail(400, "BAD_REQUEST", "'commands' must be an array")};
  }
  std::vector<Command> batch;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto command = command_from_json(commands[i]);
    if (!command) {
      CommandError e = command.error();
      e.index = i;
      return Unexpected{command_failed(e)};
    }
    batch.push_back(std::move(*command));
  }

  std::lock_guard write((*doc)->write);
  if ((*doc)->revision != expected_revision) {
    return Unexpected{revision_conflict(expected_revision, (*doc)->revision)};
  }
  ParseResult parsed = parse((*doc)->text);
  if (!parsed.model) return Unexpected{validation_failed(parsed.diagnostics)};
  auto history = history_for(token, id, (*doc)->revision);
  if (auto error = apply_batch(*parsed.model, history->history, batch)) {
    return Unexpected{command_failed(*error)};
  }
  if (batch.empty()) return get_file(token, id);
  auto reply = commit(id, **doc, print(*parsed.model));
  if (reply) history->synced_revision = (*doc)->revision;
  return reply;
}

Reply DocumentService::run_history(std::string_view token, const std::string& id,
                                   std::optional<std::uint64_t> expected_revision, bool is_undo) {
  auto doc = owned(token, id);
  if (!doc) return Unexpected{doc.error()};
  std::lock_guard write((*doc)->write);
  if (expected_revision && *expected_revision != (*doc)->revision) {
    return Unexpected{revision_conflict(*expected_revision, (*doc)->revision)};
  }
  ParseResult parsed = parse((*doc)->text);
  if (!parsed.model) return Unexpected{validation_failed(parsed.diagnostics)};
  auto history = history_for(token, id, (*doc)->revision);
  auto error = is_undo ? procplan::undo(*parsed.model, history->history)
                       : procplan::redo(*parsed.model, history->history);
  if (error) return Unexpected{command_failed(*error)};
  auto reply = commit(id, **doc, print(*parsed.model));
  if (reply) {
    history->synced_revision = (*doc)->revision;
    (*reply)["undo_depth"] = history->history.undo_stack().size();
    (*reply)["redo_depth"] = history->history.redo_stack().size();
  }
  return reply;
}

Reply DocumentService::undo(std::string_view token, const std::string& id,
                            std::optional<std::uint64_t> expected_revision) {
  return run_history(token, id, expected_revision, true);
}

Reply DocumentService::redo(std::string_view token, const std::string& id,
                            std::optional<std::uint64_t> expected_revision) {
  return run_history(token, id, expected_revision, false);
}

Reply DocumentService::get_draft(std::string_view token, const std::string& id) {
  std::string user;
  auto doc = owned(token, id, &user);
  if (!doc) return Unexpected{doc.error()};
  std::optional<StoredDraft> draft;
  try {
    std::lock_guard write((*doc)->write);
    draft = store_.load_draft(user, id);
  } catch (const std::exception& e) {
    return Unexpected{internal(e)};
  }
  if (!draft) return json{{"id", id}, {"text", nullptr}};
  return json{{"id", id},
              {"text", draft->text},
              {"updated_at", draft->updated_at},
              {"base_revision", draft->base_revision}};
}

Reply DocumentService::save_draft(std::string_view token, const std::string& id,
                                  const std::string& text) {
  std::string user;
  auto doc = owned(token, id, &user);
  if (!doc) return Unexpected{doc.error()};
  std::lock_guard write((*doc)->write);
  StoredDraft draft{text, format_timestamp(sessions_.now()), (*doc)->revision};
  try {
    store_.save_draft(user, id, draft);
  } catch (const std::exception& e) {
    return Unexpected{internal(e)};
  }
  return json{{"id", id}, {"updated_at", draft.updated_at}, {"base_revision", draft.base_revision}};
}

Reply DocumentService::delete_draft(std::string_view token, const std::string& id) {
  std::string user;
  auto doc = owned(token, id, &user);
  if (!doc) return Unexpected{doc.error()};
  std::lock_guard write((*doc)->write);
  try {
    return json{{"id", id}, {"deleted", store_.delete_draft(user, id)}};
  } catch (const std::exception& e) {
    return Unexpected{internal(e)};
  }
}

Reply DocumentService::validate(std::string_view token, const std::string& id,
                                const std::optional<std::string>& text) {
  auto doc = owned(token, id);
  if (!doc) return Unexpected{doc.error()};
  Snapshot s = snapshot(**doc);
  auto diags = validate_text(text ? *text : s.text);
  json out = {{"id", id}, {"valid", !has_errors(diags)}, {"diagnostics", diagnostics_json(diags)}};
  if (!text) out["revision"] = s.revision;
  return out;
}

Reply DocumentService::get_view(std::string_view token, const std::string& id,
                                std::string_view kind,
                                const std::map<std::string, std::string>& params) {
  auto doc = owned(token, id);
  if (!doc) return Unexpected{doc.error()};
  auto view_kind = view_kind_from_string(kind);
  if (!view_kind) return Unexpected{fail(404, "NOT_FOUND", "unknown view kind '" + std::string(kind) + "'")};

  Snapshot s = snapshot(**doc);
  ParseResult parsed = parse(s.text);
  if (!parsed.model) return Unexpected{validation_failed(parsed.diagnostics)};
  ResolveResult resolved = resolve(std::move(*parsed.model));
  if (!resolved.resolved) return Unexpected{validation_failed(resolved.diagnostics)};
  auto diags = procplan::validate(*resolved.resolved);
  if (has_errors(diags)) return Unexpected{validation_failed(diags)};

  auto view = compute_view(*resolved.resolved, *view_kind, params);
  if (!view) return Unexpected{fail(404, view.error().code, view.error().message)};
  json out = to_json(*view);
  out["revision"] = s.revision;
  return out;
}

}  // namespace procplan
