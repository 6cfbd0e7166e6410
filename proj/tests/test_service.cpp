#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "fixtures.hpp"
#include "procplan/http_server.hpp"
#include "procplan/service.hpp"
#include "procplan/syntax.hpp"
#include "procplan/validate.hpp"
#include "procplan/views.hpp"
#include "temp_dir.hpp"

using namespace procplan;
using namespace procplan::testing;
using nlohmann::json;

namespace {

struct FakeClock {
  std::shared_ptr<std::atomic<long long>> seconds =
      std::make_shared<std::atomic<long long>>(1'700'000'000);
  Clock clock() const {
    auto s = seconds;
    return [s] { return TimePoint(std::chrono::seconds(s->load())); };
  }
  void advance(std::chrono::seconds d) { *seconds += d.count(); }
};

struct Fixture {
  TempDir dir;
  FakeClock time;
  std::unique_ptr<DocumentService> service;

  Fixture() { reopen(); }

  void reopen() {
    service.reset();
    ServiceConfig config{dir.path(), std::chrono::hours(8), time.clock()};
    auto opened = DocumentService::open(config);
    REQUIRE(opened);
    service = std::move(*opened);
    service->provision_user("alice", "wonderland");
    service->provision_user("bob", "builder");
  }

  std::string login(const std::string& user, const std::string& password) {
    auto r = service->login(user, password);
    REQUIRE(r);
    return (*r)["token"].get<std::string>();
  }

  std::string create(const std::string& token, const std::string& text) {
    auto r = service->create_file(token, text, false);
    REQUIRE(r);
    return (*r)["id"].get<std::string>();
  }
};

std::string canonical(const std::string& text) {
  ParseResult p = parse(text);
  REQUIRE(p.model);
  return print(*p.model);
}

json add_milestone(const std::string& name, int position) {
  return {{"cmd", "AddMilestone"}, {"name", name}, {"position", position}, {"description", "d"}};
}

}  // namespace

TEST_CASE("login") {
  Fixture f;
  auto ok = f.service->login("alice", "wonderland");
  REQUIRE(ok);
  CHECK((*ok)["token"].get<std::string>().size() == 64);
  CHECK((*ok)["expires_at"] == format_timestamp(f.time.clock()() + std::chrono::hours(8)));

  auto wrong = f.service->login("alice", "nope");
  auto unknown = f.service->login("mallory", "nope");
  REQUIRE_FALSE(wrong);
  REQUIRE_FALSE(unknown);
  CHECK(wrong.error().status == 401);
  CHECK(wrong.error().body() == unknown.error().body());
  CHECK(wrong.error().code == "AUTH_FAILED");
}

TEST_CASE("tokens are unique and expire") {
  Fixture f;
  std::string a = f.login("alice", "wonderland");
  std::string b = f.login("alice", "wonderland");
  CHECK(a != b);
  CHECK(f.service->list_files(a));
  f.time.advance(std::chrono::hours(8));
  auto r = f.service->list_files(a);
  REQUIRE_FALSE(r);
  CHECK(r.error().code == "AUTH_REQUIRED");
  CHECK(r.error().status == 401);
  auto bogus = f.service->list_files("not-a-token");
  REQUIRE_FALSE(bogus);
  CHECK(bogus.error().body() == r.error().body());
}

TEST_CASE("file lists only contain the caller's documents") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string bob = f.login("bob", "builder");
  CHECK((*f.service->list_files(alice))["files"].empty());
  std::string a1 = f.create(alice, read_fixture("reference.proc"));
  std::string a2 = f.create(alice, read_fixture("minimal.proc"));
  f.create(bob, read_fixture("minimal.proc"));
  json files = (*f.service->list_files(alice))["files"];
  REQUIRE(files.size() == 2);
  std::set<std::string> ids;
  for (const auto& file : files) {
    ids.insert(file["id"].get<std::string>());
    CHECK_FALSE(file.contains("text"));
    CHECK(file["revision"] == 1);
  }
  CHECK(ids == std::set<std::string>{a1, a2});
  CHECK((*f.service->list_files(bob))["files"].size() == 1);
}

TEST_CASE("put canonicalizes and checks the revision") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("minimal.proc"));

  std::string mangled = "process   name \"X\"\n\n version \"2\" timeline weeks 5 // c\n end";
  auto put = f.service->put_file(alice, id, mangled, 1, false);
  REQUIRE(put);
  CHECK((*put)["revision"] == 2);
  auto got = f.service->get_file(alice, id);
  REQUIRE(got);
  CHECK((*got)["text"] == canonical(mangled));
  CHECK((*got)["revision"] == 2);

  auto stale = f.service->put_file(alice, id, read_fixture("minimal.proc"), 1, false);
  REQUIRE_FALSE(stale);
  CHECK(stale.error().status == 409);
  CHECK(stale.error().code == "REVISION_CONFLICT");
  CHECK((*f.service->get_file(alice, id))["text"] == canonical(mangled));
}

TEST_CASE("put rejects invalid documents with their diagnostics") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("minimal.proc"));
  std::string dangling = read_fixture("seeded/dangling_ref.proc");
  auto r = f.service->put_file(alice, id, dangling, 1, false);
  REQUIRE_FALSE(r);
  CHECK(r.error().status == 422);
  CHECK(r.error().code == "VALIDATION_FAILED");
  json diags = r.error().body()["diagnostics"];
  REQUIRE(diags.size() == 1);
  CHECK(diags[0]["code"] == "DANGLING_REF");
  CHECK(diags[0]["line"] == 22);

  auto forced = f.service->put_file(alice, id, dangling, 1, true);
  REQUIRE(forced);
  CHECK((*forced)["text"] == canonical(dangling));

  auto syntax = f.service->put_file(alice, id, "process end", 2, true);
  REQUIRE_FALSE(syntax);
  CHECK(syntax.error().code == "VALIDATION_FAILED");
}

TEST_CASE("commands, undo and redo") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("reference.proc"));
  std::string original = (*f.service->get_file(alice, id))["text"];

  auto r = f.service->apply_commands(alice, id, 1, json::array({add_milestone("Gate", 30)}));
  REQUIRE(r);
  CHECK((*r)["revision"] == 2);
  std::string text = (*f.service->get_file(alice, id))["text"];
  CHECK(text.find("milestone Gate position 30") != std::string::npos);

  auto bad = f.service->apply_commands(
      alice, id, 2, json::array({add_milestone("Other", 3), add_milestone("Gate", 4)}));
  REQUIRE_FALSE(bad);
  CHECK(bad.error().status == 422);
  CHECK(bad.error().code == "CMD_BATCH_FAILED");
  CHECK(bad.error().body()["index"] == 1);
  CHECK((*f.service->get_file(alice, id))["revision"] == 2);

  auto malformed = f.service->apply_commands(alice, id, 2, json::array({{{"cmd", "Nope"}}}));
  REQUIRE_FALSE(malformed);
  CHECK(malformed.error().code == "CMD_INVALID_ARG");

  auto u = f.service->undo(alice, id, 2);
  REQUIRE(u);
  CHECK((*u)["revision"] == 3);
  CHECK((*u)["text"] == original);
  auto again = f.service->undo(alice, id, std::nullopt);
  REQUIRE_FALSE(again);
  CHECK(again.error().code == "CMD_NOTHING_TO_UNDO");
  auto re = f.service->redo(alice, id, 3);
  REQUIRE(re);
  CHECK((*re)["text"] == text);
  CHECK((*re)["revision"] == 4);
}

TEST_CASE("history is per session and invalidated by other writers") {
  Fixture f;
  std::string s1 = f.login("alice", "wonderland");
  std::string s2 = f.login("alice", "wonderland");
  std::string id = f.create(s1, read_fixture("reference.proc"));
  REQUIRE(f.service->apply_commands(s1, id, 1, json::array({add_milestone("A", 1)})));
  auto other = f.service->undo(s2, id, std::nullopt);
  REQUIRE_FALSE(other);
  CHECK(other.error().code == "CMD_NOTHING_TO_UNDO");

  REQUIRE(f.service->apply_commands(s2, id, 2, json::array({add_milestone("B", 2)})));
  auto stale = f.service->undo(s1, id, std::nullopt);
  REQUIRE_FALSE(stale);
  CHECK(stale.error().code == "CMD_NOTHING_TO_UNDO");
  REQUIRE(f.service->undo(s2, id, 3));
}

TEST_CASE("drafts are stored verbatim and persist") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("minimal.proc"));
  auto none = f.service->get_draft(alice, id);
  REQUIRE(none);
  CHECK((*none)["text"].is_null());

  std::string junk = "process ??? not valid at all\n\x01 \"";
  REQUIRE(f.service->save_draft(alice, id, junk));
  CHECK((*f.service->get_draft(alice, id))["text"] == junk);

  f.reopen();
  std::string again = f.login("alice", "wonderland");
  CHECK((*f.service->get_draft(again, id))["text"] == junk);
  REQUIRE(f.service->delete_draft(again, id));
  CHECK((*f.service->get_draft(again, id))["text"].is_null());
}

TEST_CASE("documents and revisions survive a restart") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("reference.proc"));
  REQUIRE(f.service->apply_commands(alice, id, 1, json::array({add_milestone("A", 1)})));
  json before = *f.service->get_file(alice, id);
  f.reopen();
  std::string token = f.login("alice", "wonderland");
  json after = *f.service->get_file(token, id);
  CHECK(after["text"] == before["text"]);
  CHECK(after["revision"] == before["revision"]);
  CHECK_FALSE(f.service->get_file(alice, id));  // sessions do not survive
}

TEST_CASE("a text written without its metadata counts as the next revision") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("minimal.proc"));
  std::string newer = canonical(read_fixture("reference.proc"));
  write_file_atomic(f.dir.path() / "docs" / (id + ".proc"), newer);
  f.reopen();
  std::string token = f.login("alice", "wonderland");
  json doc = *f.service->get_file(token, id);
  CHECK(doc["revision"] == 2);
  CHECK(doc["text"] == newer);
}

TEST_CASE("validate and views") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string id = f.create(alice, read_fixture("reference.proc"));
  auto v = f.service->validate(alice, id, std::nullopt);
  REQUIRE(v);
  CHECK((*v)["valid"] == true);
  CHECK((*v)["diagnostics"][0]["code"] == "NO_RESPONSIBLE");
  auto bad = f.service->validate(alice, id, read_fixture("seeded/time_order.proc"));
  REQUIRE(bad);
  CHECK((*bad)["valid"] == false);

  std::map<std::string, std::string> params{{"layer", "Department"}, {"scope", "Powertrain"}};
  auto view = f.service->get_view(alice, id, "scope-plan", params);
  REQUIRE(view);
  ParseResult p = parse(read_fixture("reference.proc"));
  auto local = compute_view(*resolve(std::move(*p.model)).resolved, ViewKind::kScopePlan, params);
  json expected = to_json(*local);
  expected["revision"] = 1;
  CHECK(*view == expected);

  auto unknown = f.service->get_view(alice, id, "scope-plan", {{"layer", "Department"}, {"scope", "X"}});
  REQUIRE_FALSE(unknown);
  CHECK(unknown.error().status == 404);
  CHECK(unknown.error().code == "UNKNOWN_VIEW_SUBJECT");
  CHECK(f.service->get_view(alice, id, "gantt", {}).error().code == "NOT_FOUND");

  std::string empty = f.create(alice, read_fixture("minimal.proc"));
  auto list = f.service->get_view(alice, empty, "milestone-list", {});
  REQUIRE(list);
  CHECK((*list)["entries"].empty());
}

TEST_CASE("foreign documents are refused by every operation") {
  Fixture f;
  std::string alice = f.login("alice", "wonderland");
  std::string bob = f.login("bob", "builder");
  std::string id = f.create(alice, read_fixture("reference.proc"));
  std::vector<Reply> replies{
      f.service->get_file(bob, id),
      f.service->put_file(bob, id, read_fixture("minimal.proc"), 1, false),
      f.service->apply_commands(bob, id, 1, json::array()),
      f.service->undo(bob, id, std::nullopt),
      f.service->redo(bob, id, std::nullopt),
      f.service->get_draft(bob, id),
      f.service->save_draft(bob, id, "x"),
      f.service->delete_draft(bob, id),
      f.service->validate(bob, id, std::nullopt),
      f.service->get_view(bob, id, "milestone-list", {}),
  };
  for (const auto& r : replies) {
    REQUIRE_FALSE(r);
    CHECK(r.error().status == 403);
    CHECK(r.error().body().dump().find("Vehicle") == std::string::npos);
  }
  CHECK((*f.service->get_file(alice, id))["revision"] == 1);
  CHECK(f.service->get_file(alice, "0123").error().status == 404);
}

TEST_CASE("storage helpers") {
  CHECK(text_hash("") == "cbf29ce484222325");
  CHECK(text_hash("a") == "af63dc4c8601ec8c");
  CHECK(is_safe_name("abc-1.2_x"));
  CHECK_FALSE(is_safe_name("../etc"));
  CHECK_FALSE(is_safe_name(".hidden"));
  CHECK_FALSE(is_safe_name(""));
  PasswordRecord rec = hash_password("secret", 1000);
  CHECK(verify_password("secret", rec));
  CHECK_FALSE(verify_password("Secret", rec));
  CHECK(hash_password("secret", 1000).salt != rec.salt);
  CHECK(format_timestamp(TimePoint(std::chrono::seconds(0))) == "1970-01-01T00:00:00Z");
}

TEST_CASE("listen addresses") {
  auto a = parse_listen_address("0.0.0.0:9000");
  REQUIRE(a);
  CHECK(a->host == "0.0.0.0");
  CHECK(a->port == 9000);
  CHECK(parse_listen_address(":0")->host == "127.0.0.1");
  CHECK(parse_listen_address("8080")->port == 8080);
  CHECK_FALSE(parse_listen_address("host:"));
  CHECK_FALSE(parse_listen_address("host:99999"));
}

TEST_CASE("HTTP binding") {
  Fixture f;
  HttpServer server(*f.service);
  REQUIRE(server.bind({"127.0.0.1", 0}));
  std::thread runner([&] { server.run(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", server.port());

  auto unauth = client.Get("/api/files");
  REQUIRE(unauth);
  CHECK(unauth->status == 401);
  CHECK(json::parse(unauth->body)["code"] == "AUTH_REQUIRED");

  auto bad_login = client.Post("/api/login", R"({"username":"alice","password":"x"})", "application/json");
  REQUIRE(bad_login);
  CHECK(bad_login->status == 401);
  CHECK(client.Post("/api/login", "not json", "application/json")->status == 400);

  auto login = client.Post("/api/login", R"({"username":"alice","password":"wonderland"})",
                           "application/json");
  REQUIRE(login);
  REQUIRE(login->status == 200);
  httplib::Headers auth{{"Authorization", "Bearer " + json::parse(login->body)["token"].get<std::string>()}};

  json create = {{"text", read_fixture("reference.proc")}};
  auto created = client.Post("/api/files", auth, create.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  std::string id = json::parse(created->body)["id"];
  std::string base = "/api/files/" + id;

  json batch = {{"expected_revision", 1}, {"commands", json::array({add_milestone("Gate", 9)})}};
  auto applied = client.Post(base + "/commands", auth, batch.dump(), "application/json");
  REQUIRE(applied);
  CHECK(applied->status == 200);
  auto conflict = client.Post(base + "/commands", auth, batch.dump(), "application/json");
  CHECK(conflict->status == 409);
  CHECK(client.Post(base + "/commands", auth, R"({"commands":[]})", "application/json")->status == 400);

  auto view = client.Get(base + "/views/scope-plan?layer=Department&scope=Powertrain", auth);
  REQUIRE(view);
  CHECK(view->status == 200);
  CHECK(json::parse(view->body)["entries"].size() == 2);
  CHECK(client.Get(base + "/views/scope-plan?layer=Department&scope=Nope", auth)->status == 404);

  CHECK(client.Put(base + "/draft", auth, R"({"text":"draft text"})", "application/json")->status == 200);
  CHECK(json::parse(client.Get(base + "/draft", auth)->body)["text"] == "draft text");
  CHECK(client.Delete(base + "/draft", auth)->status == 200);

  auto undo = client.Post(base + "/undo", auth, "", "application/json");
  REQUIRE(undo);
  CHECK(undo->status == 200);
  CHECK(json::parse(undo->body)["text"] == canonical(read_fixture("reference.proc")));
  auto validated = client.Post(base + "/validate", auth, "{}", "application/json");
  CHECK(json::parse(validated->body)["valid"] == true);

  CHECK(client.Get("/api/files/does-not-exist", auth)->status == 404);
  CHECK(client.Get("/api/nothing", auth)->status == 404);

  server.stop();
  runner.join();
}
