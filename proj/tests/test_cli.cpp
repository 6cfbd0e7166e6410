#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include "fixtures.hpp"
#include "procplan/cli.hpp"
#include "procplan/syntax.hpp"
#include "subprocess.hpp"
#include "temp_dir.hpp"

using namespace procplan;
using namespace procplan::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "procplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write(const TempDir& dir, const std::string& name, const std::string& text) {
  auto path = dir.path() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("check a valid file") {
  Run r = run_cli({"check", fixture_path("consistent.proc")});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(r.err.empty());
}

TEST_CASE("check a file with an error") {
  std::string path = fixture_path("seeded/time_order.proc");
  Run r = run_cli({"check", path});
  CHECK(r.code == 2);
  CHECK(count_lines(r.err) == 1);
  CHECK(r.err.find("TIME_ORDER") != std::string::npos);
  CHECK(r.err.rfind(path + ":8:3: error TIME_ORDER ", 0) == 0);
}

TEST_CASE("check a file with only warnings") {
  Run r = run_cli({"check", fixture_path("seeded/no_responsible.proc")});
  CHECK(r.code == 1);
  CHECK(r.err.find("warning NO_RESPONSIBLE") != std::string::npos);
}

TEST_CASE("check a missing file") {
  CHECK(run_cli({"check", "/nonexistent/file.proc"}).code == 3);
}

TEST_CASE("fmt --check") {
  CHECK(run_cli({"fmt", "--check", fixture_path("reference.proc")}).code == 0);
  CHECK(run_cli({"fmt", "--check", fixture_path("minimal.proc")}).code == 1);
  CHECK(run_cli({"fmt", "--check", "--write", fixture_path("minimal.proc")}).code == cli::kExitUsage);
}

TEST_CASE("fmt --write canonicalizes a mangled file and is idempotent") {
  TempDir dir;
  std::string canonical = read_fixture("reference.proc");
  std::string mangled = canonical;
  for (std::string::size_type at = 0; (at = mangled.find("\n  ", at)) != std::string::npos;) {
    mangled.replace(at, 3, "\n\t \t");
  }
  mangled = "// a comment\n" + mangled + "\n\n";
  std::string path = write(dir, "mangled.proc", mangled);
  std::string before = slurp(path);
  CHECK(run_cli({"fmt", "--check", path}).code == 1);
  CHECK(slurp(path) == before);  // --check never writes
  CHECK(run_cli({"fmt", path}).out == canonical);
  CHECK(run_cli({"fmt", "--write", path}).code == 0);
  CHECK(slurp(path) == canonical);
  auto mtime = std::filesystem::last_write_time(path);
  CHECK(run_cli({"fmt", "--write", path}).code == 0);
  CHECK(slurp(path) == canonical);
  CHECK(std::filesystem::last_write_time(path) == mtime);
}

TEST_CASE("fmt refuses unparsable files") {
  TempDir dir;
  std::string path = write(dir, "bad.proc", "process end\n");
  Run r = run_cli({"fmt", "--write", path});
  CHECK(r.code == 2);
  CHECK(r.err.find("PARSE_EXPECTED") != std::string::npos);
  CHECK(slurp(path) == "process end\n");
}

TEST_CASE("view milestone-list prints one row per milestone") {
  Run r = run_cli({"view", fixture_path("consistent.proc"), "milestone-list"});
  CHECK(r.code == 0);
  ParseResult p = parse(read_fixture("consistent.proc"));
  REQUIRE(p.model);
  CHECK(count_lines(r.out) == 1 + p.model->milestone_ids().size());
  CHECK(r.out.rfind("POSITION", 0) == 0);
}

TEST_CASE("view with an unknown subject") {
  Run r = run_cli({"view", fixture_path("consistent.proc"), "scope-plan", "--layer", "Department",
               "--scope", "Nope"});
  CHECK(r.code == 4);
  CHECK(r.err.find("UNKNOWN_VIEW_SUBJECT") != std::string::npos);
}

TEST_CASE("view of an invalid document") {
  CHECK(run_cli({"view", fixture_path("seeded/dup_scope.proc"), "milestone-list"}).code == 2);
}

TEST_CASE("view --format json has the documented shape") {
  Run r = run_cli({"view", fixture_path("reference.proc"), "scope-plan", "--layer", "Department",
               "--scope", "Powertrain", "--format", "json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["view_kind"] == "scope-plan");
  REQUIRE(j["entries"].is_array());
  for (const auto& e : j["entries"]) {
    CHECK(e["name"].is_string());
    CHECK(e["position"].is_number_integer());
    CHECK(e["access"].is_string());
  }
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"view", fixture_path("reference.proc"), "gantt"}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("serve answers 401 without a token and stops on interrupt") {
  TempDir dir;
  ServeProcess server(PROCPLAN_BINARY, (dir.path() / "data").string(), {"alice:pw"});
  httplib::Client client("127.0.0.1", server.port());
  auto res = client.Get("/api/files");
  REQUIRE(res);
  CHECK(res->status == 401);
  ProcessResult done = server.stop();
  CHECK(done.exit_code == 0);
}

TEST_CASE("serve on an occupied port exits with 3") {
  TempDir dir;
  ServeProcess first(PROCPLAN_BINARY, (dir.path() / "a").string(), {});
  ProcessResult second =
      run_process({PROCPLAN_BINARY, "serve", "--addr", "127.0.0.1:" + std::to_string(first.port()),
                   "--data-dir", (dir.path() / "b").string()});
  CHECK(second.exit_code == 3);
  CHECK(second.err.find("cannot listen") != std::string::npos);
}

TEST_CASE("serve with an unusable data directory exits with 3") {
  TempDir dir;
  std::string file = write(dir, "plain-file", "x");
  ProcessResult r = run_process({PROCPLAN_BINARY, "serve", "--addr", "127.0.0.1:0",
                                 "--data-dir", file + "/sub"});
  CHECK(r.exit_code == 3);
}
