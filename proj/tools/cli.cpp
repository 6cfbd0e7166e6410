#include "procplan/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "procplan/http_server.hpp"
#include "procplan/service.hpp"
#include "procplan/syntax.hpp"
#include "procplan/validate.hpp"
#include "procplan/views.hpp"

namespace procplan::cli {

namespace {

std::optional<std::string> read_text(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << path << ": cannot read file\n";
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    err << path << ": read error\n";
    return std::nullopt;
  }
  return buffer.str();
}

void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& diags,
                       std::ostream& err) {
  for (const auto& d : diags) {
    int line = d.loc ? d.loc->line : 0;
    int column = d.loc ? d.loc->column : 0;
    err << path << ':' << line << ':' << column << ": " << to_string(d.severity) << ' ' << d.code
        << ' ' << d.message << '\n';
  }
}

int exit_code_for(const std::vector<Diagnostic>& diags) {
  if (has_errors(diags)) return kExitErrors;
  return diags.empty() ? kExitClean : kExitWarnings;
}

int cmd_check(const std::string& path, std::ostream& err) {
  auto text = read_text(path, err);
  if (!text) return kExitIo;
  auto diags = validate_text(*text);
  print_diagnostics(path, diags, err);
  return exit_code_for(diags);
}

int cmd_fmt(const std::string& path, bool write, bool check, std::ostream& out,
            std::ostream& err) {
  auto text = read_text(path, err);
  if (!text) return kExitIo;
  ParseResult parsed = parse(*text);
  if (!parsed.model) {
    print_diagnostics(path, parsed.diagnostics, err);
    return kExitErrors;
  }
  std::string canonical = print(*parsed.model);
  if (check) {
    if (canonical == *text) return kExitClean;
    err << path << ": not in canonical form\n";
    return kExitWarnings;
  }
  if (write) {
    if (canonical == *text) return kExitClean;
    try {
      write_file_atomic(path, canonical);
    } catch (const std::exception& e) {
      err << path << ": " << e.what() << '\n';
      return kExitIo;
    }
    return kExitClean;
  }
  out << canonical;
  return kExitClean;
}

std::string span_text(const std::optional<Span>& span) {
  if (!span) return "";
  return std::to_string(span->start) + ".." + std::to_string(span->end);
}

std::string results_text(const std::vector<ArtifactSummary>& results) {
  std::string out;
  for (const auto& r : results) {
    if (!out.empty()) out += ", ";
    out += r.name;
  }
  return out;
}

void print_table(const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(widths[i] - row[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
}

void render_text(const ViewModel& view, std::ostream& out) {
  bool with_access =
      view.kind == ViewKind::kScopePlan || view.kind == ViewKind::kLayerInvolvement;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"POSITION", "MILESTONE"};
  if (with_access) header.push_back("ACCESS");
  header.insert(header.end(), {"SPAN", "RESULTS"});
  rows.push_back(header);
  for (const auto& e : view.entries) {
    std::vector<std::string> row{std::to_string(e.position), e.name};
    if (with_access) row.push_back(e.access ? std::string(wire_name(*e.access)) : "");
    row.insert(row.end(), {span_text(e.span), results_text(e.results)});
    rows.push_back(std::move(row));
  }
  print_table(rows, out);
  if (view.kind == ViewKind::kMilestoneIO) {
    for (const auto& [title, list] : {std::pair{"INPUTS", &view.inputs},
                                      std::pair{"OUTPUTS", &view.outputs}}) {
      out << '\n' << title << '\n';
      std::vector<std::vector<std::string>> io{{"MILESTONE", "ARTIFACT", "DESCRIPTION"}};
      for (const auto& a : *list) io.push_back({a.milestone, a.name, a.description});
      print_table(io, out);
    }
  }
}

int cmd_view(const std::string& path, const std::string& kind_name,
             const std::map<std::string, std::string>& params, const std::string& format,
             std::ostream& out, std::ostream& err) {
  auto kind = view_kind_from_string(kind_name);
  if (!kind) {
    err << "unknown view kind '" << kind_name << "'\n";
    return kExitUsage;
  }
  auto text = read_text(path, err);
  if (!text) return kExitIo;
  ParseResult parsed = parse(*text);
  if (!parsed.model) {
    print_diagnostics(path, parsed.diagnostics, err);
    return kExitErrors;
  }
  ResolveResult resolved = resolve(std::move(*parsed.model));
  if (!resolved.resolved) {
    print_diagnostics(path, resolved.diagnostics, err);
    return kExitErrors;
  }
  auto diags = validate(*resolved.resolved);
  if (has_errors(diags)) {
    print_diagnostics(path, diags, err);
    return kExitErrors;
  }
  auto view = compute_view(*resolved.resolved, *kind, params);
  if (!view) {
    err << view.error().code << ' ' << view.error().message << '\n';
    return kExitBadSubject;
  }
  if (format == "json") {
    out << to_json(*view).dump(2) << '\n';
  } else {
    render_text(*view, out);
  }
  return kExitClean;
}

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

int cmd_serve(const std::string& addr_text, const std::string& data_dir,
              const std::vector<std::string>& users, std::ostream& out, std::ostream& err) {
  auto addr = parse_listen_address(addr_text);
  if (!addr) {
    err << "invalid listen address '" << addr_text << "'\n";
    return kExitUsage;
  }
  ServiceConfig config;
  config.data_dir = data_dir;
  std::string ttl = env_or("PROCPLAN_SESSION_TTL", "");
  if (!ttl.empty()) {
    char* end = nullptr;
    long long seconds = std::strtoll(ttl.c_str(), &end, 10);
    if (*end != '\0' || seconds <= 0) {
      err << "PROCPLAN_SESSION_TTL must be a positive number of seconds\n";
      return kExitUsage;
    }
    config.session_ttl = std::chrono::seconds(seconds);
  }

  auto service = DocumentService::open(config);
  if (!service) {
    err << service.error() << '\n';
    return kExitIo;
  }
  for (const auto& account : users) {
    auto colon = account.find(':');
    if (colon == std::string::npos) {
      err << "--user expects NAME:PASSWORD\n";
      return kExitUsage;
    }
    try {
      (*service)->provision_user(account.substr(0, colon), account.substr(colon + 1));
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return kExitIo;
    }
  }

  HttpServer server(**service);
  if (!server.bind(*addr)) {
    err << "cannot listen on " << addr->host << ':' << addr->port << '\n';
    return kExitIo;
  }

  // Signals are delivered to a dedicated thread, which asks the server to
  // stop; run() returns once in-flight requests have completed.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  });

  out << "listening on " << addr->host << ':' << server.port() << std::endl;
  server.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  out << "stopped" << std::endl;
  return kExitClean;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toolchain and document service for process milestone plans", "procplan"};
  app.require_subcommand(1);

  std::string path;
  auto* check = app.add_subcommand("check", "Report diagnostics for a .proc file");
  check->add_option("path", path, "File to check")->required();

  bool write = false;
  bool verify = false;
  auto* fmt = app.add_subcommand("fmt", "Print or rewrite a file in canonical form");
  fmt->add_option("path", path, "File to format")->required();
  auto* write_flag = fmt->add_flag("--write", write, "Rewrite the file in place");
  fmt->add_flag("--check", verify, "Exit 1 if the file is not canonical")->excludes(write_flag);

  std::string kind;
  std::string layer, scope, milestone;
  std::string format = "text";
  auto* view = app.add_subcommand("view", "Render an organizational view");
  view->add_option("path", path, "Document")->required();
  view->add_option("kind", kind, "scope-plan, milestone-list, milestone-io or layer-involvement")
      ->required();
  auto* layer_opt = view->add_option("--layer", layer, "Layer of the view subject");
  auto* scope_opt = view->add_option("--scope", scope, "Scope of the view subject");
  auto* milestone_opt = view->add_option("--milestone", milestone, "Milestone of the view subject");
  view->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  std::string addr = env_or("PROCPLAN_ADDR", "127.0.0.1:8080");
  std::string data_dir = env_or("PROCPLAN_DATA_DIR", "procplan-data");
  std::vector<std::string> users;
  auto* serve = app.add_subcommand("serve", "Run the HTTP document service");
  serve->add_option("--addr", addr, "Listen address HOST:PORT (env PROCPLAN_ADDR)");
  serve->add_option("--data-dir", data_dir, "Data directory (env PROCPLAN_DATA_DIR)");
  serve->add_option("--user", users, "Provision an account NAME:PASSWORD (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitUsage;
  }

  if (*check) return cmd_check(path, err);
  if (*fmt) return cmd_fmt(path, write, verify, out, err);
  if (*view) {
    std::map<std::string, std::string> params;
    if (*layer_opt) params["layer"] = layer;
    if (*scope_opt) params["scope"] = scope;
    if (*milestone_opt) params["milestone"] = milestone;
    return cmd_view(path, kind, params, format, out, err);
  }
  return cmd_serve(addr, data_dir, users, out, err);
}

}  // namespace procplan::cli
