#include "procplan/http_server.hpp"

#include <charconv>

#include "httplib.h"

namespace procplan {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_reply(httplib::Response& res, const Reply& reply, int ok_status = 200) {
  if (reply) {
    send(res, ok_status, *reply);
  } else {
    send(res, reply.error().status, reply.error().body());
  }
}

void bad_request(httplib::Response& res, const std::string& message) {
  send(res, 400, json{{"code", "BAD_REQUEST"}, {"message", message}});
}

std::string bearer_token(const httplib::Request& req) {
  std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() > kPrefix.size() && header.compare(0, kPrefix.size(), kPrefix) == 0) {
    return header.substr(kPrefix.size());
  }
  return {};
}

// Parsed JSON object body; an empty body is an empty object.
std::optional<json> object_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    bad_request(res, "request body must be a JSON object");
    return std::nullopt;
  }
  return body;
}

std::optional<std::string> opt_string(const json& body, const char* key, bool& ok) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    ok = false;
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<std::uint64_t> opt_revision(const json& body, bool& ok) {
  auto it = body.find("expected_revision");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) {
    ok = false;
    return std::nullopt;
  }
  return it->get<std::uint64_t>();
}

bool opt_flag(const json& body, const char* key, bool& ok) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return false;
  if (!it->is_boolean()) {
    ok = false;
    return false;
  }
  return it->get<bool>();
}

}  // namespace

std::optional<ListenAddress> parse_listen_address(const std::string& text) {
  ListenAddress out{"127.0.0.1", 0};
  std::string port_text = text;
  if (auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) out.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  if (port_text.empty()) return std::nullopt;
  auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), out.port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || out.port < 0 ||
      out.port > 65535) {
    return std::nullopt;
  }
  return out;
}

HttpServer::HttpServer(DocumentService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  // The library default adds SO_REUSEPORT, which would let a second server
  // silently share an occupied port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  install_routes();
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const ListenAddress& address) {
  if (address.port == 0) {
    port_ = server_->bind_to_any_port(address.host);
  } else {
    port_ = server_->bind_to_port(address.host, address.port) ? address.port : -1;
  }
  return port_ > 0;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

void HttpServer::wait_until_ready() { server_->wait_until_ready(); }

void HttpServer::install_routes() {
  auto& s = *server_;
  DocumentService& svc = service_;
  const std::string file = R"(/api/files/([A-Za-z0-9_.\-]+))";

  s.Post("/api/login", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = object_body(req, res);
    if (!body) return;
    bool ok = true;
    auto user = opt_string(*body, "username", ok);
    auto password = opt_string(*body, "password", ok);
    if (!ok || !user || !password) return bad_request(res, "username and password are required");
    send_reply(res, svc.login(*user, *password));
  });

  s.Get("/api/files", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_reply(res, svc.list_files(bearer_token(req)));
  });

  s.Post("/api/files", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = object_body(req, res);
    if (!body) return;
    bool ok = true;
    auto text = opt_string(*body, "text", ok);
    bool allow_invalid = opt_flag(*body, "allow_invalid", ok);
    if (!ok) return bad_request(res, "malformed 'text' or 'allow_invalid'");
    send_reply(res, svc.create_file(bearer_token(req), text, allow_invalid), 201);
  });

  s.Get(file, [&svc](const httplib::Request& req, httplib::Response& res) {
    send_reply(res, svc.get_file(bearer_token(req), req.matches[1]));
  });

  s.Put(file, [&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = object_body(req, res);
    if (!body) return;
    bool ok = true;
    auto text = opt_string(*body, "text", ok);
    auto revision = opt_revision(*body, ok);
    bool allow_invalid = opt_flag(*body, "allow_invalid", ok);
    if (!ok || !text || !revision) {
      return bad_request(res, "'text' and 'expected_revision' are required");
    }
    send_reply(res, svc.put_file(bearer_token(req), req.matches[1], *text, *revision,
                                 allow_invalid));
  });

  s.Post(file + "/commands", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = object_body(req, res);
    if (!body) return;
    bool ok = true;
    auto revision = opt_revision(*body, ok);
    auto commands = body->find("commands");
    if (!ok || !revision || commands == body->end() || !commands->is_array()) {
      return bad_request(res, "'expected_revision' and a 'commands' array are required");
    }
    send_reply(res, svc.apply_commands(bearer_token(req), req.matches[1], *revision, *commands));
  });

  for (bool is_undo : {true, false}) {
    s.Post(file + (is_undo ? "/undo" : "/redo"),
           [&svc, is_undo](const httplib::Request& req, httplib::Response& res) {
             auto body = object_body(req, res);
             if (!body) return;
             bool ok = true;
             auto revision = opt_revision(*body, ok);
             if (!ok) return bad_request(res, "malformed 'expected_revision'");
             std::string token = bearer_token(req);
             send_reply(res, is_undo ? svc.undo(token, req.matches[1], revision)
                                     : svc.redo(token, req.matches[1], revision));
           });
  }

  s.Get(file + "/draft", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_reply(res, svc.get_draft(bearer_token(req), req.matches[1]));
  });

  s.Put(file + "/draft", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = object_body(req, res);
    if (!body) return;
    bool ok = true;
    auto text = opt_string(*body, "text", ok);
    if (!ok || !text) return bad_request(res, "'text' is required");
    send_reply(res, svc.save_draft(bearer_token(req), req.matches[1], *text));
  });

  s.Delete(file + "/draft", [&svc](const httplib::Request& req, httplib::Response& res) {
    send_reply(res, svc.delete_draft(bearer_token(req), req.matches[1]));
  });

  s.Post(file + "/validate", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto body = object_body(req, res);
    if (!body) return;
    bool ok = true;
    auto text = opt_string(*body, "text", ok);
    if (!ok) return bad_request(res, "malformed 'text'");
    send_reply(res, svc.validate(bearer_token(req), req.matches[1], text));
  });

  s.Get(file + R"(/views/([A-Za-z\-]+))",
        [&svc](const httplib::Request& req, httplib::Response& res) {
          std::map<std::string, std::string> params;
          for (const char* key : {"layer", "scope", "milestone"}) {
            if (req.has_param(key)) params[key] = req.get_param_value(key);
          }
          send_reply(res, svc.get_view(bearer_token(req), req.matches[1], req.matches[2].str(),
                                       params));
        });

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send(res, 404, json{{"code", "NOT_FOUND"}, {"message", "no such endpoint"}});
    } else if (res.status == 405) {
      send(res, 405, json{{"code", "METHOD_NOT_ALLOWED"}, {"message", "method not allowed"}});
    }
  });

  s.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unexpected failure";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        send(res, 500, json{{"code", "INTERNAL"}, {"message", what}});
      });
}

}  // namespace procplan
