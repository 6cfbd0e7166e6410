#pragma once

// HTTP/1.1 JSON binding of DocumentService.
//
//   POST   /api/login                          {username, password}
//   GET    /api/files
//   POST   /api/files                          {text?, allow_invalid?}
//   GET    /api/files/{id}
//   PUT    /api/files/{id}                     {text, expected_revision, allow_invalid?}
//   POST   /api/files/{id}/commands            {expected_revision, commands: [...]}
//   POST   /api/files/{id}/undo                {expected_revision?}
//   POST   /api/files/{id}/redo                {expected_revision?}
//   GET    /api/files/{id}/draft
//   PUT    /api/files/{id}/draft               {text}
//   DELETE /api/files/{id}/draft
//   POST   /api/files/{id}/validate            {text?}
//   GET    /api/files/{id}/views/{kind}?layer=&scope=&milestone=
//
// Authentication uses `Authorization: Bearer <token>`. Errors are JSON
// objects {code, message, diagnostics?}.

#include <memory>
#include <optional>
#include <string>

#include "procplan/service.hpp"

namespace httplib {
class Server;
}

namespace procplan {

struct ListenAddress {
  std::string host;
  int port = 0;
};

// "host:port", ":port" or "port". Port 0 picks an ephemeral port.
std::optional<ListenAddress> parse_listen_address(const std::string& text);

class HttpServer {
 public:
  explicit HttpServer(DocumentService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // False when the address cannot be bound.
  bool bind(const ListenAddress& address);
  int port() const { return port_; }

  // Serves until stop(); returns after in-flight requests have completed.
  void run();
  void stop();
  void wait_until_ready();

 private:
  void install_routes();

  DocumentService& service_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
};

}  // namespace procplan
