#pragma once

#include <memory>
#include <string>

#include "ipr/api/service.hpp"

namespace httplib {
class Server;
}

namespace ipr::api {

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the bound
  /// port. Throws Error(IoFailure) if the socket cannot be bound.
  int bind(const std::string& host, int port);

  /// Serves until stop() is called from another thread.
  void run();
  void stop();
  /// Blocks until run() has started accepting.
  void wait_until_ready() const;

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ipr::api
