#include "ipr/api/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ipr/error.hpp"

namespace ipr::api {

namespace {

constexpr std::string_view kBearer = "Bearer ";

Request translate(const httplib::Request& in) {
  Request out;
  out.method = in.method;
  out.path = in.path;
  for (const auto& [key, value] : in.params) out.query.emplace(key, value);
  const auto auth = in.get_header_value("Authorization");
  if (auth.starts_with(kBearer)) out.bearer = auth.substr(kBearer.size());
  out.body = in.body;
  return out;
}

void send(httplib::Response& res, const Response& response) {
  res.status = response.status;
  res.set_content(response.body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                  "application/json");
}

}  // namespace

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const auto response = service_.handle(translate(req));
    if (response.status >= 500) {
      spdlog::warn("{} {} -> {}", req.method, req.path, response.status);
    } else {
      spdlog::debug("{} {} -> {}", req.method, req.path, response.status);
    }
    send(res, response);
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  server_->Put(".*", handler);
  server_->Delete(".*", handler);
  server_->Patch(".*", handler);
  server_->set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr) {
    spdlog::error("{} {}: unhandled exception", req.method, req.path);
    send(res, {500, {{"error", "Internal"}, {"message", "internal error"}}});
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace ipr::api
