// ipr_server: HTTP/JSON service for running peer review courses.
//
//   ipr_server --config server.conf
//   ipr_server --print-routes > docs/api.md

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>
#include <thread>

#include "ipr/api/config.hpp"
#include "ipr/api/http_server.hpp"
#include "ipr/api/routes.hpp"
#include "ipr/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Peer review course service"};
  std::string config_file;
  bool print_routes = false;
  app.add_option("--config", config_file, "key=value config file; PORT, DATA_DIR, LOG_LEVEL, ADMIN_TOKEN override it");
  app.add_flag("--print-routes", print_routes, "Print the endpoint reference as Markdown and exit");
  CLI11_PARSE(app, argc, argv);

  if (print_routes) {
    std::cout << ipr::api::routes_markdown();
    return 0;
  }

  try {
    const auto config = ipr::api::load_config(
        config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file));
    spdlog::set_level(spdlog::level::from_str(config.log_level));

    // Block termination signals before any thread starts; one thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ipr::api::ServiceOptions options;
    options.data_dir = config.data_dir;
    options.admin_token = config.admin_token;
    options.token_ttl = std::chrono::hours{config.token_ttl_hours};
    options.durability = config.fsync ? ipr::store::Durability::Fsync : ipr::store::Durability::Flush;
    ipr::api::Service service(options);
    ipr::api::HttpServer server(service);
    const int port = server.bind(config.host, config.port);
    spdlog::info("listening on {}:{} (data in {})", config.host, port, config.data_dir.string());

    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      spdlog::info("signal {}, shutting down", sig);
      server.stop();
    });
    server.run();
    pthread_kill(waiter.native_handle(), SIGTERM);  // no-op if it already returned
    waiter.join();
  } catch (const ipr::Error& e) {
    spdlog::error("{}: {}", ipr::to_string(e.code()), e.what());
    return 2;
  }
  return 0;
}
