#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "sbpm/service.hpp"

int main(int argc, char** argv) {
  auto config = sbpm::config_from_env();
  std::string listen = config.host + ":" + std::to_string(config.port);
  long long ttl = config.instance_ttl.count();
  std::string data_dir = config.data_dir.string();

  CLI::App app{"HTTP service for process models and instances", "sbpm-server"};
  app.add_option("--listen", listen, "host:port")->capture_default_str();
  app.add_option("--data-dir", data_dir, "Repository directory")
    ->capture_default_str();
  app.add_option("--ttl", ttl, "Idle instance lifetime in seconds")
    ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "--listen must be host:port\n";
    return 1;
  }
  config.host = listen.substr(0, colon);
  config.port = std::stoi(listen.substr(colon + 1));
  config.data_dir = data_dir;
  config.instance_ttl = std::chrono::seconds{ttl};

  sbpm::Service service{config};
  httplib::Server server;
  service.install(server);
  std::cerr << "listening on " << config.host << ":" << config.port
            << ", data in " << config.data_dir << "\n";
  if (!server.listen(config.host, config.port)) {
    std::cerr << "cannot listen on " << listen << "\n";
    return 1;
  }
}
