#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "sbpm/engine.hpp"
#include "sbpm/notation.hpp"
#include "sbpm/persistence.hpp"

namespace httplib {
class Server;
}

namespace sbpm {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "sbpm-data";
  /// Idle instances older than this are dropped.
  std::chrono::seconds instance_ttl{3600};
};

/// Flags win over SBPM_LISTEN (host:port), SBPM_DATA_DIR and
/// SBPM_INSTANCE_TTL (seconds).
ServiceConfig config_from_env(ServiceConfig base = {});

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string content_type;
  std::string accept;
  /// Query parameters.
  std::map<std::string, std::string> params;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Document repository plus in-memory instances.
///
/// On disk:
///   <data_dir>/models/<id>.xml          document exactly as uploaded
///   <data_dir>/models/<id>.meta.json    {"created", "updated"}
///   <data_dir>/notations/<id>.xml
///   <data_dir>/notations/<id>.meta.json
/// Files are replaced by writing a temporary sibling and renaming it.
/// Instances live in memory only and are lost on restart.
class Service {
public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Transport-independent entry point; every route goes through here.
  HttpResponse handle(const HttpRequest& request);

  /// Routes every request of `server` to handle().
  void install(httplib::Server& server);

  const ServiceConfig& config() const noexcept {
    return config_;
  }

private:
  struct Instance;
  struct Stored {
    std::string document;
    std::string created;
    std::string updated;
  };

  HttpResponse put_document(const std::string& dir, const std::string& id,
                            const HttpRequest& req);
  std::optional<Stored> load(const std::string& dir, const std::string& id);
  ModelDocument load_model(const std::string& id);
  NotationDefinition load_notation(const std::string& id);
  std::shared_ptr<Instance> find_instance(const std::string& id);
  void sweep();

  HttpResponse validate_model(const std::string& id, const HttpRequest& req);
  HttpResponse explore_model(const std::string& id, const HttpRequest& req);
  HttpResponse create_instance(const HttpRequest& req);
  HttpResponse step_instance(const std::string& id, const HttpRequest& req);
  HttpResponse inject(const std::string& id, const HttpRequest& req);
  HttpResponse trace(const std::string& id, const HttpRequest& req);
  HttpResponse analyze_notation(const std::string& id);

  ServiceConfig config_;
  std::mutex repo_mutex_;
  std::map<std::string, std::vector<Violation>> validation_cache_;
  std::mutex instances_mutex_;
  std::map<std::string, std::shared_ptr<Instance>> instances_;
  std::uint64_t next_instance_ = 1;
};

} // namespace sbpm
