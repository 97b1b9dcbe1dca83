#include "sbpm/service.hpp"

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "sbpm/api.hpp"

namespace sbpm {

namespace fs = std::filesystem;
using api::json;

ServiceConfig config_from_env(ServiceConfig base) {
  if (const char* listen = std::getenv("SBPM_LISTEN")) {
    std::string v = listen;
    auto colon = v.rfind(':');
    if (colon == std::string::npos)
      throw Error("BadConfig", "SBPM_LISTEN must be host:port", v);
    base.host = v.substr(0, colon);
    base.port = std::atoi(v.c_str() + colon + 1);
  }
  if (const char* dir = std::getenv("SBPM_DATA_DIR"))
    base.data_dir = dir;
  if (const char* ttl = std::getenv("SBPM_INSTANCE_TTL"))
    base.instance_ttl = std::chrono::seconds{std::atoll(ttl)};
  return base;
}

struct Service::Instance {
  Instance(std::shared_ptr<const ProcessModel> m, SchedulerConfig c)
    : instance(ProcessInstance::instantiate(std::move(m), std::move(c))) {
    touch();
  }

  void touch() {
    last_used = std::chrono::steady_clock::now().time_since_epoch().count();
  }

  std::mutex mutex;
  ProcessInstance instance;
  std::atomic<std::chrono::steady_clock::rep> last_used{0};
};

namespace {

const std::regex id_pattern{"[A-Za-z0-9][A-Za-z0-9_.-]{0,127}"};

std::string now_utc() {
  auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out)
      throw Error("StorageFailure", "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int status_for(const std::string& code) {
  static const std::map<std::string, int> table = {
    {"NotFound", 404},          {"UnknownModel", 404},
    {"UnknownNotation", 404},   {"UnknownInstance", 404},
    {"UnknownSubject", 404},    {"MethodNotAllowed", 405},
    {"NotExternal", 409},       {"NoSuchChannel", 409},
    {"SemanticViolation", 422}, {"ModelInvalid", 422},
    {"IdMismatch", 422},        {"BadMultiplicity", 422},
    {"BadBounds", 422},         {"InvalidPayload", 422},
    {"BoundsExceeded", 422},    {"StorageFailure", 500},
  };
  auto it = table.find(code);
  return it == table.end() ? 400 : it->second;
}

HttpResponse json_response(int status, const json& body) {
  return {status, "application/json", body.dump(2) + "\n"};
}

HttpResponse error_response(const Error& e) {
  auto body = api::error_json(e.code(), e.what(), e.details());
  if (auto* sv = dynamic_cast<const SemanticViolationError*>(&e))
    body["violations"] = api::to_json(sv->violations());
  return json_response(status_for(e.code()), body);
}

json parse_body(const HttpRequest& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos)
    return nullptr;
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded())
    throw Error("BadRequest", "request body is not valid JSON");
  return j;
}

bool wants(const HttpRequest& req, std::string_view type) {
  return req.accept.find(type) != std::string::npos;
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty())
        out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    out.push_back(std::move(cur));
  return out;
}

void check_id(const std::string& id) {
  if (!std::regex_match(id, id_pattern))
    throw Error("BadId", "ids are 1-128 characters of [A-Za-z0-9_.-] "
                         "starting with a letter or digit",
                id);
}

} // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  fs::create_directories(config_.data_dir / "models");
  fs::create_directories(config_.data_dir / "notations");
}

Service::~Service() = default;

std::optional<Service::Stored> Service::load(const std::string& dir,
                                             const std::string& id) {
  auto base = config_.data_dir / dir;
  auto doc = read_file(base / (id + ".xml"));
  if (!doc)
    return std::nullopt;
  Stored s{*doc, {}, {}};
  if (auto meta = read_file(base / (id + ".meta.json"))) {
    auto j = json::parse(*meta, nullptr, false);
    if (j.is_object()) {
      s.created = j.value("created", "");
      s.updated = j.value("updated", "");
    }
  }
  return s;
}

ModelDocument Service::load_model(const std::string& id) {
  check_id(id);
  std::optional<Stored> s;
  {
    std::lock_guard lock{repo_mutex_};
    s = load("models", id);
  }
  if (!s)
    throw Error("UnknownModel", "no model '" + id + "'", id);
  return from_xml(s->document);
}

NotationDefinition Service::load_notation(const std::string& id) {
  check_id(id);
  std::optional<Stored> s;
  {
    std::lock_guard lock{repo_mutex_};
    s = load("notations", id);
  }
  if (!s)
    throw Error("UnknownNotation", "no notation '" + id + "'", id);
  return notation_from_xml(s->document);
}

HttpResponse Service::put_document(const std::string& dir,
                                   const std::string& id,
                                   const HttpRequest& req) {
  auto document = req.content_type.find("json") != std::string::npos
                    ? json_to_xml(req.body)
                    : req.body;
  std::string inner_id;
  if (dir == "models")
    inner_id = from_xml(document).model.id;
  else
    inner_id = notation_from_xml(document).id;
  if (inner_id != id)
    throw Error("IdMismatch",
                "document id '" + inner_id + "' does not match '" + id + "'",
                inner_id);

  std::lock_guard lock{repo_mutex_};
  auto base = config_.data_dir / dir;
  auto existing = load(dir, id);
  auto stamp = now_utc();
  Stored s{document, existing ? existing->created : stamp, stamp};
  if (!existing || existing->document != document)
    write_atomically(base / (id + ".xml"), document);
  json meta = {{"created", s.created}, {"updated", s.updated}};
  write_atomically(base / (id + ".meta.json"), meta.dump(2) + "\n");
  if (dir == "models")
    validation_cache_.erase(id);
  return json_response(existing ? 200 : 201,
                       {{"id", id},
                        {"created", s.created},
                        {"updated", s.updated}});
}

HttpResponse Service::validate_model(const std::string& id,
                                     const HttpRequest& req) {
  auto notation_id = req.params.count("notation") ? req.params.at("notation")
                                                  : std::string{};
  if (notation_id.empty()) {
    std::lock_guard lock{repo_mutex_};
    if (auto it = validation_cache_.find(id); it != validation_cache_.end())
      return json_response(200, api::validation_json(it->second));
  }
  auto doc = load_model(id);
  auto notation = notation_id.empty() ? sbpm_default_notation()
                                      : load_notation(notation_id);
  auto violations = api::validate(doc, notation);
  if (notation_id.empty()) {
    std::lock_guard lock{repo_mutex_};
    validation_cache_[id] = violations;
  }
  return json_response(200, api::validation_json(violations));
}

HttpResponse Service::explore_model(const std::string& id,
                                    const HttpRequest& req) {
  auto body = parse_body(req);
  ExplorationBounds bounds;
  ExplorationOptions options;
  api::read_exploration(body, bounds, options);
  auto doc = load_model(id);
  return json_response(200, api::to_json(state_space(doc.model, bounds, options)));
}

HttpResponse Service::create_instance(const HttpRequest& req) {
  auto body = parse_body(req);
  if (!body.is_object() || !body.contains("model")
      || !body["model"].is_string())
    throw Error("BadRequest", "body needs a \"model\" id");
  auto config = api::read_scheduler(body);
  auto model = std::make_shared<const ProcessModel>(
    load_model(body["model"].get<std::string>()).model);
  auto inst = std::make_shared<Instance>(model, std::move(config));
  sweep();
  std::string id;
  {
    std::lock_guard lock{instances_mutex_};
    id = "i" + std::to_string(next_instance_++);
    instances_[id] = inst;
  }
  return json_response(201,
                       {{"id", id},
                        {"status", std::string{to_string(inst->instance.status())}}});
}

std::shared_ptr<Service::Instance> Service::find_instance(const std::string& id) {
  sweep();
  std::lock_guard lock{instances_mutex_};
  auto it = instances_.find(id);
  if (it == instances_.end())
    throw Error("UnknownInstance", "no instance '" + id + "'", id);
  it->second->touch();
  return it->second;
}

void Service::sweep() {
  auto now = std::chrono::steady_clock::now().time_since_epoch();
  auto ttl = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
    config_.instance_ttl);
  std::lock_guard lock{instances_mutex_};
  for (auto it = instances_.begin(); it != instances_.end();) {
    auto idle = now - std::chrono::steady_clock::duration{it->second->last_used};
    if (idle > ttl)
      it = instances_.erase(it);
    else
      ++it;
  }
}

HttpResponse Service::step_instance(const std::string& id,
                                    const HttpRequest& req) {
  auto body = parse_body(req);
  std::uint64_t steps = 1;
  if (body.is_object() && body.contains("steps")) {
    if (!body["steps"].is_number_unsigned())
      throw Error("BadRequest", "\"steps\" must be a non-negative integer");
    steps = body["steps"].get<std::uint64_t>();
  }
  auto inst = find_instance(id);
  std::lock_guard lock{inst->mutex};
  auto& pi = inst->instance;
  auto before = pi.trace().events.size();
  pi.advance(steps);
  json events = json::array();
  for (auto i = before; i < pi.trace().events.size(); ++i)
    events.push_back(api::to_json(pi.trace().events[i]));
  return json_response(200, {{"status", std::string{to_string(pi.status())}},
                             {"clock", pi.clock()},
                             {"steps", pi.steps()},
                             {"events", events}});
}

HttpResponse Service::inject(const std::string& id, const HttpRequest& req) {
  auto body = parse_body(req);
  auto field = [&](const char* key) {
    if (!body.is_object() || !body.contains(key) || !body[key].is_string())
      throw Error("BadRequest", std::string{"body needs a string \""} + key
                                  + "\"");
    return body[key].get<std::string>();
  };
  auto from = field("from");
  auto to = field("to");
  auto message = field("message");
  Payload payload;
  if (body.contains("payload")) {
    if (!body["payload"].is_object())
      throw Error("BadRequest", "\"payload\" must be an object");
    for (auto& [k, v] : body["payload"].items()) {
      if (!v.is_string())
        throw Error("BadRequest", "payload values must be strings");
      payload[k] = v.get<std::string>();
    }
  }
  auto inst = find_instance(id);
  std::lock_guard lock{inst->mutex};
  auto& pi = inst->instance;
  pi.inject_message(from, to, message, std::move(payload));
  return json_response(202,
                       {{"status", std::string{to_string(pi.status())}},
                        {"event", api::to_json(pi.trace().events.back())}});
}

HttpResponse Service::trace(const std::string& id, const HttpRequest& req) {
  auto inst = find_instance(id);
  TraceDocument doc;
  {
    std::lock_guard lock{inst->mutex};
    auto& pi = inst->instance;
    doc = {pi.trace(), pi.status(), pi.clock()};
  }
  if (wants(req, "text/plain"))
    return {200, "text/plain", to_lines(doc.trace)};
  auto xml = trace_to_xml(doc);
  if (wants(req, "application/json"))
    return {200, "application/json", xml_to_json(xml)};
  return {200, "application/xml", xml};
}

HttpResponse Service::analyze_notation(const std::string& id) {
  auto n = load_notation(id);
  return json_response(200, api::to_json(ontological_analysis(n), design_lints(n)));
}

HttpResponse Service::handle(const HttpRequest& req) {
  try {
    auto seg = segments(req.path);
    auto method_not_allowed = [&] {
      return error_response(Error("MethodNotAllowed",
                                  req.method + " is not supported on "
                                    + req.path));
    };
    if (seg.size() >= 2
        && (seg[0] == "models" || seg[0] == "notations"
            || seg[0] == "instances"))
      check_id(seg[1]);

    if (seg.size() == 2 && (seg[0] == "models" || seg[0] == "notations")) {
      if (req.method == "PUT")
        return put_document(seg[0], seg[1], req);
      if (req.method != "GET")
        return method_not_allowed();
      std::optional<Stored> s;
      {
        std::lock_guard lock{repo_mutex_};
        s = load(seg[0], seg[1]);
      }
      if (!s)
        throw Error(seg[0] == "models" ? "UnknownModel" : "UnknownNotation",
                    "no document '" + seg[1] + "'", seg[1]);
      if (wants(req, "application/json"))
        return {200, "application/json", xml_to_json(s->document)};
      return {200, "application/xml", s->document};
    }
    if (seg.size() == 3 && seg[0] == "models") {
      if (req.method != "POST")
        return method_not_allowed();
      if (seg[2] == "validate")
        return validate_model(seg[1], req);
      if (seg[2] == "explore")
        return explore_model(seg[1], req);
    }
    if (seg.size() == 3 && seg[0] == "notations" && seg[2] == "analyze") {
      if (req.method != "POST")
        return method_not_allowed();
      return analyze_notation(seg[1]);
    }
    if (seg.size() == 1 && seg[0] == "instances") {
      if (req.method != "POST")
        return method_not_allowed();
      return create_instance(req);
    }
    if (seg.size() == 3 && seg[0] == "instances") {
      if (seg[2] == "trace")
        return req.method == "GET" ? trace(seg[1], req) : method_not_allowed();
      if (req.method != "POST")
        return method_not_allowed();
      if (seg[2] == "step")
        return step_instance(seg[1], req);
      if (seg[2] == "messages")
        return inject(seg[1], req);
    }
    throw Error("NotFound", "no route for " + req.path, req.path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return json_response(500, api::error_json("Internal", e.what(), ""));
  }
}

void Service::install(httplib::Server& server) {
  auto forward = [this](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req{in.method,
                    in.path,
                    in.body,
                    in.get_header_value("Content-Type"),
                    in.get_header_value("Accept"),
                    {}};
    for (auto& [k, v] : in.params)
      req.params[k] = v;
    auto res = handle(req);
    out.status = res.status;
    out.set_content(res.body, res.content_type);
  };
  server.Get(".*", forward);
  server.Put(".*", forward);
  server.Post(".*", forward);
  server.Delete(".*", forward);
}

} // namespace sbpm
