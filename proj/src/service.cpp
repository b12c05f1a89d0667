#include "sci/service.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "sci/error.hpp"
#include "sci/graph_view.hpp"
#include "sci/induction.hpp"
#include "sci/validate.hpp"

namespace fs = std::filesystem;

namespace sci::service {

struct Service::Session {
  Session(std::string id, EditSession s) : id(std::move(id)), edits(std::move(s)) {}

  std::string id;
  mutable std::shared_mutex mutex;
  EditSession edits;
  std::optional<fs::path> dir;
};

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::VersionConflict: return 409;
    case ErrorCode::MalformedJson:
    case ErrorCode::MissingRequiredKey:
    case ErrorCode::WrongType:
    case ErrorCode::DuplicateId:
    case ErrorCode::BadCommand:
    case ErrorCode::BadInput: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::BackendFailure:
    case ErrorCode::Io: return 500;
    default: return 422;
  }
}

namespace {

Response json_response(int status, const Json& body) { return {status, body.dump(2) + "\n", "application/json"}; }

Response error_response(int status, std::string_view code, const std::string& message,
                        const std::optional<std::string>& path = std::nullopt) {
  Json body = Json::object();
  body["code"] = std::string(code);
  body["message"] = message;
  if (path) body["path"] = *path;
  return json_response(status, body);
}

Response error_response(const Error& e) {
  std::optional<std::string> path;
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) path = pe->path();
  return error_response(status_for(e.code()), e.code_name(), e.what(), path);
}

Json parse_body(const std::string& body) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw ParseError(ErrorCode::MalformedJson, "", std::string("request body is not JSON: ") + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << bytes) || !out.flush()) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

std::optional<std::string> expected_version(const Request& request) {
  if (auto it = request.query.find("expect_version"); it != request.query.end()) return it->second;
  if (auto it = request.headers.find("if-match"); it != request.headers.end()) {
    std::string v = it->second;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    return v;
  }
  return std::nullopt;
}

bool truthy(const std::map<std::string, std::string>& query, const std::string& key) {
  auto it = query.find(key);
  return it != query.end() && (it->second == "1" || it->second == "true");
}

induction::InductionConfig induction_config(const Json& body) {
  induction::InductionConfig config;
  if (!body.contains("config")) return config;
  const Json& c = body.at("config");
  if (!c.is_object()) throw Error(ErrorCode::BadInput, "config must be an object");
  auto number = [&](const char* key, double& into) {
    if (!c.contains(key)) return;
    if (!c.at(key).is_number()) throw Error(ErrorCode::BadInput, std::string(key) + " must be a number");
    into = c.at(key).get<double>();
  };
  number("edge_threshold", config.edge_threshold);
  number("grounding_threshold", config.grounding_threshold);
  if (c.contains("expansion_depth")) {
    if (!c.at("expansion_depth").is_number_integer()) throw Error(ErrorCode::BadInput, "expansion_depth must be an integer");
    config.expansion_depth = c.at("expansion_depth").get<int>();
  }
  return config;
}

std::vector<std::string> string_list(const Json& body, const char* key, bool required) {
  std::vector<std::string> out;
  if (!body.contains(key)) {
    if (required) throw Error(ErrorCode::BadInput, std::string("missing '") + key + "'");
    return out;
  }
  const Json& list = body.at(key);
  if (!list.is_array()) throw Error(ErrorCode::BadInput, std::string(key) + " must be an array of strings");
  for (const auto& item : list) {
    if (!item.is_string()) throw Error(ErrorCode::BadInput, std::string(key) + " must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.data_dir) {
    std::error_code ec;
    fs::create_directories(*options_.data_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create data dir " + options_.data_dir->string());
    restore();
  }
}

Service::~Service() = default;

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no schema session '" + id + "'");
  return it->second;
}

std::string Service::register_session(SchemaDocument doc) {
  std::string id = "s" + std::to_string(next_id_++);
  auto session = std::make_shared<Session>(id, EditSession(std::move(doc), options_.edit));
  if (options_.data_dir) {
    session->dir = *options_.data_dir / id;
    persist_initial(id, *session);
  }
  std::unique_lock lock(sessions_mutex_);
  sessions_.emplace(id, std::move(session));
  return id;
}

void Service::persist_initial(const std::string& id, const Session& session) const {
  std::error_code ec;
  fs::create_directories(*session.dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create session dir for '" + id + "'");
  write_file(*session.dir / "initial.json", serialize_schema(session.edits.initial()));
  write_file(*session.dir / "log.jsonl", "");
}

void Service::journal(const Session& session, const Json& line) const {
  if (!session.dir) return;
  std::ofstream out(*session.dir / "log.jsonl", std::ios::binary | std::ios::app);
  if (!out || !(out << line.dump() << "\n") || !out.flush())
    throw Error(ErrorCode::Io, "cannot append to journal of '" + session.id + "'");
}

void Service::restore() {
  std::uint64_t max_seen = 0;
  for (const auto& entry : fs::directory_iterator(*options_.data_dir)) {
    if (!entry.is_directory()) continue;
    const std::string id = entry.path().filename().string();
    try {
      EditSession edits(parse_schema(read_file(entry.path() / "initial.json")), options_.edit);
      std::istringstream log(fs::exists(entry.path() / "log.jsonl") ? read_file(entry.path() / "log.jsonl") : "");
      std::string line;
      while (std::getline(log, line)) {
        if (line.empty()) continue;
        Json value = Json::parse(line);
        const std::string op = value.value("op", "");
        if (op == "undo") {
          edits.undo();
        } else if (op == "redo") {
          edits.redo();
        } else {
          edits.apply(parse_envelope(value).command);
        }
      }
      auto session = std::make_shared<Session>(id, std::move(edits));
      session->dir = entry.path();
      sessions_.emplace(id, std::move(session));
      if (id.size() > 1 && id[0] == 's' && std::all_of(id.begin() + 1, id.end(), ::isdigit))
        max_seen = std::max<std::uint64_t>(max_seen, std::stoull(id.substr(1)));
    } catch (const std::exception& e) {
      std::cerr << "skipping session " << id << ": " << e.what() << "\n";
    }
  }
  next_id_ = max_seen + 1;
}

// ---------------------------------------------------------------------------
// routing

Response Service::handle(const Request& request) {
  static const std::regex schema_route(R"(^/v1/schemas/([^/]+)(?:/([a-z]+))?/?$)");
  try {
    const std::string& m = request.method;
    if (request.path == "/v1/schemas" || request.path == "/v1/schemas/") {
      if (m == "POST") return create(request);
      if (m == "GET") {
        Json list = Json::array();
        std::shared_lock lock(sessions_mutex_);
        for (const auto& [id, s] : sessions_) list.push_back(id);
        return json_response(200, Json{{"schemas", list}});
      }
    } else if (request.path == "/v1/induction/run") {
      if (m == "POST") return run_induction(request);
    } else if (request.path == "/v1/health") {
      if (m == "GET") return json_response(200, Json{{"status", "ok"}});
    } else if (std::smatch match; std::regex_match(request.path, match, schema_route)) {
      auto session = find(match[1]);
      const std::string sub = match[2];
      if (m == "GET") {
        if (sub.empty()) return get_document(*session);
        if (sub == "graph") return get_graph(*session);
        if (sub == "entities") return get_entities(*session);
        if (sub == "export") return get_export(*session);
        if (sub == "validate") return get_validate(*session, request);
        if (sub == "log") return get_log(*session);
      } else if (m == "POST") {
        if (sub == "ops") return post_ops(*session, request);
        if (sub == "undo") return post_undo(*session, false);
        if (sub == "redo") return post_undo(*session, true);
        if (sub == "coverage") return post_coverage(*session, request);
      } else if (m == "PUT" && sub == "document") {
        return put_document(*session, request);
      }
    } else {
      return error_response(404, to_string(ErrorCode::NotFound), "no route for " + request.path);
    }
    return error_response(405, to_string(ErrorCode::NotFound), "no route for " + m + " " + request.path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const Json::exception& e) {
    return error_response(400, to_string(ErrorCode::BadInput), e.what());
  } catch (const std::exception& e) {
    return error_response(500, to_string(ErrorCode::Io), e.what());
  }
}

Response Service::create(const Request& request) {
  SchemaDocument doc = parse_schema(request.body);
  auto report = validate(doc, {options_.edit.strict});
  std::string version = doc.doc_version;
  std::string id = register_session(std::move(doc));
  return json_response(201, Json{{"schema_id", id}, {"doc_version", version}, {"report", report.to_json()}});
}

Response Service::get_document(Session& s) {
  std::shared_lock lock(s.mutex);
  Json body = Json::object();
  body["schema_id"] = s.id;
  body["doc_version"] = s.edits.version();
  body["can_undo"] = s.edits.can_undo();
  body["can_redo"] = s.edits.can_redo();
  body["document"] = to_json(s.edits.document());
  return json_response(200, body);
}

Response Service::get_graph(Session& s) {
  std::shared_lock lock(s.mutex);
  Json body = build_graph_view(s.edits.document()).to_json();
  body["doc_version"] = s.edits.version();
  return json_response(200, body);
}

Response Service::get_entities(Session& s) {
  std::shared_lock lock(s.mutex);
  return json_response(200, Json{{"doc_version", s.edits.version()}, {"entities", to_json(list_entities(s.edits.document()))}});
}

Response Service::get_export(Session& s) {
  std::shared_lock lock(s.mutex);
  return {200, serialize_schema(s.edits.document()), "application/json"};
}

Response Service::get_validate(Session& s, const Request& request) {
  std::shared_lock lock(s.mutex);
  bool strict = options_.edit.strict || truthy(request.query, "strict");
  auto report = validate(s.edits.document(), {strict});
  return json_response(200, Json{{"doc_version", s.edits.version()}, {"report", report.to_json()}});
}

Response Service::get_log(Session& s) {
  std::shared_lock lock(s.mutex);
  Json entries = Json::array();
  for (const auto& e : s.edits.log()) {
    Json item = to_json(e.command);
    item["version"] = e.version;
    entries.push_back(std::move(item));
  }
  return json_response(200, Json{{"doc_version", s.edits.version()}, {"log", entries}});
}

Response Service::post_ops(Session& s, const Request& request) {
  Envelope env = parse_envelope(parse_body(request.body));
  if (!env.expect_version) env.expect_version = expected_version(request);
  std::unique_lock lock(s.mutex);
  ApplyResult result = s.edits.apply(env.command, env.expect_version);
  try {
    journal(s, to_json(s.edits.log().back().command));
  } catch (const Error&) {
    s.edits.undo();
    throw;
  }
  auto report = validate(s.edits.document(), {options_.edit.strict});
  return json_response(200, Json{{"doc_version", s.edits.version()},
                                 {"created_ids", result.created_ids},
                                 {"report", report.to_json()}});
}

Response Service::put_document(Session& s, const Request& request) {
  EditCommand command{ReplaceDocumentArgs{request.body}, 0};
  std::unique_lock lock(s.mutex);
  s.edits.apply(command, expected_version(request));
  try {
    journal(s, to_json(s.edits.log().back().command));
  } catch (const Error&) {
    s.edits.undo();
    throw;
  }
  auto report = validate(s.edits.document(), {options_.edit.strict});
  return json_response(200, Json{{"doc_version", s.edits.version()}, {"report", report.to_json()}});
}

Response Service::post_undo(Session& s, bool redo) {
  std::unique_lock lock(s.mutex);
  if (redo) s.edits.redo();
  else s.edits.undo();
  try {
    journal(s, Json{{"op", redo ? "redo" : "undo"}});
  } catch (const Error&) {
    if (redo) s.edits.undo();
    else s.edits.redo();
    throw;
  }
  return json_response(200, Json{{"doc_version", s.edits.version()},
                                 {"can_undo", s.edits.can_undo()},
                                 {"can_redo", s.edits.can_redo()}});
}

Response Service::post_coverage(Session& s, const Request& request) {
  Json body = parse_body(request.body);
  instantiation::MatcherConfig config;
  instantiation::Stoplist stoplist = options_.stoplist;
  Json instances = body;
  if (body.is_object()) {
    if (!body.contains("instances")) throw Error(ErrorCode::BadInput, "missing 'instances'");
    instances = body.at("instances");
    if (body.contains("tau")) {
      if (!body.at("tau").is_number()) throw Error(ErrorCode::BadInput, "tau must be a number");
      config.tau = body.at("tau").get<double>();
    }
    if (body.contains("include_descriptions")) config.include_descriptions = body.at("include_descriptions").get<bool>();
    if (body.contains("stoplist")) {
      stoplist.lemmas.clear();
      for (const auto& w : string_list(body, "stoplist", true)) stoplist.lemmas.insert(w);
    }
  }
  auto parsed = instantiation::parse_instances(instances);
  std::shared_lock lock(s.mutex);
  auto report = instantiation::run_pipeline(s.edits.document(), parsed, stoplist, config);
  return json_response(200, report.to_json());
}

Response Service::run_induction(const Request& request) {
  Json body = parse_body(request.body);
  if (!body.is_object()) throw Error(ErrorCode::BadInput, "induction request must be an object");
  induction::InductionInput input;
  if (!body.contains("scenario") || !body.at("scenario").is_string())
    throw Error(ErrorCode::BadInput, "missing 'scenario'");
  input.scenario_name = body.at("scenario").get<std::string>();
  input.chapters = string_list(body, "chapters", true);
  input.articles = string_list(body, "articles", false);

  if (!body.contains("fixture")) throw Error(ErrorCode::BadInput, "missing 'fixture'");
  Json fixture;
  const Json& ref = body.at("fixture");
  if (ref.is_object()) {
    fixture = ref;
  } else if (ref.is_string()) {
    static const std::regex safe_name(R"(^[A-Za-z0-9_.-]+$)");
    const std::string name = ref.get<std::string>();
    if (!std::regex_match(name, safe_name) || name.find("..") != std::string::npos)
      throw Error(ErrorCode::BadInput, "fixture name '" + name + "' is not a plain file name");
    if (!options_.fixture_dir) throw Error(ErrorCode::FixtureMiss, "no fixture directory configured");
    fs::path path = *options_.fixture_dir / name;
    if (!fs::exists(path)) path += ".json";
    if (!fs::exists(path)) throw Error(ErrorCode::FixtureMiss, "fixture '" + name + "' not found");
    fixture = parse_body(read_file(path));
  } else {
    throw Error(ErrorCode::BadInput, "fixture must be a name or an object");
  }

  std::optional<induction::QnodeCatalog> catalog;
  if (body.contains("catalog")) catalog = induction::QnodeCatalog::from_json(body.at("catalog"));

  induction::StubBackend backend(std::move(fixture));
  SchemaDocument doc = induction::induce(backend, input, induction_config(body), catalog ? &*catalog : nullptr);
  auto report = validate(doc, {options_.edit.strict});
  Json document = to_json(doc);
  std::string version = doc.doc_version;
  std::string id = register_session(std::move(doc));
  return json_response(201, Json{{"schema_id", id},
                                 {"doc_version", version},
                                 {"document", std::move(document)},
                                 {"report", report.to_json()}});
}

// ---------------------------------------------------------------------------
// transport

void Service::mount(httplib::Server& server) {
  auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      r.headers.emplace(key, v);
    }
    Response out = handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/.*)", bridge);
  server.Post(R"(/.*)", bridge);
  server.Put(R"(/.*)", bridge);
  server.Delete(R"(/.*)", bridge);
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  return server.listen(host, port);
}

}  // namespace sci::service
