#pragma once

// HTTP API under /v1 over in-memory edit sessions, optionally journaled to a
// data directory. Routing is transport independent so it can be driven
// directly; serve() binds it to cpp-httplib.

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "sci/edit.hpp"
#include "sci/error.hpp"
#include "sci/instantiation.hpp"

namespace httplib {
class Server;
}

namespace sci::service {

struct Request {
  std::string method;
  std::string path;  // without query string
  std::string body;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";

  Json json() const { return Json::parse(body); }
};

struct ServiceOptions {
  // Sessions are journaled here (one directory per schema) when set.
  std::optional<std::filesystem::path> data_dir;
  // Where named induction fixtures are looked up.
  std::optional<std::filesystem::path> fixture_dir;
  EditOptions edit;
  instantiation::Stoplist stoplist = instantiation::Stoplist::defaults();
};

/// HTTP status for an error code.
int status_for(ErrorCode code) noexcept;

class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  /// Registers all routes on `server`.
  void mount(httplib::Server& server);

  std::size_t session_count() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::string register_session(SchemaDocument doc);
  void restore();
  void persist_initial(const std::string& id, const Session& session) const;
  void journal(const Session& session, const Json& line) const;

  Response create(const Request& request);
  Response get_document(Session& s);
  Response get_graph(Session& s);
  Response get_entities(Session& s);
  Response get_export(Session& s);
  Response get_validate(Session& s, const Request& request);
  Response get_log(Session& s);
  Response post_ops(Session& s, const Request& request);
  Response put_document(Session& s, const Request& request);
  Response post_undo(Session& s, bool redo);
  Response post_coverage(Session& s, const Request& request);
  Response run_induction(const Request& request);

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

/// Blocks serving `service` on host:port until the process is stopped.
/// Returns false if the socket could not be bound.
bool serve(Service& service, const std::string& host, int port);

}  // namespace sci::service
