#include "sci/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sci/edit.hpp"
#include "sci/error.hpp"
#include "sci/graph_view.hpp"
#include "sci/induction.hpp"
#include "sci/instantiation.hpp"
#include "sci/service.hpp"
#include "sci/validate.hpp"

namespace fs = std::filesystem;

namespace sci::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(ErrorCode::MalformedJson, "", path + ": " + e.what());
  }
}

void report_error(std::ostream& err, const Error& e) {
  err << "error: " << e.code_name();
  if (auto* pe = dynamic_cast<const ParseError*>(&e); pe && !pe->path().empty()) err << " at " << pe->path();
  err << ": " << e.what() << "\n";
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream in(item);
    std::string part;
    while (std::getline(in, part, ',')) {
      auto first = part.find_first_not_of(' ');
      auto last = part.find_last_not_of(' ');
      if (first != std::string::npos) out.push_back(part.substr(first, last - first + 1));
    }
  }
  return out;
}

int cmd_validate(const std::string& file, bool strict, bool as_json, std::ostream& out) {
  SchemaDocument doc = parse_schema(read_file(file));
  auto report = validate(doc, {strict});
  if (as_json) {
    out << report.to_json().dump(2) << "\n";
  } else {
    for (const auto& v : report.violations) out << to_string(v.code) << "\t" << v.element_id << "\t" << v.message << "\n";
  }
  bool failed = report.has_errors() || (strict && !report.empty());
  return failed ? kInvalid : kOk;
}

int cmd_stats(const std::string& dir, bool as_json, std::ostream& out) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<SchemaDocument> library;
  for (const auto& f : files) library.push_back(parse_schema(read_file(f.string())));
  auto stats = instantiation::coverage_stats(library);
  if (as_json) out << stats.to_json().dump(2) << "\n";
  else out << instantiation::render_table(stats);
  return kOk;
}

struct InduceFlags {
  std::string scenario;
  std::vector<std::string> chapters;
  std::string fixture;
  std::string catalog;
  std::vector<std::string> articles;
  induction::InductionConfig config;
  bool serial = false;
};

int cmd_induce(const InduceFlags& f, std::ostream& out) {
  induction::InductionInput input{f.scenario, split_list(f.chapters), {}};
  for (const auto& a : f.articles) input.articles.push_back(read_file(a));
  std::optional<induction::QnodeCatalog> catalog;
  if (!f.catalog.empty()) catalog = induction::QnodeCatalog::from_json(read_json(f.catalog));
  induction::StubBackend backend(read_json(f.fixture));
  auto config = f.config;
  config.parallel_chapters = !f.serial;
  out << serialize_schema(induction::induce(backend, input, config, catalog ? &*catalog : nullptr));
  return kOk;
}

struct CoverageFlags {
  std::string schema;
  std::string instances;
  double tau = 0.7;
  std::string stoplist;
  bool include_descriptions = false;
};

int cmd_coverage(const CoverageFlags& f, std::ostream& out) {
  SchemaDocument doc = parse_schema(read_file(f.schema));
  auto instances = instantiation::parse_instances(read_json(f.instances));
  auto stoplist = f.stoplist.empty() ? instantiation::Stoplist::defaults()
                                     : instantiation::Stoplist::parse(read_file(f.stoplist));
  instantiation::MatcherConfig config;
  config.tau = f.tau;
  config.include_descriptions = f.include_descriptions;
  out << instantiation::run_pipeline(doc, instances, stoplist, config).to_json().dump(2) << "\n";
  return kOk;
}

int cmd_export_dot(const std::string& file, bool as_json, std::ostream& out, std::ostream& err) {
  SchemaDocument doc = parse_schema(read_file(file));
  auto report = validate(doc);
  if (report.has_errors()) {
    for (const auto& v : report.violations)
      if (v.severity == Severity::Error) err << to_string(v.code) << "\t" << v.element_id << "\t" << v.message << "\n";
    return kUsage;
  }
  auto view = build_graph_view(doc);
  if (as_json) out << view.to_json().dump(2) << "\n";
  else out << to_dot(view);
  return kOk;
}

std::vector<Json> read_envelopes(const std::string& path) {
  std::string text = read_file(path);
  std::vector<Json> out;
  try {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      for (auto& item : Json::parse(text)) out.push_back(std::move(item));
      return out;
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(Json::parse(line));
  } catch (const Json::parse_error& e) {
    throw ParseError(ErrorCode::MalformedJson, "", path + ": " + e.what());
  }
  return out;
}

int cmd_apply(const std::string& file, const std::string& commands, bool strict, std::ostream& out,
              std::ostream& err) {
  EditSession session(parse_schema(read_file(file)), {strict});
  auto envelopes = read_envelopes(commands);
  for (std::size_t i = 0; i < envelopes.size(); ++i) {
    try {
      Envelope env = parse_envelope(envelopes[i]);
      session.apply(env.command, env.expect_version);
    } catch (const Error& e) {
      err << "command " << i + 1 << ": ";
      report_error(err, e);
      return kUsage;
    }
  }
  out << serialize_schema(session.document());
  return kOk;
}

int cmd_serve(const std::string& host, int port, const std::string& data_dir, const std::string& fixtures,
              bool strict, std::ostream& out) {
  service::ServiceOptions options;
  if (!data_dir.empty()) options.data_dir = data_dir;
  if (!fixtures.empty()) options.fixture_dir = fixtures;
  options.edit.strict = strict;
  service::Service svc(options);
  out << "listening on " << host << ":" << port << std::endl;
  if (!service::serve(svc, host, port)) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  return kOk;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schema curation toolkit", "sci"};
  app.require_subcommand(1);
  bool as_json = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check structural invariants of an SDF file");
  std::string validate_file;
  bool strict = false;
  validate_cmd->add_option("file", validate_file, "SDF document")->required();
  validate_cmd->add_flag("--strict", strict, "Treat warnings as errors");
  validate_cmd->add_flag("--json", as_json, "Print the report as JSON");

  auto* stats_cmd = app.add_subcommand("stats", "Induced vs curated counts over a directory of SDF files");
  std::string stats_dir;
  stats_cmd->add_option("dir", stats_dir, "Directory of provenance-tagged SDF files")->required();
  stats_cmd->add_flag("--json", as_json, "Print JSON instead of a table");

  auto* induce_cmd = app.add_subcommand("induce", "Induce a schema from a stub generation fixture");
  InduceFlags induce;
  induce_cmd->add_option("--scenario", induce.scenario, "Scenario name")->required();
  induce_cmd->add_option("--chapters", induce.chapters, "Chapter names, comma separated")->required();
  induce_cmd->add_option("--fixture", induce.fixture, "Stub backend fixture (JSON)")->required();
  induce_cmd->add_option("--catalog", induce.catalog, "Qnode catalog for grounding (JSON)");
  induce_cmd->add_option("--article", induce.articles, "Background article text file");
  induce_cmd->add_option("--edge-threshold", induce.config.edge_threshold, "Minimum edge confidence")
      ->check(CLI::Range(0.0, 1.0));
  induce_cmd->add_option("--grounding-threshold", induce.config.grounding_threshold, "Minimum grounding score")
      ->check(CLI::Range(0.0, 1.0));
  induce_cmd->add_option("--depth", induce.config.expansion_depth, "Expansion rounds")->check(CLI::NonNegativeNumber);
  induce_cmd->add_flag("--serial", induce.serial, "Process chapters one at a time");

  auto* coverage_cmd = app.add_subcommand("coverage", "Filter, rematch and rank extracted instances");
  CoverageFlags coverage;
  coverage_cmd->add_option("schema", coverage.schema, "SDF document")->required();
  coverage_cmd->add_option("instances", coverage.instances, "Instance file (JSON)")->required();
  coverage_cmd->add_option("--tau", coverage.tau, "Similarity threshold")->check(CLI::Range(0.0, 1.0));
  coverage_cmd->add_option("--stoplist", coverage.stoplist, "Stoplist file, one lemma per line");
  coverage_cmd->add_flag("--include-descriptions", coverage.include_descriptions, "Also match event descriptions");

  auto* dot_cmd = app.add_subcommand("export-dot", "Render the graph view as Graphviz DOT");
  std::string dot_file;
  dot_cmd->add_option("file", dot_file, "SDF document")->required();
  dot_cmd->add_flag("--json", as_json, "Print the graph view as JSON");

  auto* apply_cmd = app.add_subcommand("apply", "Apply a batch of command envelopes and print the result");
  std::string apply_file, apply_commands;
  apply_cmd->add_option("file", apply_file, "SDF document")->required();
  apply_cmd->add_option("commands", apply_commands, "Envelopes as a JSON array or JSON lines")->required();
  apply_cmd->add_flag("--strict", strict, "Reject cross-parent outlinks");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "0.0.0.0";
  int port = 8080;
  if (std::string env_port = env_or("PORT", ""); !env_port.empty()) {
    auto [end, ec] = std::from_chars(env_port.data(), env_port.data() + env_port.size(), port);
    if (ec != std::errc() || end != env_port.data() + env_port.size()) port = -1;
  }
  std::string data_dir = env_or("DATA_DIR", "");
  std::string fixtures;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port (default $PORT or 8080)");
  serve_cmd->add_option("--data-dir", data_dir, "Session journal directory (default $DATA_DIR)");
  serve_cmd->add_option("--fixtures", fixtures, "Directory of named induction fixtures");
  serve_cmd->add_flag("--strict", strict, "Reject cross-parent outlinks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_file, strict, as_json, out);
    if (*stats_cmd) return cmd_stats(stats_dir, as_json, out);
    if (*induce_cmd) return cmd_induce(induce, out);
    if (*coverage_cmd) return cmd_coverage(coverage, out);
    if (*dot_cmd) return cmd_export_dot(dot_file, as_json, out, err);
    if (*apply_cmd) return cmd_apply(apply_file, apply_commands, strict, out, err);
    if (*serve_cmd && port < 0) throw Error(ErrorCode::BadInput, "port must be a non-negative number");
    if (*serve_cmd) return cmd_serve(host, port, data_dir, fixtures, strict, out);
  } catch (const Error& e) {
    report_error(err, e);
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace sci::cli
