// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "generators.hpp"
#include "httplib.h"
#include "oracles.hpp"
#include "sci/digraph.hpp"
#include "sci/edit.hpp"
#include "sci/error.hpp"
#include "sci/induction.hpp"
#include "sci/instantiation.hpp"
#include "sci/service.hpp"
#include "sci/validate.hpp"

using namespace sci;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string shell(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  status = pclose(pipe);
  return out;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }
std::string data(const std::string& rel) { return std::string(SCI_DATA_DIR) + "/" + rel; }

// ---------------------------------------------------------------------------

Outcome table_reproduction() {
  Outcome o;
  int status = 0;
  auto start = Clock::now();
  auto text = shell(quote(SCI_CLI_PATH) + " stats " + quote(data("library")) + " --json", status);
  double took = seconds_since(start);
  if (status != 0) {
    o.fail("sci stats exited with " + std::to_string(status));
    return o;
  }
  auto j = Json::parse(text);
  const std::vector<std::pair<const char*, long long>> want = {
      {"induced_events", 376},   {"induced_participants", 957}, {"curated_events", 377},
      {"curated_participants", 604}, {"total_events", 753},     {"total_participants", 1561},
      {"increase_pct_events", 100},  {"increase_pct_participants", 63}};
  for (const auto& [key, value] : want)
    if (j.at(key).get<long long>() != value) o.fail(std::string(key) + " = " + j.at(key).dump());
  if (took >= 1.0) o.fail("took " + std::to_string(took) + " s");
  if (o.pass) o.detail = "753/1561, +100%/+63% in " + std::to_string(took).substr(0, 5) + " s";
  return o;
}

Outcome round_trip() {
  Outcome o;
  gen::Rng rng(1001);
  for (int i = 0; i < 500 && o.pass; ++i) {
    auto doc = gen::document(rng);
    auto bytes = serialize_schema(doc);
    auto back = parse_schema(bytes);
    if (!(back == doc) || serialize_schema(back) != bytes) o.fail("document " + std::to_string(i) + " changed");
    if (validate(doc).has_errors()) o.fail("generated document " + std::to_string(i) + " is invalid");
  }
  if (o.pass) o.detail = "500/500";
  return o;
}

SchemaDocument graph_doc(std::size_t n, const std::vector<oracle::Edge>& edges, bool hierarchy) {
  SchemaDocument doc{"d", "3.0", "1", {}, {}, Json::object()};
  if (!hierarchy) {
    EventNode root;
    root.id = "root";
    root.name = "root";
    root.is_schema = true;
    for (std::size_t i = 0; i < n; ++i) root.children.push_back("e" + std::to_string(i));
    doc.events.push_back(root);
  }
  for (std::size_t i = 0; i < n; ++i) {
    EventNode ev;
    ev.id = "e" + std::to_string(i);
    ev.name = ev.id;
    for (auto [u, v] : edges)
      if (u == i) (hierarchy ? ev.children : ev.outlinks).push_back("e" + std::to_string(v));
    ev.is_schema = !ev.children.empty();
    doc.events.push_back(ev);
  }
  return doc;
}

std::set<std::size_t> flagged(const ValidationReport& r, ViolationCode code) {
  std::set<std::size_t> out;
  for (const auto& id : r.ids_with(code)) out.insert(std::stoul(id.substr(1)));
  return out;
}

std::vector<oracle::Edge> edges_of(std::size_t n, std::uint64_t mask) {
  std::vector<oracle::Edge> edges;
  for (std::size_t b = 0; b < n * n; ++b)
    if (mask >> b & 1u) edges.push_back({b / n, b % n});
  return edges;
}

bool validate_agrees(std::size_t n, const std::vector<oracle::Edge>& edges) {
  auto want = oracle::cyclic_nodes(n, edges);
  return flagged(validate(graph_doc(n, edges, true)), ViolationCode::HierarchyCycle) == want &&
         flagged(validate(graph_doc(n, edges, false)), ViolationCode::TemporalCycle) == want;
}

// Cycle detection at the graph layer covers every graph on up to 5 nodes: each
// loop-free graph is checked once, paired with a rotating self-loop mask, and
// self-loops only ever mark their own node. Full documents are checked
// exhaustively up to 4 nodes and by sampling at 5.
Outcome validation_oracle() {
  Outcome o;
  auto start = Clock::now();
  std::uint64_t graphs = 0, documents = 0;
  for (std::size_t n = 1; n <= 5 && o.pass; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> off;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (u != v) off.push_back({u, v});
    const std::uint64_t loop_masks = 1ull << n;
    for (std::uint64_t mask = 0; mask < (1ull << off.size()); ++mask) {
      std::vector<oracle::Edge> edges;
      digraph::Adjacency adj(n);
      for (std::size_t b = 0; b < off.size(); ++b)
        if (mask >> b & 1u) edges.push_back(off[b]);
      std::uint64_t loops = mask % loop_masks;
      for (std::size_t v = 0; v < n; ++v)
        if (loops >> v & 1u) edges.push_back({v, v});
      for (auto [u, v] : edges) adj[u].push_back(v);
      auto got = digraph::nodes_on_cycles(adj);
      auto want = oracle::cyclic_nodes(n, edges);
      ++graphs;
      for (std::size_t v = 0; v < n; ++v)
        if (got[v] != (want.count(v) > 0)) {
          o.fail("graph layer disagrees on n=" + std::to_string(n) + " mask=" + std::to_string(mask));
          break;
        }
      if (!o.pass) break;
    }
  }
  for (std::size_t n = 1; n <= 4 && o.pass; ++n)
    for (std::uint64_t mask = 0; mask < (1ull << (n * n)); ++mask, ++documents)
      if (!validate_agrees(n, edges_of(n, mask))) {
        o.fail("validate disagrees on n=" + std::to_string(n) + " mask=" + std::to_string(mask));
        break;
      }
  gen::Rng rng(1002);
  for (int i = 0; i < 20000 && o.pass; ++i, ++documents) {
    std::uint64_t mask = std::uniform_int_distribution<std::uint64_t>(0, (1ull << 25) - 1)(rng);
    if (!validate_agrees(5, edges_of(5, mask))) o.fail("validate disagrees on n=5 mask=" + std::to_string(mask));
  }
  double took = seconds_since(start);
  if (took >= 30.0) o.fail("took " + std::to_string(took) + " s");
  if (o.pass)
    o.detail = std::to_string(graphs) + " graphs, " + std::to_string(documents) + " documents in " +
               std::to_string(took).substr(0, 5) + " s";
  return o;
}

Outcome edit_suite() {
  Outcome o;
  gen::Rng rng(1003);
  for (int trial = 0; trial < 200 && o.pass; ++trial) {
    EditSession s(gen::document(rng, 12));
    const auto initial = serialize_schema(s.document());
    std::size_t len = 1 + gen::pick(rng, 30);
    for (std::size_t i = 0; i < len; ++i) {
      auto cmd = gen::command(rng, s.document());
      auto bytes = serialize_schema(s.document());
      try {
        s.apply(cmd);
      } catch (const Error&) {
        if (serialize_schema(s.document()) != bytes) o.fail("failed command changed trial " + std::to_string(trial));
      }
    }
    auto final_bytes = serialize_schema(s.document());
    if (serialize_schema(EditSession::replay(s.initial(), s.log()).document()) != final_bytes)
      o.fail("replay differs in trial " + std::to_string(trial));
    while (s.can_undo()) s.undo();
    if (serialize_schema(s.document()) != initial) o.fail("undo-all differs in trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "200 sequences";
  return o;
}

Outcome induction_determinism() {
  Outcome o;
  int s1 = 0, s2 = 0;
  std::string cmd = quote(SCI_CLI_PATH) + " induce --scenario 'general IED' --chapters Preparation,Attack --fixture " +
                    quote(data("fixtures/general-ied.json")) + " --catalog " + quote(data("fixtures/catalog.json"));
  auto a = shell(cmd, s1);
  auto b = shell(cmd, s2);
  if (s1 != 0 || s2 != 0) o.fail("sci induce failed");
  else if (a != b) o.fail("two runs differ");
  else if (validate(parse_schema(a)).has_errors()) o.fail("shipped fixture result is invalid");
  gen::Rng rng(1004);
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    std::vector<std::string> chapters = {"prelude", "main", "aftermath"};
    chapters.resize(1 + gen::pick(rng, 3));
    auto fx = gen::stub_fixture(rng, "scenario", chapters);
    induction::InductionConfig config;
    config.expansion_depth = static_cast<int>(gen::pick(rng, 3));
    induction::StubBackend b1(fx), b2(fx);
    auto d1 = induction::induce(b1, {"scenario", chapters, {}}, config);
    auto d2 = induction::induce(b2, {"scenario", chapters, {}}, config);
    if (serialize_schema(d1) != serialize_schema(d2)) o.fail("fixture " + std::to_string(trial) + " not deterministic");
    else if (validate(d1).has_errors()) o.fail("fixture " + std::to_string(trial) + " yields an invalid document");
  }
  if (o.pass) o.detail = "byte-identical reruns, 50/50 fixtures valid";
  return o;
}

class MatrixBackend : public induction::GenerationBackend {
 public:
  std::map<std::tuple<induction::EdgeKind, std::string, std::string>, double> table;
  std::vector<std::string> skeleton(const induction::PromptContext&) override { return {}; }
  std::vector<induction::Neighbor> expansion(const induction::PromptContext&) override { return {}; }
  double verification(const induction::PromptContext& ctx) override { return table.at({ctx.edge_kind, ctx.seed, ctx.target}); }
};

Outcome verify_suite() {
  Outcome o;
  gen::Rng rng(1005);
  const std::vector<std::string> names = {"a", "b", "c", "d"};
  induction::ChapterDraft draft;
  draft.chapter = "c";
  for (const auto& s : names) draft.candidates.push_back({s, "c", std::nullopt});
  for (int trial = 0; trial < 1000 && o.pass; ++trial) {
    MatrixBackend b;
    for (auto kind : {induction::EdgeKind::Temporal, induction::EdgeKind::Hierarchical})
      for (const auto& s : names)
        for (const auto& t : names)
          if (s != t) b.table[{kind, s, t}] = 0.25 * static_cast<double>(gen::pick(rng, 5));
    induction::InductionConfig config;
    auto edges = induction::verify_relations(b, {"s", {"c"}, {}}, draft, config);
    std::vector<oracle::Edge> temporal;
    for (const auto& e : edges) {
      if (e.confidence < config.edge_threshold) o.fail("edge below threshold in case " + std::to_string(trial));
      if (e.kind == induction::EdgeKind::Temporal) temporal.push_back({e.source, e.target});
    }
    if (oracle::has_cycle(names.size(), temporal)) o.fail("temporal cycle in case " + std::to_string(trial));
  }
  if (o.pass) o.detail = "1000 matrices";
  return o;
}

Outcome instantiation_suite() {
  using namespace instantiation;
  Outcome o;
  auto mk = [](std::string s, long long c = 1) {
    EventInstance e;
    e.surface = std::move(s);
    e.count = c;
    return e;
  };
  auto kept = filter_fine_grained({mk("go"), mk("use"), mk("used"), mk("going"), mk("detonate"), mk("protest")},
                                  Stoplist::defaults());
  if (kept.size() != 2 || kept[0].surface != "detonate" || kept[1].surface != "protest") o.fail("stoplist filter");

  gen::Rng rng(1006);
  const std::vector<std::string> vocab = {"bomb", "the", "device", "is", "detonated", "crowd", "police", "a"};
  auto phrase = [&] {
    std::string s;
    for (std::size_t k = 1 + gen::pick(rng, 4); k > 0; --k) s += (s.empty() ? "" : " ") + vocab[gen::pick(rng, vocab.size())];
    return s;
  };
  for (int i = 0; i < 100 && o.pass; ++i) {
    auto surface = phrase(), name = phrase();
    auto schema = parse_schema(Json{{"@id", "d"}, {"sdfVersion", "3.0"}, {"version", "1"},
                                    {"events", Json::array({Json{{"@id", "e"}, {"name", name}}})}});
    bool want = oracle::jaccard(surface, name) >= 0.7;
    bool got = rematch({mk(surface)}, schema).recovered.size() == 1;
    if (want != got) o.fail("rematch disagrees on '" + surface + "' vs '" + name + "'");
  }
  for (int i = 0; i < 50 && o.pass; ++i) {
    std::vector<EventInstance> v;
    std::vector<oracle::Counted> ref;
    for (std::size_t k = gen::pick(rng, 15); k > 0; --k) {
      auto e = mk(vocab[gen::pick(rng, vocab.size())], 1 + static_cast<long long>(gen::pick(rng, 5)));
      v.push_back(e);
      ref.push_back({e.surface, e.count});
    }
    auto got = rank_unmatched(v);
    auto want = oracle::reference_rank(ref);
    bool same = got.size() == want.size();
    for (std::size_t k = 0; same && k < got.size(); ++k) same = got[k].surface == want[k].surface && got[k].count == want[k].count;
    if (!same) o.fail("ranking disagrees on multiset " + std::to_string(i));
  }
  if (o.pass) o.detail = "filter exact, 100 rematch pairs, 50 rankings";
  return o;
}

Outcome service_contract() {
  Outcome o;
  service::Service svc;
  httplib::Server server;
  svc.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  if (port <= 0) {
    o.fail("cannot bind");
    return o;
  }
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/v1/schemas",
                             R"({"@id":"doc","sdfVersion":"3.0","version":"1","events":[
                               {"@id":"c","name":"c","isSchema":true,"children":["a"]},{"@id":"a","name":"a"}],
                               "provenance":{"c":"induced","a":"induced"}})",
                             "application/json");
  if (!created || created->status != 201) {
    o.fail("cannot create session");
  } else {
    std::string id = Json::parse(created->body)["schema_id"];
    const std::vector<std::string> reads = {"", "/graph", "/entities", "/export", "/validate", "/log"};
    auto current = [&] { return Json::parse(client.Get("/v1/schemas/" + id)->body)["doc_version"].get<std::string>(); };
    for (int trial = 0; trial < 100 && o.pass; ++trial) {
      std::string version = current();
      for (const auto& r : reads) {
        auto res = client.Get("/v1/schemas/" + id + r);
        if (!res || res->status != 200) o.fail("GET " + r + " failed");
      }
      if (current() != version) o.fail("GET changed doc_version");
      std::atomic<int> ok{0}, conflict{0}, other{0};
      std::vector<std::thread> writers;
      for (int w = 0; w < 4; ++w)
        writers.emplace_back([&, w] {
          httplib::Client c("127.0.0.1", port);
          Json env = {{"op", "add_event"},
                      {"args", {{"parent", "c"}, {"name", "t" + std::to_string(trial) + "w" + std::to_string(w)}}},
                      {"expect_version", version}};
          auto res = c.Post("/v1/schemas/" + id + "/ops", env.dump(), "application/json");
          if (res && res->status == 200) ++ok;
          else if (res && res->status == 409) ++conflict;
          else ++other;
        });
      for (auto& t : writers) t.join();
      if (ok != 1 || conflict != 3 || other != 0)
        o.fail("trial " + std::to_string(trial) + ": " + std::to_string(ok) + " ok, " + std::to_string(conflict) + " conflicts");
    }
  }
  server.stop();
  runner.join();
  if (o.pass) o.detail = "100 trials, 1 winner each, reads stable";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> suites = {
      {"coverage-table", table_reproduction},
      {"round-trip", round_trip},
      {"validation-oracle", validation_oracle},
      {"edit-atomicity-replay", edit_suite},
      {"induction-determinism", induction_determinism},
      {"verify-relations", verify_suite},
      {"instantiation-pipeline", instantiation_suite},
      {"service-contract", service_contract},
  };
  bool all = true;
  std::vector<std::pair<std::string, Outcome>> results;
  for (const auto& c : suites) {
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    all = all && out.pass;
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << ": " << out.detail << std::endl;
  }
  // End-to-end curation with a hosted language model, an event extractor and
  // human curators is out of reach here; the property suites above stand in.
  std::cout << (all ? "PASS " : "FAIL ") << "end-to-end-not-reproducible: "
            << (all ? "all property suites passed" : "a property suite failed") << std::endl;
  return all ? 0 : 1;
}
