#include "doctest.h"

#include <fstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "sci/error.hpp"
#include "sci/induction.hpp"
#include "sci/validate.hpp"

using namespace sci;
using namespace sci::induction;

namespace {

// Serves confidences from a table; everything else comes from a stub fixture.
class TableBackend : public GenerationBackend {
 public:
  std::map<std::tuple<EdgeKind, std::string, std::string>, double> table;
  std::vector<std::string> skeleton(const PromptContext&) override { return {}; }
  std::vector<Neighbor> expansion(const PromptContext&) override { return {}; }
  double verification(const PromptContext& ctx) override {
    auto it = table.find({ctx.edge_kind, ctx.seed, ctx.target});
    return it == table.end() ? 0.0 : it->second;
  }
};

ChapterDraft draft_of(const std::vector<std::string>& sentences) {
  ChapterDraft d;
  d.chapter = "c";
  for (const auto& s : sentences) d.candidates.push_back({s, "c", std::nullopt});
  return d;
}

InductionInput riot() { return {"riot", {"unrest"}, {}}; }

std::vector<oracle::Edge> of_kind(const std::vector<EventEdge>& edges, EdgeKind kind) {
  std::vector<oracle::Edge> out;
  for (const auto& e : edges)
    if (e.kind == kind) out.push_back({e.source, e.target});
  return out;
}

}  // namespace

TEST_CASE("skeleton is a path") {
  Json fx = {{StubBackend::skeleton_key("riot", "unrest"), {"crowd gathers", "violence erupts", "police respond"}}};
  StubBackend backend(fx);
  auto d = induce_skeleton(backend, riot(), "unrest");
  REQUIRE(d.candidates.size() == 3);
  CHECK(d.edges == std::vector<EventEdge>{{0, 1, EdgeKind::Temporal, 1.0}, {1, 2, EdgeKind::Temporal, 1.0}});
}

TEST_CASE("single sentence skeleton has no edges") {
  StubBackend backend(Json{{StubBackend::skeleton_key("riot", "unrest"), {"crowd gathers"}}});
  auto d = induce_skeleton(backend, riot(), "unrest");
  CHECK(d.candidates.size() == 1);
  CHECK(d.edges.empty());
}

TEST_CASE("skeleton edges are exactly consecutive pairs") {
  for (std::size_t k = 1; k <= 8; ++k) {
    Json list = Json::array();
    for (std::size_t i = 0; i < k; ++i) list.push_back("event " + std::to_string(i));
    StubBackend backend(Json{{StubBackend::skeleton_key("riot", "unrest"), list}});
    auto d = induce_skeleton(backend, riot(), "unrest");
    std::vector<std::size_t> in(k, 0), out(k, 0);
    for (const auto& e : d.edges) {
      ++out[e.source];
      ++in[e.target];
      CHECK(e.target == e.source + 1);
    }
    CHECK(d.edges.size() == k - 1);
    for (std::size_t i = 0; i < k; ++i) CHECK((in[i] <= 1 && out[i] <= 1));
  }
}

TEST_CASE("skeleton errors") {
  StubBackend empty(Json{{StubBackend::skeleton_key("riot", "unrest"), Json::array({"  "})}});
  CHECK_THROWS_WITH_AS(induce_skeleton(empty, riot(), "unrest"), doctest::Contains("no events"), Error);
  StubBackend broken(Json{{StubBackend::skeleton_key("riot", "unrest"), {{"error", "rate limited"}}}});
  try {
    induce_skeleton(broken, riot(), "unrest");
    FAIL("expected BackendFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendFailure);
  }
  StubBackend nothing(Json::object());
  try {
    induce_skeleton(nothing, riot(), "unrest");
    FAIL("expected FixtureMiss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FixtureMiss);
  }
}

TEST_CASE("expansion adds a hierarchical child and merges known sentences") {
  Json fx = {{StubBackend::skeleton_key("riot", "unrest"), {"crowd gathers", "violence erupts"}},
             {StubBackend::expansion_key("riot", "unrest", "violence erupts"),
              {Json{{"sentence", "protesters throw stones"}, {"relation", "child"}}, "CROWD GATHERS"}}};
  StubBackend backend(fx);
  auto d = induce_skeleton(backend, riot(), "unrest");
  auto added = expand_event(backend, riot(), d, 1);
  REQUIRE(d.candidates.size() == 3);
  CHECK(d.candidates[2].sentence == "protesters throw stones");
  REQUIRE(added.size() == 2);
  CHECK(added[0] == EventEdge{1, 2, EdgeKind::Hierarchical, 1.0});
  CHECK(added[1] == EventEdge{1, 0, EdgeKind::Hierarchical, 1.0});
}

TEST_CASE("expansion dedup agrees with a pairwise scan") {
  gen::Rng rng(81);
  for (int trial = 0; trial < 40; ++trial) {
    auto fx = gen::stub_fixture(rng, "riot", {"unrest"});
    StubBackend backend(fx);
    auto d = induce_skeleton(backend, riot(), "unrest");
    for (std::size_t i = 0, n = d.candidates.size(); i < n; ++i) expand_event(backend, riot(), d, i);
    for (std::size_t a = 0; a < d.candidates.size(); ++a)
      for (std::size_t b = a + 1; b < d.candidates.size(); ++b) {
        std::string x = d.candidates[a].sentence, y = d.candidates[b].sentence;
        std::transform(x.begin(), x.end(), x.begin(), ::tolower);
        std::transform(y.begin(), y.end(), y.begin(), ::tolower);
        CHECK(x != y);
      }
  }
}

TEST_CASE("two-node cycle keeps the stronger edge") {
  TableBackend b;
  b.table[{EdgeKind::Temporal, "a", "b"}] = 0.9;
  b.table[{EdgeKind::Temporal, "b", "a"}] = 0.6;
  auto edges = verify_relations(b, riot(), draft_of({"a", "b"}), {});
  CHECK(edges == std::vector<EventEdge>{{0, 1, EdgeKind::Temporal, 0.9}});
}

TEST_CASE("equal confidences drop the lexicographically last edge") {
  auto kept = enforce_consistency(2, {{0, 1, EdgeKind::Temporal, 0.7}, {1, 0, EdgeKind::Temporal, 0.7}}, 0.5);
  CHECK(kept == std::vector<EventEdge>{{0, 1, EdgeKind::Temporal, 0.7}});
}

TEST_CASE("all pairs below threshold leave nothing") {
  TableBackend b;
  for (auto s : {"a", "b", "c"})
    for (auto t : {"a", "b", "c"}) b.table[{EdgeKind::Temporal, s, t}] = 0.4;
  CHECK(verify_relations(b, riot(), draft_of({"a", "b", "c"}), {}).empty());
}

TEST_CASE("random 4-candidate matrices yield consistent edges") {
  gen::Rng rng(91);
  const std::vector<std::string> names = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    TableBackend b;
    for (auto kind : {EdgeKind::Temporal, EdgeKind::Hierarchical})
      for (const auto& s : names)
        for (const auto& t : names)
          if (s != t) b.table[{kind, s, t}] = 0.25 * static_cast<double>(gen::pick(rng, 5));
    auto edges = verify_relations(b, riot(), draft_of(names), {});
    for (const auto& e : edges) CHECK(e.confidence >= 0.5);
    CHECK_FALSE(oracle::has_cycle(4, of_kind(edges, EdgeKind::Temporal)));
    auto hier = of_kind(edges, EdgeKind::Hierarchical);
    CHECK_FALSE(oracle::has_cycle(4, hier));
    std::vector<int> parents(4, 0);
    for (auto [u, v] : hier) ++parents[v];
    for (int p : parents) CHECK(p <= 1);
  }
}

TEST_CASE("grounding picks the identical definition and respects the threshold") {
  QnodeCatalog catalog{{{"Q1", "riot", "crowd gathers in the square"}, {"Q2", "arrest", "police detain people"}}};
  TokenCosineScorer scorer;
  auto m = ground_event(scorer, {"police detain people", "c", std::nullopt}, catalog, {});
  REQUIRE(m);
  CHECK(m->qnode == "Q2");
  CHECK(m->score == 1.0);
  CHECK_FALSE(ground_event(scorer, {"volcano erupts", "c", std::nullopt}, catalog, {}));
}

TEST_CASE("default scorer is symmetric, bounded and argmax agrees with recomputation") {
  TokenCosineScorer scorer;
  gen::Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    auto a = gen::phrase(rng, 5), b = gen::phrase(rng, 5);
    double s = scorer.score(a, b);
    CHECK(s == scorer.score(b, a));
    CHECK((s >= 0.0 && s <= 1.0));
    CHECK(scorer.score(a, a) == 1.0);
  }
  for (int i = 0; i < 50; ++i) {
    QnodeCatalog catalog;
    for (int k = 0; k < 5; ++k) catalog.entries.push_back({"Q" + std::to_string(k), "l", gen::phrase(rng, 4)});
    CandidateEvent cand{gen::phrase(rng, 4), "c", std::nullopt};
    InductionConfig config;
    config.grounding_threshold = 0.0;
    auto got = ground_event(scorer, cand, catalog, config);
    std::size_t best = 0;
    for (std::size_t k = 1; k < 5; ++k)
      if (scorer.score(cand.sentence, catalog.entries[k].definition) > scorer.score(cand.sentence, catalog.entries[best].definition))
        best = k;
    REQUIRE(got);
    CHECK(got->qnode == catalog.entries[best].qnode);
  }
}

TEST_CASE("three-event path assembles into one chapter with outlinks") {
  Json fx = {{StubBackend::skeleton_key("riot", "unrest"), {"crowd gathers", "violence erupts", "police respond"}}};
  StubBackend backend(fx);
  auto doc = induce(backend, riot());
  REQUIRE(doc.events.size() == 4);
  CHECK(doc.events[0].name == "unrest");
  CHECK(doc.events[0].is_schema);
  CHECK(doc.events[1].outlinks == std::vector<std::string>{doc.events[2].id});
  CHECK(doc.events[2].outlinks == std::vector<std::string>{doc.events[3].id});
  for (const auto& ev : doc.events) CHECK(doc.provenance.at(ev.id) == Provenance::Induced);
  CHECK(serialize_schema(doc).find("container node") == std::string::npos);
  CHECK(validate(doc).empty());
}

TEST_CASE("hierarchical child promotes its source") {
  Json fx = {{StubBackend::skeleton_key("riot", "unrest"), {"violence erupts"}},
             {StubBackend::expansion_key("riot", "unrest", "violence erupts"), {"protesters throw stones"}}};
  StubBackend backend(fx);
  auto doc = induce(backend, riot());
  const auto& p = doc.events.at(1);
  CHECK(p.is_schema);
  CHECK(p.children == std::vector<std::string>{doc.events.at(2).id});
  CHECK_FALSE(validate(doc).has_errors());
}

TEST_CASE("random fixtures assemble into valid documents deterministically") {
  gen::Rng rng(111);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> chapters = {"prelude", "main", "aftermath"};
    chapters.resize(1 + gen::pick(rng, 3));
    auto fx = gen::stub_fixture(rng, "scenario", chapters);
    InductionInput input{"scenario", chapters, {}};
    InductionConfig serial;
    serial.parallel_chapters = false;
    serial.expansion_depth = static_cast<int>(gen::pick(rng, 3));
    StubBackend b1(fx), b2(fx);
    auto d1 = induce(b1, input, serial);
    auto parallel = serial;
    parallel.parallel_chapters = true;
    auto d2 = induce(b2, input, parallel);
    CHECK(serialize_schema(d1) == serialize_schema(d2));
    CHECK_FALSE(validate(d1).has_errors());
  }
}

TEST_CASE("shipped fixture induces a valid grounded schema") {
  std::ifstream in(std::string(SCI_DATA_DIR) + "/fixtures/general-ied.json");
  std::ifstream cat(std::string(SCI_DATA_DIR) + "/fixtures/catalog.json");
  StubBackend backend(Json::parse(in));
  auto catalog = QnodeCatalog::from_json(Json::parse(cat));
  auto doc = induce(backend, {"general IED", {"Preparation", "Attack"}, {}}, {}, &catalog);
  CHECK(doc.id == "sci:general-ied");
  CHECK_FALSE(validate(doc).has_errors());
  auto detonated = std::find_if(doc.events.begin(), doc.events.end(), [](const EventNode& e) { return e.name == "Device is detonated"; });
  REQUIRE(detonated != doc.events.end());
  REQUIRE(detonated->grounding);
  CHECK(detonated->grounding->node == "Q12876");
}

TEST_CASE("config and catalog checks") {
  InductionConfig bad;
  bad.edge_threshold = 1.5;
  CHECK_THROWS_AS(bad.check(), Error);
  CHECK_THROWS_AS(QnodeCatalog::from_json(Json::parse(R"([{"qnode":"Q1","label":"a","definition":"x"},{"qnode":"Q1","label":"b","definition":"y"}])")),
                  Error);
  StubBackend backend(Json::object());
  CHECK_THROWS_AS(induce(backend, {"s", {}, {}}), Error);
}
