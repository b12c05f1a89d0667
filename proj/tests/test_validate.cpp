#include "doctest.h"

#include "oracles.hpp"
#include "sci/sdf.hpp"
#include "sci/validate.hpp"

using namespace sci;

namespace {

ValidationReport check(std::string_view events, ValidateOptions options = {}) {
  std::string text = R"({"@id":"d","sdfVersion":"3.0","version":"1","events":[)" + std::string(events) + "]}";
  return validate(parse_schema(text), options);
}

std::vector<std::string> codes(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& v : r.violations) out.push_back(std::string(to_string(v.code)));
  return out;
}

using Codes = std::vector<std::string>;

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

}  // namespace

TEST_CASE("empty document has an empty report") {
  CHECK(check("").empty());
}

TEST_CASE("each code has a minimal fixture that triggers only it") {
  CHECK(codes(check(R"({"@id":"a","isSchema":true})")) == Codes{"IS_SCHEMA_MISMATCH"});
  CHECK(codes(check(R"({"@id":"a","children":["b"]},{"@id":"b"})")) == Codes{"IS_SCHEMA_MISMATCH"});
  CHECK(codes(check(R"({"@id":"a","isSchema":true,"children":["zz"]})")) == Codes{"DANGLING_REF"});
  CHECK(codes(check(R"({"@id":"a","isSchema":true,"children":["b"]},{"@id":"b","isSchema":true,"children":["a"]})")) ==
        Codes{"HIERARCHY_CYCLE", "HIERARCHY_CYCLE"});
  CHECK(codes(check(R"({"@id":"p","isSchema":true,"children":["c"]},{"@id":"q","isSchema":true,"children":["c"]},{"@id":"c"})")) ==
        Codes{"MULTIPLE_PARENTS"});
  CHECK(codes(check(R"({"@id":"p","isSchema":true,"children":["c","x"]},{"@id":"c","isSchema":true,"children":["y"]},
                      {"@id":"x","outlinks":["c"]},{"@id":"y"})")) == Codes{"OUTLINK_KIND_MISMATCH"});
  CHECK(codes(check(R"({"@id":"p","isSchema":true,"children":["a"]},{"@id":"q","isSchema":true,"children":["b"]},
                      {"@id":"a","outlinks":["b"]},{"@id":"b"})")) == Codes{"OUTLINK_CROSS_PARENT"});
  CHECK(codes(check(R"({"@id":"a","outlinks":["b"]},{"@id":"b","outlinks":["a"]})")) == Codes{"TEMPORAL_CYCLE", "TEMPORAL_CYCLE"});
  CHECK(codes(check(R"({"@id":"g","comment":"container node","children_gate":"xor","isSchema":true,"children":["a"],
                      "entities":[{"@id":"e","name":"E"}]},{"@id":"a"})")) == Codes{"GATE_ILLEGAL_FIELDS"});
  CHECK(codes(check(R"({"@id":"g","comment":"container node","isSchema":true,"children":["a"]},{"@id":"a"})")) ==
        Codes{"BAD_GATE_KIND"});
  CHECK(codes(check(R"({"@id":"a","children_gate":"or"})")) == Codes{"BAD_GATE_KIND"});
  CHECK(codes(check(R"({"@id":"g","comment":"container node","children_gate":"xor"})")) == Codes{"GATE_EMPTY"});
  CHECK(codes(check(R"({"@id":"a","entities":[{"@id":"e","name":"E"}],"relations":[
                      {"@id":"r","name":"self","relationSubject":"e","relationObject":"e"}]})")) == Codes{"SELF_RELATION"});
  CHECK(codes(check(R"({"@id":"a","entities":[{"@id":"e","name":""}]})")) == Codes{"EMPTY_NAME"});
}

TEST_CASE("chapter declared without children is only a warning") {
  auto r = check(R"({"@id":"a","isSchema":true})");
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].severity == Severity::Warning);
  CHECK_FALSE(r.has_errors());
  auto gate = check(R"({"@id":"g","comment":"container node","children_gate":"xor","isSchema":true})");
  CHECK(gate.has_errors());
}

TEST_CASE("dangling references name the holder and wrong kinds count as dangling") {
  auto r = check(R"({"@id":"a","participants":[{"@id":"p","roleName":"r","entity":"a"}]})");
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == ViolationCode::DanglingRef);
  CHECK(r.violations[0].element_id == "p");
  auto rel = check(R"({"@id":"a","entities":[{"@id":"e","name":"E"}],"relations":[
                     {"@id":"r","name":"n","relationSubject":"e","relationObject":"nope"}]})");
  CHECK(rel.ids_with(ViolationCode::DanglingRef) == std::vector<std::string>{"r"});
}

TEST_CASE("entities are referenceable document wide") {
  auto r = check(R"({"@id":"p","isSchema":true,"children":["a","b"]},{"@id":"a","entities":[{"@id":"e","name":"E"}]},
                   {"@id":"b","participants":[{"@id":"x","roleName":"r","entity":"e"}]})");
  CHECK(r.empty());
}

TEST_CASE("strict mode promotes cross-parent outlinks") {
  const char* events = R"({"@id":"p","isSchema":true,"children":["a"]},{"@id":"q","isSchema":true,"children":["b"]},
                           {"@id":"a","outlinks":["b"]},{"@id":"b"})";
  CHECK_FALSE(check(events).has_errors());
  CHECK(check(events, {true}).has_errors());
}

TEST_CASE("gates match any kind in outlinks") {
  auto r = check(R"({"@id":"p","isSchema":true,"children":["g","c"]},
                   {"@id":"g","comment":"container node","children_gate":"xor","isSchema":true,"children":["x"]},
                   {"@id":"c","isSchema":true,"children":["y"],"outlinks":["g"]},{"@id":"x"},{"@id":"y"})");
  CHECK(r.empty());
}

TEST_CASE("hierarchy and temporal cycles agree with path enumeration on all graphs up to 3 nodes") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::uint32_t mask = 0; mask < (1u << (n * n)); ++mask) {
      std::vector<oracle::Edge> edges;
      for (std::size_t b = 0; b < n * n; ++b)
        if (mask >> b & 1u) edges.push_back({b / n, b % n});
      auto want = oracle::cyclic_nodes(n, edges);
      CAPTURE(mask);
      CHECK(flagged(validate(graph_doc(n, edges, true)), ViolationCode::HierarchyCycle) == want);
      CHECK(flagged(validate(graph_doc(n, edges, false)), ViolationCode::TemporalCycle) == want);
    }
}

TEST_CASE("report serializes to an array of violation objects") {
  auto j = check(R"({"@id":"a","isSchema":true})").to_json();
  REQUIRE(j.is_array());
  CHECK(j[0]["code"] == "IS_SCHEMA_MISMATCH");
  CHECK(j[0]["element_id"] == "a");
  CHECK(j[0]["severity"] == "warning");
}
