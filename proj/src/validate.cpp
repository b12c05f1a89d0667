#include "sci/validate.hpp"

#include <algorithm>
#include <set>

#include "sci/digraph.hpp"

namespace sci {

std::string_view to_string(ViolationCode code) noexcept {
  switch (code) {
    case ViolationCode::DuplicateId: return "DUPLICATE_ID";
    case ViolationCode::DanglingRef: return "DANGLING_REF";
    case ViolationCode::HierarchyCycle: return "HIERARCHY_CYCLE";
    case ViolationCode::MultipleParents: return "MULTIPLE_PARENTS";
    case ViolationCode::OutlinkKindMismatch: return "OUTLINK_KIND_MISMATCH";
    case ViolationCode::OutlinkCrossParent: return "OUTLINK_CROSS_PARENT";
    case ViolationCode::TemporalCycle: return "TEMPORAL_CYCLE";
    case ViolationCode::IsSchemaMismatch: return "IS_SCHEMA_MISMATCH";
    case ViolationCode::GateIllegalFields: return "GATE_ILLEGAL_FIELDS";
    case ViolationCode::BadGateKind: return "BAD_GATE_KIND";
    case ViolationCode::GateEmpty: return "GATE_EMPTY";
    case ViolationCode::SelfRelation: return "SELF_RELATION";
    case ViolationCode::EmptyName: return "EMPTY_NAME";
  }
  return "UNKNOWN";
}

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "error" : "warning"; }

bool ValidationReport::has_errors() const noexcept { return error_count() > 0; }

std::size_t ValidationReport::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [](const Violation& v) { return v.severity == Severity::Error; }));
}

std::size_t ValidationReport::count(ViolationCode code) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [code](const Violation& v) { return v.code == code; }));
}

std::vector<std::string> ValidationReport::ids_with(ViolationCode code) const {
  std::vector<std::string> out;
  for (const auto& v : violations)
    if (v.code == code) out.push_back(v.element_id);
  return out;
}

Json ValidationReport::to_json() const {
  Json out = Json::array();
  for (const auto& v : violations) {
    Json item = Json::object();
    item["code"] = std::string(sci::to_string(v.code));
    item["element_id"] = v.element_id;
    item["message"] = v.message;
    item["severity"] = std::string(sci::to_string(v.severity));
    out.push_back(std::move(item));
  }
  return out;
}

namespace {

class Checker {
 public:
  Checker(const SchemaDocument& doc, ValidateOptions options) : doc_(doc), index_(doc), options_(options) {}

  ValidationReport run() {
    check_ids();
    check_references();
    check_hierarchy();
    check_events();
    check_outlinks();
    check_relations();
    return std::move(report_);
  }

 private:
  void add(ViolationCode code, const std::string& id, std::string message, Severity severity = Severity::Error) {
    report_.violations.push_back({code, id, std::move(message), severity});
  }

  void check_ids() {
    for (const auto& id : index_.duplicates) add(ViolationCode::DuplicateId, id, "@id '" + id + "' is used more than once");
    if (index_.find(doc_.id))
      add(ViolationCode::DuplicateId, doc_.id, "document @id '" + doc_.id + "' is reused by an element");
  }

  void expect(const std::string& holder, const std::string& field, const std::string& ref, DocIndex::Kind kind) {
    const auto* slot = index_.find(ref);
    if (!slot) {
      add(ViolationCode::DanglingRef, holder, field + " refers to unknown id '" + ref + "'");
    } else if (slot->kind != kind) {
      add(ViolationCode::DanglingRef, holder,
          field + " refers to '" + ref + "', which is a " + std::string(to_string(slot->kind)) + ", not a " +
              std::string(to_string(kind)));
    }
  }

  void check_references() {
    for (const auto& ev : doc_.events) {
      for (const auto& c : ev.children) expect(ev.id, "children", c, DocIndex::Kind::Event);
      for (const auto& o : ev.outlinks) expect(ev.id, "outlinks", o, DocIndex::Kind::Event);
      for (const auto& p : ev.participants) expect(p.id, "entity", p.entity, DocIndex::Kind::Entity);
      for (const auto& r : ev.relations) {
        expect(r.id, "relationSubject", r.subject, DocIndex::Kind::Entity);
        expect(r.id, "relationObject", r.object, DocIndex::Kind::Entity);
      }
    }
  }

  void check_hierarchy() {
    const std::size_t n = doc_.events.size();
    digraph::Adjacency adj(n);
    std::vector<std::set<std::size_t>> parents(n);
    for (std::size_t e = 0; e < n; ++e)
      for (const auto& c : doc_.events[e].children)
        if (auto child = index_.event_index(c)) {
          adj[e].push_back(*child);
          parents[*child].insert(e);
        }
    for (std::size_t e = 0; e < n; ++e)
      if (parents[e].size() > 1) {
        std::string names;
        for (auto p : parents[e]) names += (names.empty() ? "" : ", ") + doc_.events[p].id;
        add(ViolationCode::MultipleParents, doc_.events[e].id, "listed as a child of " + names);
      }
    auto cyclic = digraph::nodes_on_cycles(adj);
    for (std::size_t e = 0; e < n; ++e)
      if (cyclic[e]) add(ViolationCode::HierarchyCycle, doc_.events[e].id, "event is its own ancestor");
  }

  void check_events() {
    for (const auto& ev : doc_.events) {
      const bool has_children = !ev.children.empty();
      if (ev.is_schema != has_children) {
        if (has_children)
          add(ViolationCode::IsSchemaMismatch, ev.id, "event has children but isSchema is false");
        else if (ev.is_gate())
          add(ViolationCode::IsSchemaMismatch, ev.id, "gate has no children but isSchema is true");
        else
          add(ViolationCode::IsSchemaMismatch, ev.id, "chapter event has no children yet", Severity::Warning);
      }
      if (ev.is_gate()) {
        if (!ev.children_gate) add(ViolationCode::BadGateKind, ev.id, "gate has no children_gate");
        if (!ev.participants.empty() || !ev.entities.empty() || !ev.relations.empty() || ev.grounding)
          add(ViolationCode::GateIllegalFields, ev.id, "gate carries participants, entities, relations or grounding");
        if (!has_children) add(ViolationCode::GateEmpty, ev.id, "gate has no linked children", Severity::Warning);
      } else if (ev.children_gate && !has_children) {
        add(ViolationCode::BadGateKind, ev.id, "children_gate set on an event without children");
      }
      for (const auto& ent : ev.entities)
        if (ent.name.empty()) add(ViolationCode::EmptyName, ent.id, "entity name is empty");
    }
  }

  void check_outlinks() {
    const std::size_t n = doc_.events.size();
    digraph::Adjacency siblings(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto& src = doc_.events[s];
      for (const auto& target : src.outlinks) {
        auto t = index_.event_index(target);
        if (!t) continue;
        const auto& dst = doc_.events[*t];
        EventKind ks = kind_of(src), kt = kind_of(dst);
        if (ks != kt && ks != EventKind::Gate && kt != EventKind::Gate)
          add(ViolationCode::OutlinkKindMismatch, src.id,
              "outlink to '" + dst.id + "' joins a " + std::string(to_string(ks)) + " and a " +
                  std::string(to_string(kt)));
        if (index_.parent_of(s) != index_.parent_of(*t)) {
          add(ViolationCode::OutlinkCrossParent, src.id, "outlink to '" + dst.id + "' crosses parents",
              options_.strict ? Severity::Error : Severity::Warning);
        } else {
          siblings[s].push_back(*t);
        }
      }
    }
    auto cyclic = digraph::nodes_on_cycles(siblings);
    for (std::size_t e = 0; e < n; ++e)
      if (cyclic[e]) add(ViolationCode::TemporalCycle, doc_.events[e].id, "event lies on an outlink cycle");
  }

  void check_relations() {
    for (const auto& ev : doc_.events)
      for (const auto& r : ev.relations)
        if (r.subject == r.object)
          add(ViolationCode::SelfRelation, r.id, "relation links entity '" + r.subject + "' to itself",
              Severity::Warning);
  }

  const SchemaDocument& doc_;
  DocIndex index_;
  ValidateOptions options_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const SchemaDocument& doc, ValidateOptions options) {
  return Checker(doc, options).run();
}

}  // namespace sci
