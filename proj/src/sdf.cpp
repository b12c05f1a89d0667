#include "sci/sdf.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "sci/digraph.hpp"
#include "sci/error.hpp"

namespace sci {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::MissingRequiredKey: return "MissingRequiredKey";
    case ErrorCode::WrongType: return "WrongType";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ParentNotFound: return "ParentNotFound";
    case ErrorCode::ParentIsPrimitive: return "ParentIsPrimitive";
    case ErrorCode::EventNotFound: return "EventNotFound";
    case ErrorCode::EventIsGate: return "EventIsGate";
    case ErrorCode::EventIsChapter: return "EventIsChapter";
    case ErrorCode::EntityNotFound: return "EntityNotFound";
    case ErrorCode::ElementNotFound: return "ElementNotFound";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::CrossParent: return "CrossParent";
    case ErrorCode::WouldCreateTemporalCycle: return "WouldCreateTemporalCycle";
    case ErrorCode::WouldCreateHierarchyCycle: return "WouldCreateHierarchyCycle";
    case ErrorCode::DuplicateOutlink: return "DuplicateOutlink";
    case ErrorCode::NotAGate: return "NotAGate";
    case ErrorCode::EmptyName: return "EmptyName";
    case ErrorCode::EmptyPatch: return "EmptyPatch";
    case ErrorCode::BadCommand: return "BadCommand";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
    case ErrorCode::NothingToRedo: return "NothingToRedo";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::NotAChapter: return "NotAChapter";
    case ErrorCode::TemporalCycle: return "TemporalCycle";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::EmptyGeneration: return "EmptyGeneration";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::InconsistentEdges: return "InconsistentEdges";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::MissingProvenance: return "MissingProvenance";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(GateKind kind) noexcept { return kind == GateKind::Or ? "or" : "xor"; }

std::optional<GateKind> gate_kind_from_string(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "or") return GateKind::Or;
  if (lower == "xor") return GateKind::Xor;
  return std::nullopt;
}

std::string_view to_string(Provenance p) noexcept {
  return p == Provenance::Induced ? "induced" : "curated";
}

std::optional<Provenance> provenance_from_string(std::string_view text) {
  if (text == "induced") return Provenance::Induced;
  if (text == "curated") return Provenance::Curated;
  return std::nullopt;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Chapter: return "chapter";
    case EventKind::Primitive: return "primitive";
    case EventKind::Gate: return "gate";
  }
  return "primitive";
}

EventKind kind_of(const EventNode& ev) noexcept {
  if (ev.is_gate()) return EventKind::Gate;
  if (ev.is_schema || !ev.children.empty()) return EventKind::Chapter;
  return EventKind::Primitive;
}

std::string_view to_string(DocIndex::Kind kind) noexcept {
  switch (kind) {
    case DocIndex::Kind::Event: return "event";
    case DocIndex::Kind::Entity: return "entity";
    case DocIndex::Kind::Participant: return "participant";
    case DocIndex::Kind::Relation: return "relation";
  }
  return "event";
}

// ---------------------------------------------------------------------------
// parsing

namespace {

std::string escape_pointer(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class Reader {
 public:
  Reader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(ErrorCode::WrongType, path_, "expected object at '" + path_ + "'");
  }

  std::string child_path(std::string_view key) const { return path_ + "/" + escape_pointer(key); }
  const std::string& path() const { return path_; }

  bool has(std::string_view key) const { return obj_.contains(key); }

  const Json& require(std::string_view key) {
    auto it = obj_.find(key);
    if (it == obj_.end())
      throw ParseError(ErrorCode::MissingRequiredKey, child_path(key),
                       "missing required key '" + child_path(key) + "'");
    seen_.emplace_back(key);
    return *it;
  }

  const Json* optional(std::string_view key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.emplace_back(key);
    return &*it;
  }

  std::string require_string(std::string_view key) { return as_string(require(key), key); }

  std::string optional_string(std::string_view key) {
    const Json* v = optional(key);
    return v ? as_string(*v, key) : std::string{};
  }

  bool optional_bool(std::string_view key) {
    const Json* v = optional(key);
    if (!v) return false;
    if (!v->is_boolean()) wrong_type(key, "boolean");
    return v->get<bool>();
  }

  const Json* optional_array(std::string_view key) {
    const Json* v = optional(key);
    if (v && !v->is_array()) wrong_type(key, "array");
    return v;
  }

  std::vector<std::string> string_list(std::string_view key) {
    std::vector<std::string> out;
    if (const Json* arr = optional_array(key)) {
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const Json& item = (*arr)[i];
        if (!item.is_string())
          throw ParseError(ErrorCode::WrongType, child_path(key) + "/" + std::to_string(i),
                           "expected string at '" + child_path(key) + "/" + std::to_string(i) + "'");
        out.push_back(item.get<std::string>());
      }
    }
    return out;
  }

  std::optional<WdGrounding> grounding() {
    static constexpr std::string_view keys[] = {"wd_node", "wd_label", "wd_description"};
    int present = 0;
    for (auto k : keys) present += has(k) ? 1 : 0;
    if (present == 0) return std::nullopt;
    WdGrounding g;
    g.node = require_string(keys[0]);
    g.label = require_string(keys[1]);
    g.description = require_string(keys[2]);
    return g;
  }

  [[noreturn]] void wrong_type(std::string_view key, std::string_view expected) const {
    throw ParseError(ErrorCode::WrongType, child_path(key),
                     "expected " + std::string(expected) + " at '" + child_path(key) + "'");
  }

  Json leftovers() const {
    Json extra = Json::object();
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) extra[it.key()] = it.value();
    return extra;
  }

 private:
  std::string as_string(const Json& v, std::string_view key) const {
    if (!v.is_string()) wrong_type(key, "string");
    return v.get<std::string>();
  }

  const Json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

class IdRegistry {
 public:
  void add(const std::string& id) {
    if (!ids_.insert(id).second)
      throw ParseError(ErrorCode::DuplicateId, id, "duplicate @id '" + id + "'");
  }

 private:
  std::set<std::string> ids_;
};

EntityRecord parse_entity(const Json& value, const std::string& path, IdRegistry& ids) {
  Reader r(value, path);
  EntityRecord e;
  e.id = r.require_string("@id");
  e.name = r.optional_string("name");
  e.grounding = r.grounding();
  e.extra = r.leftovers();
  ids.add(e.id);
  return e;
}

ParticipantRecord parse_participant(const Json& value, const std::string& path, IdRegistry& ids) {
  Reader r(value, path);
  ParticipantRecord p;
  p.id = r.require_string("@id");
  p.role_name = r.optional_string("roleName");
  p.entity = r.require_string("entity");
  p.name = r.optional_string("name");
  p.extra = r.leftovers();
  ids.add(p.id);
  return p;
}

RelationRecord parse_relation(const Json& value, const std::string& path, IdRegistry& ids) {
  Reader r(value, path);
  RelationRecord rel;
  rel.id = r.require_string("@id");
  rel.name = r.optional_string("name");
  rel.subject = r.require_string("relationSubject");
  rel.object = r.require_string("relationObject");
  rel.grounding = r.grounding();
  rel.extra = r.leftovers();
  ids.add(rel.id);
  return rel;
}

template <typename T, typename Fn>
std::vector<T> parse_objects(Reader& r, std::string_view key, IdRegistry& ids, Fn fn) {
  std::vector<T> out;
  if (const Json* arr = r.optional_array(key))
    for (std::size_t i = 0; i < arr->size(); ++i)
      out.push_back(fn((*arr)[i], r.child_path(key) + "/" + std::to_string(i), ids));
  return out;
}

EventNode parse_event(const Json& value, const std::string& path, IdRegistry& ids) {
  Reader r(value, path);
  EventNode ev;
  ev.id = r.require_string("@id");
  ids.add(ev.id);
  ev.name = r.optional_string("name");
  ev.description = r.optional_string("description");
  ev.grounding = r.grounding();
  ev.is_schema = r.optional_bool("isSchema");
  ev.repeatable = r.optional_bool("repeatable");
  ev.optional_flag = r.optional_bool("optional");
  if (const Json* gate = r.optional("children_gate")) {
    if (!gate->is_string()) r.wrong_type("children_gate", "\"or\" or \"xor\"");
    ev.children_gate = gate_kind_from_string(gate->get<std::string>());
    if (!ev.children_gate) r.wrong_type("children_gate", "\"or\" or \"xor\"");
  }
  ev.outlinks = r.string_list("outlinks");
  ev.participants = parse_objects<ParticipantRecord>(r, "participants", ids, parse_participant);
  ev.children = r.string_list("children");
  ev.entities = parse_objects<EntityRecord>(r, "entities", ids, parse_entity);
  ev.relations = parse_objects<RelationRecord>(r, "relations", ids, parse_relation);
  if (const Json* comment = r.optional("comment")) {
    if (!comment->is_string()) r.wrong_type("comment", "string");
    ev.gate_comment = comment->get<std::string>();
  }
  if (const Json* importance = r.optional("importance")) {
    if (importance->is_structured() || importance->is_null()) r.wrong_type("importance", "scalar");
    ev.importance = *importance;
  }
  ev.extra = r.leftovers();
  return ev;
}

}  // namespace

SchemaDocument parse_schema(const Json& value) {
  Reader r(value, "");
  SchemaDocument doc;
  IdRegistry ids;
  doc.id = r.require_string("@id");
  ids.add(doc.id);
  doc.sdf_version = r.require_string("sdfVersion");
  doc.doc_version = r.require_string("version");
  const Json& events = r.require("events");
  if (!events.is_array()) r.wrong_type("events", "array");
  for (std::size_t i = 0; i < events.size(); ++i)
    doc.events.push_back(parse_event(events[i], "/events/" + std::to_string(i), ids));
  if (const Json* prov = r.optional("provenance")) {
    if (!prov->is_object()) r.wrong_type("provenance", "object");
    for (auto it = prov->begin(); it != prov->end(); ++it) {
      std::optional<Provenance> p;
      if (it.value().is_string()) p = provenance_from_string(it.value().get<std::string>());
      if (!p)
        throw ParseError(ErrorCode::WrongType, "/provenance/" + escape_pointer(it.key()),
                         "provenance must be \"induced\" or \"curated\"");
      doc.provenance[it.key()] = *p;
    }
  }
  doc.extra = r.leftovers();
  return doc;
}

SchemaDocument parse_schema(std::string_view bytes) {
  Json value;
  try {
    value = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(ErrorCode::MalformedJson, "", e.what());
  }
  return parse_schema(value);
}

// ---------------------------------------------------------------------------
// serialization

namespace {

void put_grounding(Json& out, const std::optional<WdGrounding>& g) {
  if (!g) return;
  out["wd_node"] = g->node;
  out["wd_label"] = g->label;
  out["wd_description"] = g->description;
}

void put_extra(Json& out, const Json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
}

Json entity_json(const EntityRecord& e) {
  Json out = Json::object();
  out["@id"] = e.id;
  out["name"] = e.name;
  put_grounding(out, e.grounding);
  put_extra(out, e.extra);
  return out;
}

Json participant_json(const ParticipantRecord& p) {
  Json out = Json::object();
  out["@id"] = p.id;
  out["roleName"] = p.role_name;
  out["entity"] = p.entity;
  if (!p.name.empty()) out["name"] = p.name;
  put_extra(out, p.extra);
  return out;
}

Json relation_json(const RelationRecord& rel) {
  Json out = Json::object();
  out["@id"] = rel.id;
  out["name"] = rel.name;
  out["relationSubject"] = rel.subject;
  out["relationObject"] = rel.object;
  put_grounding(out, rel.grounding);
  put_extra(out, rel.extra);
  return out;
}

Json event_json(const EventNode& ev) {
  Json out = Json::object();
  out["@id"] = ev.id;
  out["name"] = ev.name;
  out["description"] = ev.description;
  put_grounding(out, ev.grounding);
  out["isSchema"] = ev.is_schema;
  out["repeatable"] = ev.repeatable;
  out["optional"] = ev.optional_flag;
  if (ev.children_gate) out["children_gate"] = std::string(to_string(*ev.children_gate));
  out["outlinks"] = ev.outlinks;
  out["participants"] = Json::array();
  for (const auto& p : ev.participants) out["participants"].push_back(participant_json(p));
  out["children"] = ev.children;
  out["entities"] = Json::array();
  for (const auto& e : ev.entities) out["entities"].push_back(entity_json(e));
  out["relations"] = Json::array();
  for (const auto& rel : ev.relations) out["relations"].push_back(relation_json(rel));
  if (ev.gate_comment) out["comment"] = *ev.gate_comment;
  if (ev.importance) out["importance"] = *ev.importance;
  put_extra(out, ev.extra);
  return out;
}

}  // namespace

Json to_json(const SchemaDocument& doc) {
  Json out = Json::object();
  out["@id"] = doc.id;
  out["sdfVersion"] = doc.sdf_version;
  out["version"] = doc.doc_version;
  out["events"] = Json::array();
  for (const auto& ev : doc.events) out["events"].push_back(event_json(ev));
  if (!doc.provenance.empty()) {
    Json prov = Json::object();
    for (const auto& [id, p] : doc.provenance) prov[id] = std::string(to_string(p));
    out["provenance"] = std::move(prov);
  }
  put_extra(out, doc.extra);
  return out;
}

std::string serialize_schema(const SchemaDocument& doc) {
  return to_json(doc).dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

// ---------------------------------------------------------------------------
// lookup

EventNode* find_event(SchemaDocument& doc, std::string_view id) {
  for (auto& ev : doc.events)
    if (ev.id == id) return &ev;
  return nullptr;
}

const EventNode* find_event(const SchemaDocument& doc, std::string_view id) {
  for (const auto& ev : doc.events)
    if (ev.id == id) return &ev;
  return nullptr;
}

DocIndex::DocIndex(const SchemaDocument& doc) : parents(doc.events.size()) {
  auto add = [&](const std::string& id, Slot slot) {
    if (!slots.emplace(id, slot).second) duplicates.push_back(id);
  };
  for (std::size_t e = 0; e < doc.events.size(); ++e) {
    const auto& ev = doc.events[e];
    add(ev.id, {Kind::Event, e, 0});
    for (std::size_t i = 0; i < ev.entities.size(); ++i) add(ev.entities[i].id, {Kind::Entity, e, i});
    for (std::size_t i = 0; i < ev.participants.size(); ++i)
      add(ev.participants[i].id, {Kind::Participant, e, i});
    for (std::size_t i = 0; i < ev.relations.size(); ++i) add(ev.relations[i].id, {Kind::Relation, e, i});
  }
  for (std::size_t e = 0; e < doc.events.size(); ++e)
    for (const auto& child : doc.events[e].children)
      if (auto c = event_index(child); c && !parents[*c]) parents[*c] = e;
}

const DocIndex::Slot* DocIndex::find(std::string_view id) const {
  auto it = slots.find(id);
  return it == slots.end() ? nullptr : &it->second;
}

std::optional<std::size_t> DocIndex::event_index(std::string_view id) const {
  const Slot* s = find(id);
  if (!s || s->kind != Kind::Event) return std::nullopt;
  return s->event;
}

std::optional<std::size_t> DocIndex::parent_of(std::size_t event) const { return parents.at(event); }

// ---------------------------------------------------------------------------

std::vector<std::string> temporal_order(const SchemaDocument& doc, std::string_view parent) {
  const EventNode* p = find_event(doc, parent);
  if (!p) throw Error(ErrorCode::EventNotFound, "no event '" + std::string(parent) + "'");
  if (kind_of(*p) == EventKind::Primitive)
    throw Error(ErrorCode::NotAChapter, "event '" + std::string(parent) + "' has no children");

  DocIndex index(doc);
  const auto& kids = p->children;
  digraph::Adjacency adj(kids.size());
  for (std::size_t i = 0; i < kids.size(); ++i) {
    auto ev = index.event_index(kids[i]);
    if (!ev) continue;
    for (const auto& target : doc.events[*ev].outlinks) {
      auto it = std::find(kids.begin(), kids.end(), target);
      if (it != kids.end()) adj[i].push_back(static_cast<std::size_t>(it - kids.begin()));
    }
  }
  auto order = digraph::stable_topological_order(adj);
  if (!order) {
    auto cyclic = digraph::nodes_on_cycles(adj);
    std::string members;
    for (std::size_t i = 0; i < kids.size(); ++i)
      if (cyclic[i]) members += (members.empty() ? "" : ", ") + kids[i];
    throw Error(ErrorCode::TemporalCycle, "outlinks under '" + std::string(parent) + "' form a cycle: " + members);
  }
  std::vector<std::string> out;
  out.reserve(order->size());
  for (auto i : *order) out.push_back(kids[i]);
  return out;
}

}  // namespace sci
