#include "sci/edit.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "sci/digraph.hpp"
#include "sci/error.hpp"

namespace sci {

std::string_view to_string(CommandKind kind) noexcept {
  switch (kind) {
    case CommandKind::AddEvent: return "add_event";
    case CommandKind::AddParticipant: return "add_participant";
    case CommandKind::AddRelation: return "add_relation";
    case CommandKind::AddOutlink: return "add_outlink";
    case CommandKind::AddXorGate: return "add_xor_gate";
    case CommandKind::LinkGateChild: return "link_gate_child";
    case CommandKind::AddEntity: return "add_entity";
    case CommandKind::UpdateEvent: return "update_event";
    case CommandKind::RemoveElement: return "remove_element";
    case CommandKind::ReplaceDocument: return "replace_document";
  }
  return "unknown";
}

std::string allocate_id(const SchemaDocument& doc, std::string_view collection) {
  const std::string prefix = doc.id + "/" + std::string(collection) + "/";
  std::uint64_t highest = 0;
  auto consider = [&](const std::string& id) {
    if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return;
    std::uint64_t n = 0;
    const char* first = id.data() + prefix.size();
    const char* last = id.data() + id.size();
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec == std::errc{} && ptr == last) highest = std::max(highest, n);
  };
  for (const auto& ev : doc.events) {
    consider(ev.id);
    for (const auto& e : ev.entities) consider(e.id);
    for (const auto& p : ev.participants) consider(p.id);
    for (const auto& r : ev.relations) consider(r.id);
  }
  return prefix + std::to_string(highest + 1);
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

std::size_t event_at(const SchemaDocument& doc, const std::string& id, ErrorCode missing = ErrorCode::EventNotFound) {
  for (std::size_t i = 0; i < doc.events.size(); ++i)
    if (doc.events[i].id == id) return i;
  fail(missing, "no event '" + id + "'");
}

void require_name(const std::string& value, std::string_view what) {
  if (value.empty()) fail(ErrorCode::EmptyName, std::string(what) + " must not be empty");
}

void mark_curated(SchemaDocument& doc, const std::string& id) { doc.provenance[id] = Provenance::Curated; }

// Events listing `id` as a child.
std::vector<std::size_t> parents_of(const SchemaDocument& doc, const std::string& id) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.events.size(); ++i) {
    const auto& kids = doc.events[i].children;
    if (std::find(kids.begin(), kids.end(), id) != kids.end()) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> first_parent(const SchemaDocument& doc, const std::string& id) {
  auto ps = parents_of(doc, id);
  if (ps.empty()) return std::nullopt;
  return ps.front();
}

void resync_gate(EventNode& ev) {
  if (ev.is_gate()) ev.is_schema = !ev.children.empty();
}

}  // namespace

ApplyResult add_event(const SchemaDocument& doc, const AddEventArgs& args) {
  require_name(args.name, "event name");
  std::optional<std::size_t> parent;
  if (args.parent) {
    parent = event_at(doc, *args.parent, ErrorCode::ParentNotFound);
    if (kind_of(doc.events[*parent]) == EventKind::Primitive)
      fail(ErrorCode::ParentIsPrimitive, "event '" + *args.parent + "' is a primitive event");
  }
  ApplyResult out{doc, {}};
  EventNode ev;
  ev.id = allocate_id(doc, "Events");
  ev.name = args.name;
  ev.description = args.description;
  ev.grounding = args.grounding;
  ev.is_schema = args.is_chapter;
  out.created_ids.push_back(ev.id);
  mark_curated(out.doc, ev.id);
  if (parent) {
    auto& p = out.doc.events[*parent];
    p.children.push_back(ev.id);
    p.is_schema = true;
  }
  out.doc.events.push_back(std::move(ev));
  return out;
}

ApplyResult add_entity(const SchemaDocument& doc, const AddEntityArgs& args) {
  std::size_t scope = event_at(doc, args.scope_event);
  if (doc.events[scope].is_gate()) fail(ErrorCode::EventIsGate, "gate '" + args.scope_event + "' cannot hold entities");
  require_name(args.name, "entity name");
  ApplyResult out{doc, {}};
  EntityRecord e;
  e.id = allocate_id(doc, "Entities");
  e.name = args.name;
  e.grounding = args.grounding;
  out.created_ids.push_back(e.id);
  mark_curated(out.doc, e.id);
  out.doc.events[scope].entities.push_back(std::move(e));
  return out;
}

ApplyResult add_participant(const SchemaDocument& doc, const AddParticipantArgs& args) {
  std::size_t target = event_at(doc, args.event);
  switch (kind_of(doc.events[target])) {
    case EventKind::Gate: fail(ErrorCode::EventIsGate, "gate '" + args.event + "' cannot have participants");
    case EventKind::Chapter:
      fail(ErrorCode::EventIsChapter, "participants belong on primitive events; '" + args.event + "' is a chapter");
    case EventKind::Primitive: break;
  }
  require_name(args.role_name, "role name");

  ApplyResult out{doc, {}};
  std::string entity_id;
  std::optional<std::string> created_entity;
  if (const auto* existing = std::get_if<std::string>(&args.entity)) {
    DocIndex index(doc);
    const auto* slot = index.find(*existing);
    if (!slot || slot->kind != DocIndex::Kind::Entity) fail(ErrorCode::EntityNotFound, "no entity '" + *existing + "'");
    entity_id = *existing;
  } else {
    const auto& spec = std::get<NewEntitySpec>(args.entity);
    auto created = add_entity(doc, {args.event, spec.name, spec.grounding});
    out.doc = std::move(created.doc);
    entity_id = created.created_ids.front();
    created_entity = entity_id;
  }

  ParticipantRecord p;
  p.id = allocate_id(out.doc, "Participants");
  p.role_name = args.role_name;
  p.entity = entity_id;
  p.name = args.participant_name;
  out.created_ids.push_back(p.id);
  if (created_entity) out.created_ids.push_back(*created_entity);
  mark_curated(out.doc, p.id);
  out.doc.events[target].participants.push_back(std::move(p));
  return out;
}

ApplyResult add_relation(const SchemaDocument& doc, const AddRelationArgs& args) {
  DocIndex index(doc);
  const auto* subject = index.find(args.subject);
  if (!subject || subject->kind != DocIndex::Kind::Entity)
    fail(ErrorCode::EntityNotFound, "subject: no entity '" + args.subject + "'");
  const auto* object = index.find(args.object);
  if (!object || object->kind != DocIndex::Kind::Entity)
    fail(ErrorCode::EntityNotFound, "object: no entity '" + args.object + "'");
  require_name(args.name, "relation name");

  ApplyResult out{doc, {}};
  RelationRecord r;
  r.id = allocate_id(doc, "Relations");
  r.name = args.name;
  r.subject = args.subject;
  r.object = args.object;
  r.grounding = args.grounding;
  out.created_ids.push_back(r.id);
  mark_curated(out.doc, r.id);
  out.doc.events[subject->event].relations.push_back(std::move(r));
  return out;
}

ApplyResult add_outlink(const SchemaDocument& doc, const AddOutlinkArgs& args, const EditOptions& options) {
  std::size_t s = event_at(doc, args.source);
  std::size_t t = event_at(doc, args.target);
  if (s == t) fail(ErrorCode::WouldCreateTemporalCycle, "an event cannot precede itself");
  const auto& src = doc.events[s];
  const auto& dst = doc.events[t];
  EventKind ks = kind_of(src), kt = kind_of(dst);
  if (ks != kt && ks != EventKind::Gate && kt != EventKind::Gate)
    fail(ErrorCode::KindMismatch, "outlinks join events of the same type; '" + src.id + "' is a " +
                                      std::string(to_string(ks)) + ", '" + dst.id + "' is a " +
                                      std::string(to_string(kt)));
  if (std::find(src.outlinks.begin(), src.outlinks.end(), dst.id) != src.outlinks.end())
    fail(ErrorCode::DuplicateOutlink, "outlink '" + src.id + "' -> '" + dst.id + "' already exists");

  auto ps = first_parent(doc, src.id);
  auto pt = first_parent(doc, dst.id);
  if (ps != pt) {
    if (options.strict) fail(ErrorCode::CrossParent, "'" + src.id + "' and '" + dst.id + "' have different parents");
  } else {
    // Cycle check over the sibling outlink graph.
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < doc.events.size(); ++i)
      if (first_parent(doc, doc.events[i].id) == ps) group.push_back(i);
    auto local = [&](const std::string& id) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < group.size(); ++i)
        if (doc.events[group[i]].id == id) return i;
      return std::nullopt;
    };
    digraph::Adjacency adj(group.size());
    for (std::size_t i = 0; i < group.size(); ++i)
      for (const auto& o : doc.events[group[i]].outlinks)
        if (auto j = local(o)) adj[i].push_back(*j);
    if (digraph::reachable(adj, *local(dst.id), *local(src.id)))
      fail(ErrorCode::WouldCreateTemporalCycle, "'" + dst.id + "' already precedes '" + src.id + "'");
  }

  ApplyResult out{doc, {}};
  out.doc.events[s].outlinks.push_back(dst.id);
  return out;
}

ApplyResult add_xor_gate(const SchemaDocument& doc, const AddXorGateArgs& args) {
  std::size_t parent = event_at(doc, args.parent, ErrorCode::ParentNotFound);
  switch (kind_of(doc.events[parent])) {
    case EventKind::Primitive: fail(ErrorCode::ParentIsPrimitive, "event '" + args.parent + "' is a primitive event");
    case EventKind::Gate: fail(ErrorCode::NotAChapter, "gates nest under chapter events, '" + args.parent + "' is a gate");
    case EventKind::Chapter: break;
  }
  require_name(args.name, "gate name");
  ApplyResult out{doc, {}};
  EventNode gate;
  gate.id = allocate_id(doc, "Events");
  gate.name = args.name;
  gate.children_gate = GateKind::Xor;
  gate.gate_comment = std::string(kContainerNode);
  out.created_ids.push_back(gate.id);
  mark_curated(out.doc, gate.id);
  auto& p = out.doc.events[parent];
  p.children.push_back(gate.id);
  p.is_schema = true;
  out.doc.events.push_back(std::move(gate));
  return out;
}

ApplyResult link_gate_child(const SchemaDocument& doc, const LinkGateChildArgs& args) {
  std::size_t g = event_at(doc, args.gate);
  if (!doc.events[g].is_gate()) fail(ErrorCode::NotAGate, "event '" + args.gate + "' is not a gate");
  std::size_t e = event_at(doc, args.event);
  if (kind_of(doc.events[e]) != EventKind::Primitive)
    fail(ErrorCode::KindMismatch, "gates link primitive events; '" + args.event + "' is a " +
                                      std::string(to_string(kind_of(doc.events[e]))));
  const auto& kids = doc.events[g].children;
  if (std::find(kids.begin(), kids.end(), args.event) != kids.end())
    fail(ErrorCode::BadCommand, "'" + args.event + "' is already linked under '" + args.gate + "'");

  ApplyResult out{doc, {}};
  for (auto p : parents_of(doc, args.event)) {
    auto& list = out.doc.events[p].children;
    list.erase(std::remove(list.begin(), list.end(), args.event), list.end());
    resync_gate(out.doc.events[p]);
  }
  auto& gate = out.doc.events[g];
  gate.children.push_back(args.event);
  gate.is_schema = true;
  return out;
}

ApplyResult update_event(const SchemaDocument& doc, const UpdateEventArgs& args) {
  std::size_t i = event_at(doc, args.event);
  const auto& patch = args.patch;
  if (patch.empty()) fail(ErrorCode::EmptyPatch, "patch has no fields");
  if (patch.name) require_name(*patch.name, "event name");
  if (doc.events[i].is_gate() && patch.grounding && *patch.grounding)
    fail(ErrorCode::EventIsGate, "gates carry no grounding");
  if (patch.importance && (patch.importance->is_structured() || patch.importance->is_null()))
    fail(ErrorCode::BadCommand, "importance must be a scalar");

  ApplyResult out{doc, {}};
  auto& ev = out.doc.events[i];
  if (patch.name) ev.name = *patch.name;
  if (patch.description) ev.description = *patch.description;
  if (patch.grounding) ev.grounding = *patch.grounding;
  if (patch.repeatable) ev.repeatable = *patch.repeatable;
  if (patch.optional_flag) ev.optional_flag = *patch.optional_flag;
  if (patch.importance) ev.importance = *patch.importance;
  return out;
}

ApplyResult remove_element(const SchemaDocument& doc, const RemoveElementArgs& args) {
  DocIndex index(doc);
  const auto* slot = index.find(args.id);
  if (!slot) fail(ErrorCode::ElementNotFound, "no element '" + args.id + "'");

  std::set<std::string> dead_events, dead_entities, dead_items;
  if (slot->kind == DocIndex::Kind::Event) {
    std::vector<std::string> stack{args.id};
    while (!stack.empty()) {
      std::string id = stack.back();
      stack.pop_back();
      if (!dead_events.insert(id).second) continue;
      if (auto e = index.event_index(id)) {
        const auto& ev = doc.events[*e];
        for (const auto& c : ev.children) stack.push_back(c);
        for (const auto& ent : ev.entities) dead_entities.insert(ent.id);
        for (const auto& p : ev.participants) dead_items.insert(p.id);
        for (const auto& r : ev.relations) dead_items.insert(r.id);
      }
    }
  } else if (slot->kind == DocIndex::Kind::Entity) {
    dead_entities.insert(args.id);
  } else {
    dead_items.insert(args.id);
  }

  ApplyResult out{doc, {}};
  auto& events = out.doc.events;
  events.erase(std::remove_if(events.begin(), events.end(), [&](const EventNode& ev) { return dead_events.count(ev.id) > 0; }),
               events.end());
  auto drop_ids = [&](std::vector<std::string>& list) {
    list.erase(std::remove_if(list.begin(), list.end(), [&](const std::string& id) { return dead_events.count(id) > 0; }),
               list.end());
  };
  for (auto& ev : events) {
    const bool had_children = !ev.children.empty();
    drop_ids(ev.children);
    drop_ids(ev.outlinks);
    if (had_children) resync_gate(ev);
    ev.entities.erase(std::remove_if(ev.entities.begin(), ev.entities.end(),
                                     [&](const EntityRecord& e) { return dead_entities.count(e.id) > 0; }),
                      ev.entities.end());
    ev.participants.erase(std::remove_if(ev.participants.begin(), ev.participants.end(),
                                         [&](const ParticipantRecord& p) {
                                           bool dead = dead_items.count(p.id) > 0 || dead_entities.count(p.entity) > 0;
                                           if (dead) dead_items.insert(p.id);
                                           return dead;
                                         }),
                          ev.participants.end());
    ev.relations.erase(std::remove_if(ev.relations.begin(), ev.relations.end(),
                                      [&](const RelationRecord& r) {
                                        bool dead = dead_items.count(r.id) > 0 || dead_entities.count(r.subject) > 0 ||
                                                    dead_entities.count(r.object) > 0;
                                        if (dead) dead_items.insert(r.id);
                                        return dead;
                                      }),
                       ev.relations.end());
  }
  for (const auto* set : {&dead_events, &dead_entities, &dead_items})
    for (const auto& id : *set) out.doc.provenance.erase(id);
  return out;
}

ApplyResult replace_document(const SchemaDocument& doc, const ReplaceDocumentArgs& args) {
  ApplyResult out{parse_schema(std::string_view(args.bytes)), {}};
  // Elements pasted without provenance keep the tag they had before, or
  // become curated when new.
  auto tag = [&](const std::string& id) {
    if (out.doc.provenance.count(id)) return;
    auto prior = doc.provenance.find(id);
    out.doc.provenance[id] = prior != doc.provenance.end() ? prior->second : Provenance::Curated;
  };
  for (const auto& ev : out.doc.events) {
    tag(ev.id);
    for (const auto& e : ev.entities) tag(e.id);
    for (const auto& p : ev.participants) tag(p.id);
    for (const auto& r : ev.relations) tag(r.id);
  }
  return out;
}

ApplyResult apply_command(const SchemaDocument& doc, const EditCommand& command, const EditOptions& options) {
  return std::visit(
      [&](const auto& args) -> ApplyResult {
        using T = std::decay_t<decltype(args)>;
        if constexpr (std::is_same_v<T, AddEventArgs>) return add_event(doc, args);
        else if constexpr (std::is_same_v<T, AddParticipantArgs>) return add_participant(doc, args);
        else if constexpr (std::is_same_v<T, AddRelationArgs>) return add_relation(doc, args);
        else if constexpr (std::is_same_v<T, AddOutlinkArgs>) return add_outlink(doc, args, options);
        else if constexpr (std::is_same_v<T, AddXorGateArgs>) return add_xor_gate(doc, args);
        else if constexpr (std::is_same_v<T, LinkGateChildArgs>) return link_gate_child(doc, args);
        else if constexpr (std::is_same_v<T, AddEntityArgs>) return add_entity(doc, args);
        else if constexpr (std::is_same_v<T, UpdateEventArgs>) return update_event(doc, args);
        else if constexpr (std::is_same_v<T, RemoveElementArgs>) return remove_element(doc, args);
        else return replace_document(doc, args);
      },
      command.payload);
}

// ---------------------------------------------------------------------------

std::vector<EntityOverview> list_entities(const SchemaDocument& doc) {
  std::vector<EntityOverview> out;
  std::map<std::string, std::size_t, std::less<>> position;
  for (const auto& ev : doc.events)
    for (const auto& e : ev.entities) {
      position.emplace(e.id, out.size());
      out.push_back({e.id, e.name, e.grounding ? e.grounding->label : std::string{}, {}});
    }
  for (const auto& ev : doc.events)
    for (const auto& p : ev.participants) {
      auto it = position.find(p.entity);
      if (it == position.end()) continue;
      auto& events = out[it->second].events;
      if (events.empty() || events.back() != ev.id) events.push_back(ev.id);
    }
  return out;
}

Json to_json(const std::vector<EntityOverview>& entities) {
  Json out = Json::array();
  for (const auto& e : entities) {
    Json item = Json::object();
    item["id"] = e.id;
    item["name"] = e.name;
    item["wd_label"] = e.wd_label;
    item["events"] = e.events;
    out.push_back(std::move(item));
  }
  return out;
}

// ---------------------------------------------------------------------------
// envelope codec

namespace {

const Json& arg(const Json& args, std::string_view key) {
  auto it = args.find(key);
  if (it == args.end()) fail(ErrorCode::BadCommand, "missing argument '" + std::string(key) + "'");
  return *it;
}

std::string str_arg(const Json& args, std::string_view key) {
  const Json& v = arg(args, key);
  if (!v.is_string()) fail(ErrorCode::BadCommand, "argument '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::string opt_str_arg(const Json& args, std::string_view key) {
  return args.contains(key) && !args.at(key).is_null() ? str_arg(args, key) : std::string{};
}

std::optional<WdGrounding> grounding_arg(const Json& args) {
  if (!args.contains("wd_node") && !args.contains("wd_label") && !args.contains("wd_description")) return std::nullopt;
  return WdGrounding{str_arg(args, "wd_node"), str_arg(args, "wd_label"), str_arg(args, "wd_description")};
}

void put_grounding(Json& out, const std::optional<WdGrounding>& g) {
  if (!g) return;
  out["wd_node"] = g->node;
  out["wd_label"] = g->label;
  out["wd_description"] = g->description;
}

std::optional<bool> opt_bool_arg(const Json& args, std::string_view key) {
  if (!args.contains(key)) return std::nullopt;
  const Json& v = args.at(key);
  if (!v.is_boolean()) fail(ErrorCode::BadCommand, "argument '" + std::string(key) + "' must be a boolean");
  return v.get<bool>();
}

EventPatch parse_patch(const Json& p) {
  if (!p.is_object()) fail(ErrorCode::BadCommand, "patch must be an object");
  EventPatch patch;
  if (p.contains("name")) patch.name = str_arg(p, "name");
  if (p.contains("description")) patch.description = str_arg(p, "description");
  if (p.contains("grounding")) {
    const Json& g = p.at("grounding");
    if (g.is_null()) patch.grounding = std::optional<WdGrounding>{};
    else if (g.is_object()) patch.grounding = grounding_arg(g);
    else fail(ErrorCode::BadCommand, "grounding must be an object or null");
  }
  patch.repeatable = opt_bool_arg(p, "repeatable");
  patch.optional_flag = opt_bool_arg(p, "optional_flag");
  if (p.contains("importance")) patch.importance = p.at("importance");
  return patch;
}

CommandPayload parse_payload(std::string_view op, const Json& a) {
  if (op == "add_event") {
    AddEventArgs args;
    if (a.contains("parent") && !a.at("parent").is_null()) args.parent = str_arg(a, "parent");
    args.name = str_arg(a, "name");
    args.description = opt_str_arg(a, "description");
    args.grounding = grounding_arg(a);
    args.is_chapter = opt_bool_arg(a, "is_chapter").value_or(false);
    return args;
  }
  if (op == "add_participant") {
    AddParticipantArgs args;
    args.event = str_arg(a, "event");
    args.role_name = str_arg(a, "role_name");
    args.participant_name = opt_str_arg(a, "participant_name");
    if (a.contains("new_entity")) {
      const Json& spec = a.at("new_entity");
      if (!spec.is_object()) fail(ErrorCode::BadCommand, "new_entity must be an object");
      args.entity = NewEntitySpec{opt_str_arg(spec, "name"), grounding_arg(spec)};
    } else {
      args.entity = str_arg(a, "entity");
    }
    return args;
  }
  if (op == "add_relation")
    return AddRelationArgs{str_arg(a, "subject"), str_arg(a, "name"), grounding_arg(a), str_arg(a, "object")};
  if (op == "add_outlink") return AddOutlinkArgs{str_arg(a, "source"), str_arg(a, "target")};
  if (op == "add_xor_gate") return AddXorGateArgs{str_arg(a, "parent"), str_arg(a, "name")};
  if (op == "link_gate_child") return LinkGateChildArgs{str_arg(a, "gate"), str_arg(a, "event")};
  if (op == "add_entity") return AddEntityArgs{str_arg(a, "scope_event"), str_arg(a, "name"), grounding_arg(a)};
  if (op == "update_event") return UpdateEventArgs{str_arg(a, "event"), parse_patch(arg(a, "patch"))};
  if (op == "remove_element") return RemoveElementArgs{str_arg(a, "id")};
  if (op == "replace_document") {
    if (a.contains("bytes")) return ReplaceDocumentArgs{str_arg(a, "bytes")};
    const Json& d = arg(a, "document");
    return ReplaceDocumentArgs{d.dump()};
  }
  fail(ErrorCode::BadCommand, "unknown op '" + std::string(op) + "'");
}

}  // namespace

Envelope parse_envelope(const Json& value) {
  if (!value.is_object()) fail(ErrorCode::BadCommand, "envelope must be an object");
  std::string op = str_arg(value, "op");
  Json args = value.contains("args") ? value.at("args") : Json::object();
  if (!args.is_object()) fail(ErrorCode::BadCommand, "args must be an object");
  Envelope env;
  env.command.payload = parse_payload(op, args);
  if (value.contains("issued_at")) {
    const Json& seq = value.at("issued_at");
    if (!seq.is_number_unsigned()) fail(ErrorCode::BadCommand, "issued_at must be a non-negative integer");
    env.command.issued_at = seq.get<std::uint64_t>();
  }
  if (value.contains("expect_version") && !value.at("expect_version").is_null())
    env.expect_version = str_arg(value, "expect_version");
  return env;
}

Json to_json(const EditCommand& command) {
  Json args = Json::object();
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AddEventArgs>) {
          args["parent"] = a.parent ? Json(*a.parent) : Json(nullptr);
          args["name"] = a.name;
          args["description"] = a.description;
          put_grounding(args, a.grounding);
          args["is_chapter"] = a.is_chapter;
        } else if constexpr (std::is_same_v<T, AddParticipantArgs>) {
          args["event"] = a.event;
          args["role_name"] = a.role_name;
          args["participant_name"] = a.participant_name;
          if (const auto* id = std::get_if<std::string>(&a.entity)) {
            args["entity"] = *id;
          } else {
            const auto& spec = std::get<NewEntitySpec>(a.entity);
            Json s = Json::object();
            s["name"] = spec.name;
            put_grounding(s, spec.grounding);
            args["new_entity"] = std::move(s);
          }
        } else if constexpr (std::is_same_v<T, AddRelationArgs>) {
          args["subject"] = a.subject;
          args["name"] = a.name;
          put_grounding(args, a.grounding);
          args["object"] = a.object;
        } else if constexpr (std::is_same_v<T, AddOutlinkArgs>) {
          args["source"] = a.source;
          args["target"] = a.target;
        } else if constexpr (std::is_same_v<T, AddXorGateArgs>) {
          args["parent"] = a.parent;
          args["name"] = a.name;
        } else if constexpr (std::is_same_v<T, LinkGateChildArgs>) {
          args["gate"] = a.gate;
          args["event"] = a.event;
        } else if constexpr (std::is_same_v<T, AddEntityArgs>) {
          args["scope_event"] = a.scope_event;
          args["name"] = a.name;
          put_grounding(args, a.grounding);
        } else if constexpr (std::is_same_v<T, UpdateEventArgs>) {
          args["event"] = a.event;
          Json p = Json::object();
          if (a.patch.name) p["name"] = *a.patch.name;
          if (a.patch.description) p["description"] = *a.patch.description;
          if (a.patch.grounding) {
            if (*a.patch.grounding) {
              Json g = Json::object();
              put_grounding(g, *a.patch.grounding);
              p["grounding"] = std::move(g);
            } else {
              p["grounding"] = nullptr;
            }
          }
          if (a.patch.repeatable) p["repeatable"] = *a.patch.repeatable;
          if (a.patch.optional_flag) p["optional_flag"] = *a.patch.optional_flag;
          if (a.patch.importance) p["importance"] = *a.patch.importance;
          args["patch"] = std::move(p);
        } else if constexpr (std::is_same_v<T, RemoveElementArgs>) {
          args["id"] = a.id;
        } else {
          args["bytes"] = a.bytes;
        }
      },
      command.payload);
  Json out = Json::object();
  out["op"] = std::string(to_string(command.kind()));
  out["args"] = std::move(args);
  out["issued_at"] = command.issued_at;
  return out;
}

// ---------------------------------------------------------------------------

EditSession::EditSession(SchemaDocument initial, EditOptions options)
    : initial_(initial), current_(std::move(initial)), options_(options), base_version_(initial_.doc_version) {}

ApplyResult EditSession::apply_logged(const EditCommand& command) {
  ApplyResult result = apply_command(current_, command, options_);
  result.doc.doc_version = base_version_ + "." + std::to_string(command.issued_at);
  history_.push_back(current_);
  log_.push_back({command, result.doc.doc_version});
  current_ = result.doc;
  next_seq_ = std::max(next_seq_, command.issued_at + 1);
  return result;
}

ApplyResult EditSession::apply(EditCommand command, const std::optional<std::string>& expect_version) {
  if (expect_version && *expect_version != current_.doc_version)
    fail(ErrorCode::VersionConflict,
         "expected version '" + *expect_version + "' but document is at '" + current_.doc_version + "'");
  command.issued_at = next_seq_;
  ApplyResult result = apply_logged(command);
  redo_.clear();
  return result;
}

void EditSession::undo() {
  if (log_.empty()) fail(ErrorCode::NothingToUndo, "edit log is empty");
  redo_.push_back(std::move(log_.back()));
  log_.pop_back();
  current_ = std::move(history_.back());
  history_.pop_back();
}

void EditSession::redo() {
  if (redo_.empty()) fail(ErrorCode::NothingToRedo, "redo stack is empty");
  EditCommand command = redo_.back().command;
  apply_logged(command);
  redo_.pop_back();
}

EditSession EditSession::replay(SchemaDocument initial, const std::vector<LogEntry>& log, EditOptions options) {
  EditSession session(std::move(initial), options);
  for (const auto& entry : log) session.apply_logged(entry.command);
  return session;
}

}  // namespace sci
