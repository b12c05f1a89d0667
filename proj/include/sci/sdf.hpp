#pragma once

// Schema Data Format document model.
//
// A document is a flat array of events; hierarchy and temporal order are
// expressed through `children` / `outlinks` id lists. Entities are declared
// under events but referenceable from anywhere in the document.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sci {

using Json = nlohmann::ordered_json;

/// Marker stored in `comment` that turns an event into a logic gate.
inline constexpr std::string_view kContainerNode = "container node";

struct WdGrounding {
  std::string node;
  std::string label;
  std::string description;

  bool operator==(const WdGrounding&) const = default;
};

enum class GateKind { Or, Xor };

std::string_view to_string(GateKind kind) noexcept;
std::optional<GateKind> gate_kind_from_string(std::string_view text);

enum class Provenance { Induced, Curated };

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> provenance_from_string(std::string_view text);

struct EntityRecord {
  std::string id;
  std::string name;
  std::optional<WdGrounding> grounding;
  Json extra = Json::object();

  bool operator==(const EntityRecord&) const = default;
};

struct ParticipantRecord {
  std::string id;
  std::string role_name;
  std::string entity;
  // Display name entered in the add-participant dialog; serialized as `name`.
  std::string name;
  Json extra = Json::object();

  bool operator==(const ParticipantRecord&) const = default;
};

struct RelationRecord {
  std::string id;
  std::string name;
  std::string subject;
  std::string object;
  std::optional<WdGrounding> grounding;
  Json extra = Json::object();

  bool operator==(const RelationRecord&) const = default;
};

struct EventNode {
  std::string id;
  std::string name;
  std::string description;
  std::optional<WdGrounding> grounding;
  bool is_schema = false;
  bool repeatable = false;
  bool optional_flag = false;
  std::optional<GateKind> children_gate;
  std::vector<std::string> outlinks;
  std::vector<ParticipantRecord> participants;
  std::vector<std::string> children;
  std::vector<EntityRecord> entities;
  std::vector<RelationRecord> relations;
  std::optional<std::string> gate_comment;
  // Opaque scalar set from the edit dialog; absent unless set.
  std::optional<Json> importance;
  Json extra = Json::object();

  bool is_gate() const noexcept { return gate_comment && *gate_comment == kContainerNode; }

  bool operator==(const EventNode&) const = default;
};

struct SchemaDocument {
  std::string id;
  std::string sdf_version;
  std::string doc_version;
  std::vector<EventNode> events;
  std::map<std::string, Provenance> provenance;
  Json extra = Json::object();

  bool operator==(const SchemaDocument&) const = default;
};

enum class EventKind { Chapter, Primitive, Gate };

std::string_view to_string(EventKind kind) noexcept;

/// Structural kind: gates by marker, chapters by declaration or by having children.
EventKind kind_of(const EventNode& ev) noexcept;

/// Parses UTF-8 JSON. Checks shape, required keys and id uniqueness only;
/// cross-references are left to validate(). Throws ParseError.
SchemaDocument parse_schema(std::string_view bytes);
SchemaDocument parse_schema(const Json& value);
inline SchemaDocument parse_schema(const std::string& bytes) { return parse_schema(std::string_view(bytes)); }
inline SchemaDocument parse_schema(const char* bytes) { return parse_schema(std::string_view(bytes)); }

/// Canonical rendering: fixed key order per object kind, 2-space indent,
/// trailing newline. Unknown keys follow the known ones in original order.
std::string serialize_schema(const SchemaDocument& doc);
Json to_json(const SchemaDocument& doc);

// Lookup helpers. Linear scans; callers needing many lookups build a DocIndex.
EventNode* find_event(SchemaDocument& doc, std::string_view id);
const EventNode* find_event(const SchemaDocument& doc, std::string_view id);

/// Position of every element of a document, built once per query.
struct DocIndex {
  enum class Kind { Event, Entity, Participant, Relation };
  struct Slot {
    Kind kind;
    std::size_t event;  // owning event (or the event itself)
    std::size_t item;   // index within the owning list; unused for events
  };

  explicit DocIndex(const SchemaDocument& doc);

  const Slot* find(std::string_view id) const;
  std::optional<std::size_t> event_index(std::string_view id) const;
  std::optional<std::size_t> parent_of(std::size_t event) const;

  std::map<std::string, Slot, std::less<>> slots;
  std::vector<std::string> duplicates;
  // First parent listing each event as a child, if any.
  std::vector<std::optional<std::size_t>> parents;
};

std::string_view to_string(DocIndex::Kind kind) noexcept;

/// Ids of a parent's children in temporal order: a topological order under
/// the outlinks among them, ties broken by `children` order.
/// Throws EventNotFound / NotAChapter / TemporalCycle.
std::vector<std::string> temporal_order(const SchemaDocument& doc, std::string_view parent);

}  // namespace sci
