#pragma once

// Curation commands over a SchemaDocument.
//
// Every command is a pure function from a document to a new document; a
// failing command throws sci::Error and the input is left untouched. An
// EditSession strings commands together with an undo/redo log that replays
// byte-for-byte.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sci/sdf.hpp"
#include "sci/validate.hpp"

namespace sci {

struct AddEventArgs {
  std::optional<std::string> parent;
  std::string name;
  std::optional<WdGrounding> grounding;
  std::string description;
  bool is_chapter = false;
};

struct NewEntitySpec {
  std::string name;
  std::optional<WdGrounding> grounding;
};

struct AddParticipantArgs {
  std::string event;
  std::string role_name;
  std::string participant_name;
  // Existing entity id, or an entity to create in the event's scope first.
  std::variant<std::string, NewEntitySpec> entity;
};

struct AddRelationArgs {
  std::string subject;
  std::string name;
  std::optional<WdGrounding> grounding;
  std::string object;
};

struct AddOutlinkArgs {
  std::string source;
  std::string target;
};

struct AddXorGateArgs {
  std::string parent;
  std::string name;
};

struct LinkGateChildArgs {
  std::string gate;
  std::string event;
};

struct AddEntityArgs {
  std::string scope_event;
  std::string name;
  std::optional<WdGrounding> grounding;
};

struct EventPatch {
  std::optional<std::string> name;
  std::optional<std::string> description;
  // Outer optional: field patched; inner: new grounding or cleared.
  std::optional<std::optional<WdGrounding>> grounding;
  std::optional<bool> repeatable;
  std::optional<bool> optional_flag;
  std::optional<Json> importance;

  bool empty() const noexcept {
    return !name && !description && !grounding && !repeatable && !optional_flag && !importance;
  }
};

struct UpdateEventArgs {
  std::string event;
  EventPatch patch;
};

struct RemoveElementArgs {
  std::string id;
};

struct ReplaceDocumentArgs {
  std::string bytes;
};

using CommandPayload =
    std::variant<AddEventArgs, AddParticipantArgs, AddRelationArgs, AddOutlinkArgs, AddXorGateArgs,
                 LinkGateChildArgs, AddEntityArgs, UpdateEventArgs, RemoveElementArgs, ReplaceDocumentArgs>;

enum class CommandKind {
  AddEvent,
  AddParticipant,
  AddRelation,
  AddOutlink,
  AddXorGate,
  LinkGateChild,
  AddEntity,
  UpdateEvent,
  RemoveElement,
  ReplaceDocument,
};

/// Envelope op name, e.g. "add_event".
std::string_view to_string(CommandKind kind) noexcept;

struct EditCommand {
  CommandPayload payload;
  std::uint64_t issued_at = 0;

  CommandKind kind() const noexcept { return static_cast<CommandKind>(payload.index()); }
};

struct EditOptions {
  // Rejects outlinks across parents instead of allowing them with a warning.
  bool strict = false;
};

struct ApplyResult {
  SchemaDocument doc;
  std::vector<std::string> created_ids;
};

// Individual operations. Each returns the new document plus the ids it
// created; the first created id is the primary one.
ApplyResult add_event(const SchemaDocument& doc, const AddEventArgs& args);
ApplyResult add_participant(const SchemaDocument& doc, const AddParticipantArgs& args);
ApplyResult add_relation(const SchemaDocument& doc, const AddRelationArgs& args);
ApplyResult add_outlink(const SchemaDocument& doc, const AddOutlinkArgs& args, const EditOptions& options = {});
ApplyResult add_xor_gate(const SchemaDocument& doc, const AddXorGateArgs& args);
ApplyResult link_gate_child(const SchemaDocument& doc, const LinkGateChildArgs& args);
ApplyResult add_entity(const SchemaDocument& doc, const AddEntityArgs& args);
ApplyResult update_event(const SchemaDocument& doc, const UpdateEventArgs& args);
ApplyResult remove_element(const SchemaDocument& doc, const RemoveElementArgs& args);
ApplyResult replace_document(const SchemaDocument& doc, const ReplaceDocumentArgs& args);

ApplyResult apply_command(const SchemaDocument& doc, const EditCommand& command, const EditOptions& options = {});

/// Next free id of the form `<doc-id>/<collection>/<n>`.
std::string allocate_id(const SchemaDocument& doc, std::string_view collection);

struct EntityOverview {
  std::string id;
  std::string name;
  std::string wd_label;
  std::vector<std::string> events;  // events with a participant bound to the entity

  bool operator==(const EntityOverview&) const = default;
};

std::vector<EntityOverview> list_entities(const SchemaDocument& doc);
Json to_json(const std::vector<EntityOverview>& entities);

// Command envelope: {"op": ..., "args": {...}, "expect_version": ...}.
struct Envelope {
  EditCommand command;
  std::optional<std::string> expect_version;
};

Envelope parse_envelope(const Json& value);
Json to_json(const EditCommand& command);

struct LogEntry {
  EditCommand command;
  std::string version;  // doc_version after the command
};

/// A document plus its edit history. Single writer; callers serialize access.
class EditSession {
 public:
  explicit EditSession(SchemaDocument initial, EditOptions options = {});

  const SchemaDocument& document() const noexcept { return current_; }
  const SchemaDocument& initial() const noexcept { return initial_; }
  const std::string& version() const noexcept { return current_.doc_version; }
  const std::vector<LogEntry>& log() const noexcept { return log_; }
  const EditOptions& options() const noexcept { return options_; }
  bool can_undo() const noexcept { return !log_.empty(); }
  bool can_redo() const noexcept { return !redo_.empty(); }

  /// Applies a fresh command: assigns its sequence number, stamps the new
  /// doc_version and clears the redo stack. Throws VersionConflict when
  /// `expect_version` is given and stale.
  ApplyResult apply(EditCommand command, const std::optional<std::string>& expect_version = std::nullopt);

  void undo();
  void redo();

  /// Rebuilds a session by re-running logged commands with their original
  /// sequence numbers.
  static EditSession replay(SchemaDocument initial, const std::vector<LogEntry>& log, EditOptions options = {});

 private:
  ApplyResult apply_logged(const EditCommand& command);

  SchemaDocument initial_;
  SchemaDocument current_;
  EditOptions options_;
  std::string base_version_;
  std::vector<LogEntry> log_;
  std::vector<SchemaDocument> history_;  // document before each log entry
  std::vector<LogEntry> redo_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace sci
