#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sci {

enum class ErrorCode {
  // parsing
  MalformedJson,
  MissingRequiredKey,
  WrongType,
  DuplicateId,
  // edit commands
  ParentNotFound,
  ParentIsPrimitive,
  EventNotFound,
  EventIsGate,
  EventIsChapter,
  EntityNotFound,
  ElementNotFound,
  KindMismatch,
  CrossParent,
  WouldCreateTemporalCycle,
  WouldCreateHierarchyCycle,
  DuplicateOutlink,
  NotAGate,
  EmptyName,
  EmptyPatch,
  BadCommand,
  NothingToUndo,
  NothingToRedo,
  VersionConflict,
  // sdf queries
  NotAChapter,
  TemporalCycle,
  // induction
  BackendFailure,
  EmptyGeneration,
  FixtureMiss,
  InconsistentEdges,
  BadInput,
  // instantiation
  MissingProvenance,
  // transport
  NotFound,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base for every error thrown by the library. `code()` is the stable,
/// machine-readable name used by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

/// Parse failures carry the JSON pointer of the offending value.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::string path, const std::string& message)
      : Error(code, message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sci
