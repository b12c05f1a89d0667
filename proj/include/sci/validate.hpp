#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sci/sdf.hpp"

namespace sci {

enum class ViolationCode {
  DuplicateId,
  DanglingRef,
  HierarchyCycle,
  MultipleParents,
  OutlinkKindMismatch,
  OutlinkCrossParent,
  TemporalCycle,
  IsSchemaMismatch,
  GateIllegalFields,
  BadGateKind,
  GateEmpty,
  SelfRelation,
  EmptyName,
};

/// Upper snake case, e.g. "HIERARCHY_CYCLE".
std::string_view to_string(ViolationCode code) noexcept;

enum class Severity { Error, Warning };

std::string_view to_string(Severity s) noexcept;

struct Violation {
  ViolationCode code;
  std::string element_id;
  std::string message;
  Severity severity;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const noexcept { return violations.empty(); }
  bool has_errors() const noexcept;
  std::size_t count(ViolationCode code) const noexcept;
  std::size_t error_count() const noexcept;
  /// Element ids carrying `code`, in report order.
  std::vector<std::string> ids_with(ViolationCode code) const;

  Json to_json() const;
};

struct ValidateOptions {
  // Promotes OUTLINK_CROSS_PARENT to an error.
  bool strict = false;
};

/// Reports every violated structural invariant; never throws. Cycle codes are
/// reported once per event lying on a cycle.
ValidationReport validate(const SchemaDocument& doc, ValidateOptions options = {});

}  // namespace sci
