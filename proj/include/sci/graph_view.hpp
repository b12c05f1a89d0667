#pragma once

// Render-ready topology of a document: nodes with style classes and typed
// edges. Layout is left to the client.

#include <string>
#include <vector>

#include "sci/sdf.hpp"

namespace sci {

enum class NodeKind { Chapter, Primitive, Gate, Participant };
enum class StyleClass { ChapterDark, ChapterOptional, Primitive, Gate, Participant };
enum class EdgeKind { Hierarchy, Outlink, ParticipantRole, Relation };
enum class EdgeStyle { Plain, BoldArrow, DashedArrow };

std::string_view to_string(NodeKind v) noexcept;
std::string_view to_string(StyleClass v) noexcept;
std::string_view to_string(EdgeKind v) noexcept;
std::string_view to_string(EdgeStyle v) noexcept;

struct GraphNode {
  std::string id;
  std::string label;
  NodeKind kind;
  StyleClass style_class;
  bool repeatable = false;
  bool optional = false;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string source;
  std::string target;
  EdgeKind kind;
  std::string label;
  EdgeStyle style;

  bool operator==(const GraphEdge&) const = default;
};

struct GraphView {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  Json to_json() const;
};

/// Nodes: every event, then every participant. Edges: hierarchy
/// (parent -> child), outlinks, event -> participant (labelled by role) and
/// relations drawn between participant nodes of the related entities.
/// References that do not resolve are skipped.
GraphView build_graph_view(const SchemaDocument& doc);

/// Graphviz rendering of the same topology; style classes become attributes.
std::string to_dot(const GraphView& view);

}  // namespace sci
