#include "sci/graph_view.hpp"

#include <map>
#include <set>
#include <sstream>

namespace sci {

std::string_view to_string(NodeKind v) noexcept {
  switch (v) {
    case NodeKind::Chapter: return "chapter";
    case NodeKind::Primitive: return "primitive";
    case NodeKind::Gate: return "gate";
    case NodeKind::Participant: return "participant";
  }
  return "primitive";
}

std::string_view to_string(StyleClass v) noexcept {
  switch (v) {
    case StyleClass::ChapterDark: return "chapter-dark";
    case StyleClass::ChapterOptional: return "chapter-optional";
    case StyleClass::Primitive: return "primitive";
    case StyleClass::Gate: return "gate";
    case StyleClass::Participant: return "participant";
  }
  return "primitive";
}

std::string_view to_string(EdgeKind v) noexcept {
  switch (v) {
    case EdgeKind::Hierarchy: return "hierarchy";
    case EdgeKind::Outlink: return "outlink";
    case EdgeKind::ParticipantRole: return "participant-role";
    case EdgeKind::Relation: return "relation";
  }
  return "hierarchy";
}

std::string_view to_string(EdgeStyle v) noexcept {
  switch (v) {
    case EdgeStyle::Plain: return "plain";
    case EdgeStyle::BoldArrow: return "bold-arrow";
    case EdgeStyle::DashedArrow: return "dashed-arrow";
  }
  return "plain";
}

Json GraphView::to_json() const {
  Json out = Json::object();
  out["nodes"] = Json::array();
  for (const auto& n : nodes) {
    Json item = Json::object();
    item["id"] = n.id;
    item["label"] = n.label;
    item["kind"] = std::string(to_string(n.kind));
    item["style_class"] = std::string(to_string(n.style_class));
    item["repeatable"] = n.repeatable;
    item["optional"] = n.optional;
    out["nodes"].push_back(std::move(item));
  }
  out["edges"] = Json::array();
  for (const auto& e : edges) {
    Json item = Json::object();
    item["source"] = e.source;
    item["target"] = e.target;
    item["kind"] = std::string(to_string(e.kind));
    item["label"] = e.label;
    item["style"] = std::string(to_string(e.style));
    out["edges"].push_back(std::move(item));
  }
  return out;
}

GraphView build_graph_view(const SchemaDocument& doc) {
  GraphView view;
  std::set<std::string, std::less<>> event_ids;
  std::map<std::string, std::string, std::less<>> entity_names;
  for (const auto& ev : doc.events) {
    event_ids.insert(ev.id);
    for (const auto& e : ev.entities) entity_names.emplace(e.id, e.name);
  }

  for (const auto& ev : doc.events) {
    GraphNode node{ev.id, ev.name, NodeKind::Primitive, StyleClass::Primitive, ev.repeatable, ev.optional_flag};
    switch (kind_of(ev)) {
      case EventKind::Gate:
        node.kind = NodeKind::Gate;
        node.style_class = StyleClass::Gate;
        break;
      case EventKind::Chapter:
        node.kind = NodeKind::Chapter;
        node.style_class = ev.optional_flag ? StyleClass::ChapterOptional : StyleClass::ChapterDark;
        break;
      case EventKind::Primitive: break;
    }
    view.nodes.push_back(std::move(node));
  }
  for (const auto& ev : doc.events)
    for (const auto& p : ev.participants) {
      std::string label = p.name;
      if (label.empty())
        if (auto it = entity_names.find(p.entity); it != entity_names.end()) label = it->second;
      view.nodes.push_back({p.id, label, NodeKind::Participant, StyleClass::Participant});
    }

  for (const auto& ev : doc.events)
    for (const auto& c : ev.children)
      if (event_ids.count(c)) view.edges.push_back({ev.id, c, EdgeKind::Hierarchy, "", EdgeStyle::Plain});
  for (const auto& ev : doc.events)
    for (const auto& o : ev.outlinks)
      if (event_ids.count(o)) view.edges.push_back({ev.id, o, EdgeKind::Outlink, "", EdgeStyle::BoldArrow});
  for (const auto& ev : doc.events)
    for (const auto& p : ev.participants)
      view.edges.push_back({ev.id, p.id, EdgeKind::ParticipantRole, p.role_name, EdgeStyle::DashedArrow});

  // Relations connect the participants bound to the two entities: inside
  // every event that binds both, else between their first participants.
  std::map<std::string, std::string, std::less<>> first_participant;
  for (const auto& ev : doc.events)
    for (const auto& p : ev.participants) first_participant.emplace(p.entity, p.id);
  for (const auto& owner : doc.events)
    for (const auto& rel : owner.relations) {
      bool drawn = false;
      for (const auto& ev : doc.events) {
        const ParticipantRecord* subject = nullptr;
        const ParticipantRecord* object = nullptr;
        for (const auto& p : ev.participants) {
          if (!subject && p.entity == rel.subject) subject = &p;
          if (!object && p.entity == rel.object) object = &p;
        }
        if (subject && object) {
          view.edges.push_back({subject->id, object->id, EdgeKind::Relation, rel.name, EdgeStyle::Plain});
          drawn = true;
        }
      }
      if (drawn) continue;
      auto s = first_participant.find(rel.subject);
      auto o = first_participant.find(rel.object);
      if (s != first_participant.end() && o != first_participant.end())
        view.edges.push_back({s->second, o->second, EdgeKind::Relation, rel.name, EdgeStyle::Plain});
    }
  return view;
}

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string_view shape_for(StyleClass s) {
  switch (s) {
    case StyleClass::ChapterDark:
    case StyleClass::ChapterOptional: return "diamond";
    case StyleClass::Primitive: return "ellipse";
    case StyleClass::Gate: return "hexagon";
    case StyleClass::Participant: return "box";
  }
  return "ellipse";
}

std::string_view color_for(StyleClass s) {
  switch (s) {
    case StyleClass::ChapterDark: return "#1f3a93";
    case StyleClass::ChapterOptional: return "#89c4f4";
    case StyleClass::Primitive: return "#f7ca18";
    case StyleClass::Gate: return "#bdc3c7";
    case StyleClass::Participant: return "#ffffff";
  }
  return "#ffffff";
}

}  // namespace

std::string to_dot(const GraphView& view) {
  std::ostringstream out;
  out << "digraph schema {\n";
  for (const auto& n : view.nodes) {
    out << "  " << quote(n.id) << " [label=" << quote(n.label) << ", kind=" << quote(to_string(n.kind))
        << ", class=" << quote(to_string(n.style_class)) << ", shape=" << shape_for(n.style_class)
        << ", style=filled, fillcolor=" << quote(color_for(n.style_class));
    if (n.repeatable) out << ", repeatable=true";
    out << "];\n";
  }
  for (const auto& e : view.edges) {
    out << "  " << quote(e.source) << " -> " << quote(e.target) << " [kind=" << quote(to_string(e.kind))
        << ", class=" << quote(to_string(e.style));
    if (!e.label.empty()) out << ", label=" << quote(e.label);
    if (e.style == EdgeStyle::BoldArrow) out << ", style=bold";
    else if (e.style == EdgeStyle::DashedArrow) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace sci
