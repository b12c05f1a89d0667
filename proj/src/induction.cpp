#include "sci/induction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <map>
#include <set>
#include <tuple>

#include "sci/digraph.hpp"
#include "sci/error.hpp"
#include "sci/validate.hpp"

namespace sci::induction {

std::string_view to_string(EdgeKind kind) noexcept {
  return kind == EdgeKind::Temporal ? "temporal" : "hierarchical";
}

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

void throw_if_error(const Json& value, const std::string& key) {
  if (value.is_object() && value.contains("error"))
    throw Error(ErrorCode::BackendFailure, "backend failed for '" + key + "': " + value.at("error").dump());
}

std::optional<NeighborRelation> relation_from_string(std::string_view text) {
  if (text == "before") return NeighborRelation::Before;
  if (text == "after") return NeighborRelation::After;
  if (text == "child") return NeighborRelation::Child;
  if (text == "parent") return NeighborRelation::Parent;
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// stub backend

StubBackend::StubBackend(Json fixture) : fixture_(std::move(fixture)) {
  if (!fixture_.is_object()) throw Error(ErrorCode::BadInput, "stub fixture must be a JSON object");
}

std::string StubBackend::skeleton_key(std::string_view scenario, std::string_view chapter) {
  return "skeleton|" + std::string(scenario) + "|" + std::string(chapter);
}

std::string StubBackend::expansion_key(std::string_view scenario, std::string_view chapter, std::string_view seed) {
  return "expansion|" + std::string(scenario) + "|" + std::string(chapter) + "|" + std::string(seed);
}

std::string StubBackend::verification_key(std::string_view scenario, std::string_view chapter, EdgeKind kind,
                                          std::string_view source, std::string_view target) {
  return "verification|" + std::string(scenario) + "|" + std::string(chapter) + "|" + std::string(to_string(kind)) +
         "|" + std::string(source) + "|" + std::string(target);
}

const Json* StubBackend::lookup(const std::string& key) const {
  auto it = fixture_.find(key);
  if (it == fixture_.end()) return nullptr;
  throw_if_error(*it, key);
  return &*it;
}

std::vector<std::string> StubBackend::skeleton(const PromptContext& ctx) {
  const std::string key = skeleton_key(ctx.scenario, ctx.chapter);
  const Json* value = lookup(key);
  if (!value) throw Error(ErrorCode::FixtureMiss, "fixture has no entry '" + key + "'");
  if (!value->is_array()) throw Error(ErrorCode::BackendFailure, "'" + key + "' must map to a list");
  std::vector<std::string> out;
  for (const auto& item : *value) {
    if (!item.is_string()) throw Error(ErrorCode::BackendFailure, "'" + key + "' must list strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<Neighbor> StubBackend::expansion(const PromptContext& ctx) {
  const std::string key = expansion_key(ctx.scenario, ctx.chapter, ctx.seed);
  const Json* value = lookup(key);
  if (!value) return {};
  if (!value->is_array()) throw Error(ErrorCode::BackendFailure, "'" + key + "' must map to a list");
  std::vector<Neighbor> out;
  for (const auto& item : *value) {
    if (item.is_string()) {
      out.push_back({item.get<std::string>(), NeighborRelation::Child});
      continue;
    }
    if (!item.is_object() || !item.contains("sentence") || !item.at("sentence").is_string())
      throw Error(ErrorCode::BackendFailure, "'" + key + "' entries need a sentence");
    Neighbor n{item.at("sentence").get<std::string>(), NeighborRelation::Child};
    if (item.contains("relation")) {
      auto rel = item.at("relation").is_string() ? relation_from_string(item.at("relation").get<std::string>())
                                                 : std::nullopt;
      if (!rel) throw Error(ErrorCode::BackendFailure, "'" + key + "' has an unknown relation");
      n.relation = *rel;
    }
    out.push_back(std::move(n));
  }
  return out;
}

double StubBackend::verification(const PromptContext& ctx) {
  const std::string key = verification_key(ctx.scenario, ctx.chapter, ctx.edge_kind, ctx.seed, ctx.target);
  const Json* value = lookup(key);
  if (!value) return ctx.proposed ? 1.0 : 0.0;
  const Json& number = value->is_array() && value->size() == 1 ? value->at(0) : *value;
  if (!number.is_number()) throw Error(ErrorCode::BackendFailure, "'" + key + "' must map to a number");
  return number.get<double>();
}

// ---------------------------------------------------------------------------
// grounding

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double TokenCosineScorer::score(std::string_view a, std::string_view b) const {
  std::map<std::string, double> ca, cb;
  for (auto& t : tokenize(a)) ca[t] += 1.0;
  for (auto& t : tokenize(b)) cb[t] += 1.0;
  if (ca.empty() || cb.empty()) return ca.empty() && cb.empty() ? 1.0 : 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, n] : ca) {
    na += n * n;
    if (auto it = cb.find(t); it != cb.end()) dot += n * it->second;
  }
  for (const auto& [t, n] : cb) nb += n * n;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

QnodeCatalog QnodeCatalog::from_json(const Json& value) {
  if (!value.is_array()) throw Error(ErrorCode::BadInput, "qnode catalog must be a JSON array");
  QnodeCatalog catalog;
  std::set<std::string> seen;
  for (const auto& item : value) {
    if (!item.is_object()) throw Error(ErrorCode::BadInput, "catalog entries must be objects");
    auto field = [&](const char* key) {
      if (!item.contains(key) || !item.at(key).is_string())
        throw Error(ErrorCode::BadInput, std::string("catalog entry lacks string '") + key + "'");
      return item.at(key).get<std::string>();
    };
    QnodeEntry entry{field("qnode"), field("label"), field("definition")};
    if (!seen.insert(entry.qnode).second) throw Error(ErrorCode::BadInput, "duplicate qnode '" + entry.qnode + "'");
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

std::optional<QnodeMatch> ground_event(const GroundingScorer& scorer, const CandidateEvent& candidate,
                                       const QnodeCatalog& catalog, const InductionConfig& config) {
  const QnodeEntry* best = nullptr;
  double best_score = -1.0;
  for (const auto& entry : catalog.entries) {
    double s = scorer.score(candidate.sentence, entry.definition);
    if (s > best_score) {
      best_score = s;
      best = &entry;
    }
  }
  if (!best || best_score < config.grounding_threshold) return std::nullopt;
  return QnodeMatch{best->qnode, best->label, best->definition, best_score};
}

void InductionConfig::check() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(edge_threshold)) throw Error(ErrorCode::BadInput, "edge threshold must lie in [0, 1]");
  if (!unit(grounding_threshold)) throw Error(ErrorCode::BadInput, "grounding threshold must lie in [0, 1]");
  if (expansion_depth < 0) throw Error(ErrorCode::BadInput, "expansion depth must be non-negative");
}

// ---------------------------------------------------------------------------
// rounds

namespace {

PromptContext context_for(const InductionInput& input, const std::string& chapter) {
  PromptContext ctx;
  ctx.scenario = input.scenario_name;
  ctx.chapter = chapter;
  ctx.articles = &input.articles;
  return ctx;
}

std::optional<std::size_t> find_candidate(const ChapterDraft& draft, const std::string& sentence) {
  const std::string key = lower(sentence);
  for (std::size_t i = 0; i < draft.candidates.size(); ++i)
    if (lower(draft.candidates[i].sentence) == key) return i;
  return std::nullopt;
}

}  // namespace

ChapterDraft induce_skeleton(GenerationBackend& backend, const InductionInput& input, const std::string& chapter) {
  if (std::find(input.chapters.begin(), input.chapters.end(), chapter) == input.chapters.end())
    throw Error(ErrorCode::BadInput, "'" + chapter + "' is not one of the input chapters");
  ChapterDraft draft;
  draft.chapter = chapter;
  for (const auto& raw : backend.skeleton(context_for(input, chapter))) {
    std::string sentence = trim(raw);
    if (sentence.empty() || find_candidate(draft, sentence)) continue;
    draft.candidates.push_back({sentence, chapter, std::nullopt});
  }
  if (draft.candidates.empty())
    throw Error(ErrorCode::EmptyGeneration, "backend produced no events for chapter '" + chapter + "'");
  for (std::size_t i = 0; i + 1 < draft.candidates.size(); ++i)
    draft.edges.push_back({i, i + 1, EdgeKind::Temporal, 1.0});
  return draft;
}

std::vector<EventEdge> expand_event(GenerationBackend& backend, const InductionInput& input, ChapterDraft& draft,
                                    std::size_t candidate) {
  PromptContext ctx = context_for(input, draft.chapter);
  ctx.seed = draft.candidates.at(candidate).sentence;
  std::vector<EventEdge> added;
  for (const auto& n : backend.expansion(ctx)) {
    std::string sentence = trim(n.sentence);
    if (sentence.empty()) continue;
    std::size_t other;
    if (auto existing = find_candidate(draft, sentence)) {
      other = *existing;
    } else {
      other = draft.candidates.size();
      draft.candidates.push_back({sentence, draft.chapter, std::nullopt});
    }
    if (other == candidate) continue;
    EventEdge edge;
    switch (n.relation) {
      case NeighborRelation::Before: edge = {other, candidate, EdgeKind::Temporal, 1.0}; break;
      case NeighborRelation::After: edge = {candidate, other, EdgeKind::Temporal, 1.0}; break;
      case NeighborRelation::Child: edge = {candidate, other, EdgeKind::Hierarchical, 1.0}; break;
      case NeighborRelation::Parent: edge = {other, candidate, EdgeKind::Hierarchical, 1.0}; break;
    }
    bool known = std::any_of(draft.edges.begin(), draft.edges.end(), [&](const EventEdge& e) {
      return e.source == edge.source && e.target == edge.target && e.kind == edge.kind;
    });
    if (known) continue;
    draft.edges.push_back(edge);
    added.push_back(edge);
  }
  return added;
}

namespace {

// Removes the weakest edge among `violating` (indices into `edges`).
void drop_weakest(std::vector<EventEdge>& edges, const std::vector<std::size_t>& violating) {
  std::size_t pick = violating.front();
  for (auto k : violating) {
    const auto& a = edges[k];
    const auto& b = edges[pick];
    if (a.confidence < b.confidence ||
        (a.confidence == b.confidence && std::tie(a.source, a.target) > std::tie(b.source, b.target)))
      pick = k;
  }
  edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(pick));
}

digraph::Adjacency adjacency(std::size_t n, const std::vector<EventEdge>& edges) {
  digraph::Adjacency adj(n);
  for (const auto& e : edges) adj[e.source].push_back(e.target);
  return adj;
}

// Edges lying on a directed cycle.
std::vector<std::size_t> cycle_edges(std::size_t n, const std::vector<EventEdge>& edges) {
  auto adj = adjacency(n, edges);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (digraph::reachable(adj, edges[k].target, edges[k].source)) out.push_back(k);
  return out;
}

}  // namespace

std::vector<EventEdge> enforce_consistency(std::size_t n, std::vector<EventEdge> scored, double threshold) {
  // Threshold filter, keeping the strongest copy of repeated edges.
  std::map<std::tuple<EdgeKind, std::size_t, std::size_t>, EventEdge> best;
  for (const auto& e : scored) {
    if (e.source >= n || e.target >= n) throw Error(ErrorCode::BadInput, "edge endpoint out of range");
    if (e.source == e.target || !(e.confidence >= threshold)) continue;
    auto key = std::make_tuple(e.kind, e.source, e.target);
    auto it = best.find(key);
    if (it == best.end() || it->second.confidence < e.confidence) best[key] = e;
  }
  std::vector<EventEdge> hier, temporal;
  for (const auto& [key, e] : best) (e.kind == EdgeKind::Hierarchical ? hier : temporal).push_back(e);

  // Hierarchy: at most one parent per node, no cycles.
  for (;;) {
    std::vector<std::size_t> in_degree(n, 0);
    for (const auto& e : hier) ++in_degree[e.target];
    std::vector<std::size_t> violating = cycle_edges(n, hier);
    for (std::size_t k = 0; k < hier.size(); ++k)
      if (in_degree[hier[k].target] > 1 && std::find(violating.begin(), violating.end(), k) == violating.end())
        violating.push_back(k);
    if (violating.empty()) break;
    drop_weakest(hier, violating);
  }

  // Temporal edges must join siblings of the same kind under that hierarchy.
  std::vector<std::optional<std::size_t>> parent(n);
  std::vector<bool> has_children(n, false);
  for (const auto& e : hier) {
    parent[e.target] = e.source;
    has_children[e.source] = true;
  }
  temporal.erase(std::remove_if(temporal.begin(), temporal.end(),
                                [&](const EventEdge& e) {
                                  return parent[e.source] != parent[e.target] ||
                                         has_children[e.source] != has_children[e.target];
                                }),
                 temporal.end());
  for (;;) {
    auto violating = cycle_edges(n, temporal);
    if (violating.empty()) break;
    drop_weakest(temporal, violating);
  }

  std::vector<EventEdge> out = std::move(temporal);
  out.insert(out.end(), hier.begin(), hier.end());
  return out;
}

std::vector<EventEdge> verify_relations(GenerationBackend& backend, const InductionInput& input,
                                        const ChapterDraft& draft, const InductionConfig& config) {
  const std::size_t n = draft.candidates.size();
  if (n == 0) throw Error(ErrorCode::BadInput, "no candidates to verify in chapter '" + draft.chapter + "'");
  std::set<std::tuple<EdgeKind, std::size_t, std::size_t>> proposed;
  for (const auto& e : draft.edges) proposed.emplace(e.kind, e.source, e.target);

  std::vector<EventEdge> scored;
  PromptContext ctx = context_for(input, draft.chapter);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (EdgeKind kind : {EdgeKind::Temporal, EdgeKind::Hierarchical}) {
        ctx.seed = draft.candidates[i].sentence;
        ctx.target = draft.candidates[j].sentence;
        ctx.edge_kind = kind;
        ctx.proposed = proposed.count({kind, i, j}) > 0;
        double confidence = backend.verification(ctx);
        if (!(confidence >= 0.0 && confidence <= 1.0))
          throw Error(ErrorCode::BackendFailure, "verification confidence outside [0, 1]");
        scored.push_back({i, j, kind, confidence});
      }
    }
  return enforce_consistency(n, std::move(scored), config.edge_threshold);
}

// ---------------------------------------------------------------------------
// assembly

std::string schema_id_for(std::string_view scenario) {
  std::string slug;
  for (unsigned char c : scenario) {
    if (std::isalnum(c)) slug += static_cast<char>(std::tolower(c));
    else if (!slug.empty() && slug.back() != '-') slug += '-';
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return "sci:" + (slug.empty() ? std::string("schema") : slug);
}

SchemaDocument assemble_schema(const InductionInput& input, const std::vector<ChapterDraft>& drafts) {
  if (drafts.size() != input.chapters.size())
    throw Error(ErrorCode::BadInput, "expected one draft per chapter");
  SchemaDocument doc;
  doc.id = schema_id_for(input.scenario_name);
  doc.sdf_version = "3.0";
  doc.doc_version = "1";

  std::size_t counter = 0;
  auto next_id = [&] { return doc.id + "/Events/" + std::to_string(++counter); };

  for (std::size_t c = 0; c < drafts.size(); ++c) {
    const auto& draft = drafts[c];
    if (draft.chapter != input.chapters[c])
      throw Error(ErrorCode::BadInput, "draft order does not match chapter order");
    const std::size_t n = draft.candidates.size();
    std::vector<std::optional<std::size_t>> parent(n);
    for (const auto& e : draft.edges) {
      if (e.source >= n || e.target >= n) throw Error(ErrorCode::InconsistentEdges, "edge endpoint out of range");
      if (e.kind != EdgeKind::Hierarchical) continue;
      if (parent[e.target])
        throw Error(ErrorCode::InconsistentEdges, "'" + draft.candidates[e.target].sentence + "' has two parents");
      parent[e.target] = e.source;
    }

    EventNode chapter;
    chapter.id = next_id();
    chapter.name = draft.chapter;
    chapter.is_schema = true;
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = next_id();

    std::vector<EventNode> events(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& ev = events[i];
      ev.id = ids[i];
      ev.name = draft.candidates[i].sentence;
      if (const auto& g = draft.candidates[i].grounding) ev.grounding = WdGrounding{g->qnode, g->label, g->definition};
      if (parent[i]) {
        events[*parent[i]].children.push_back(ids[i]);
        events[*parent[i]].is_schema = true;
      } else {
        chapter.children.push_back(ids[i]);
      }
    }
    std::vector<EventEdge> temporal;
    for (const auto& e : draft.edges)
      if (e.kind == EdgeKind::Temporal) temporal.push_back(e);
    std::sort(temporal.begin(), temporal.end(),
              [](const EventEdge& a, const EventEdge& b) { return std::tie(a.source, a.target) < std::tie(b.source, b.target); });
    for (const auto& e : temporal) events[e.source].outlinks.push_back(ids[e.target]);

    doc.provenance[chapter.id] = Provenance::Induced;
    doc.events.push_back(std::move(chapter));
    for (auto& ev : events) {
      doc.provenance[ev.id] = Provenance::Induced;
      doc.events.push_back(std::move(ev));
    }
  }

  auto report = validate(doc);
  if (report.has_errors()) {
    for (const auto& v : report.violations)
      if (v.severity == Severity::Error)
        throw Error(ErrorCode::InconsistentEdges,
                    std::string(to_string(v.code)) + " at '" + v.element_id + "': " + v.message);
  }
  return doc;
}

SchemaDocument induce(GenerationBackend& backend, const InductionInput& input, const InductionConfig& config,
                      const QnodeCatalog* catalog, const GroundingScorer* scorer) {
  config.check();
  if (input.chapters.empty()) throw Error(ErrorCode::BadInput, "at least one chapter is required");
  std::set<std::string> unique(input.chapters.begin(), input.chapters.end());
  if (unique.size() != input.chapters.size()) throw Error(ErrorCode::BadInput, "chapter names must be distinct");

  TokenCosineScorer default_scorer;
  const GroundingScorer& grounder = scorer ? *scorer : default_scorer;

  auto run_chapter = [&](const std::string& chapter) {
    ChapterDraft draft = induce_skeleton(backend, input, chapter);
    std::size_t frontier_begin = 0;
    for (int round = 0; round < config.expansion_depth; ++round) {
      std::size_t frontier_end = draft.candidates.size();
      for (std::size_t i = frontier_begin; i < frontier_end; ++i) expand_event(backend, input, draft, i);
      frontier_begin = frontier_end;
    }
    if (catalog && !catalog->entries.empty())
      for (auto& cand : draft.candidates) cand.grounding = ground_event(grounder, cand, *catalog, config);
    draft.edges = verify_relations(backend, input, draft, config);
    return draft;
  };

  std::vector<ChapterDraft> drafts;
  if (config.parallel_chapters && backend.concurrent_safe() && input.chapters.size() > 1) {
    std::vector<std::future<ChapterDraft>> pending;
    for (const auto& chapter : input.chapters)
      pending.push_back(std::async(std::launch::async, run_chapter, std::cref(chapter)));
    for (auto& f : pending) drafts.push_back(f.get());
  } else {
    for (const auto& chapter : input.chapters) drafts.push_back(run_chapter(chapter));
  }
  return assemble_schema(input, drafts);
}

}  // namespace sci::induction
