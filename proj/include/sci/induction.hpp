#pragma once

// Three-round schema induction: a linear skeleton per chapter, one round of
// neighbour expansion, then pairwise relation verification with a greedy
// consistency pass. Sentence generation and grounding are pluggable.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sci/sdf.hpp"

namespace sci::induction {

struct InductionInput {
  std::string scenario_name;
  std::vector<std::string> chapters;
  std::vector<std::string> articles;
};

struct QnodeMatch {
  std::string qnode;
  std::string label;
  std::string definition;
  double score = 0.0;

  bool operator==(const QnodeMatch&) const = default;
};

struct CandidateEvent {
  std::string sentence;
  std::string chapter;
  std::optional<QnodeMatch> grounding;

  bool operator==(const CandidateEvent&) const = default;
};

enum class EdgeKind { Temporal, Hierarchical };

std::string_view to_string(EdgeKind kind) noexcept;

/// Directed edge between candidate indices of one chapter. Temporal means
/// source happens before target; hierarchical means target is a sub-event.
struct EventEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  EdgeKind kind = EdgeKind::Temporal;
  double confidence = 1.0;

  bool operator==(const EventEdge&) const = default;
};

/// How an expansion neighbour relates to the event it was generated from.
enum class NeighborRelation { Before, After, Child, Parent };

struct Neighbor {
  std::string sentence;
  NeighborRelation relation = NeighborRelation::Child;
};

struct PromptContext {
  std::string scenario;
  std::string chapter;
  std::string seed;    // expansion: event being expanded; verification: edge source
  std::string target;  // verification: edge target
  EdgeKind edge_kind = EdgeKind::Temporal;
  bool proposed = false;  // verification: edge came from skeleton or expansion
  const std::vector<std::string>* articles = nullptr;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::vector<std::string> skeleton(const PromptContext& ctx) = 0;
  virtual std::vector<Neighbor> expansion(const PromptContext& ctx) = 0;
  /// Confidence in [0, 1] that the edge seed -> target of ctx.edge_kind holds.
  virtual double verification(const PromptContext& ctx) = 0;
  /// True when prompt calls may run from several threads at once.
  virtual bool concurrent_safe() const { return false; }
};

/// Offline backend answering from a fixture: a JSON object whose keys are
///   "skeleton|<scenario>|<chapter>"                     -> [sentence, ...]
///   "expansion|<scenario>|<chapter>|<seed>"             -> [sentence | {"sentence", "relation"}, ...]
///   "verification|<scenario>|<chapter>|<kind>|<src>|<tgt>" -> number or [number]
/// Any value may instead be {"error": message} to simulate a backend failure.
/// Missing skeleton keys are a FixtureMiss; missing expansion keys yield no
/// neighbours; missing verification keys score proposed edges 1 and others 0.
class StubBackend : public GenerationBackend {
 public:
  explicit StubBackend(Json fixture);

  static std::string skeleton_key(std::string_view scenario, std::string_view chapter);
  static std::string expansion_key(std::string_view scenario, std::string_view chapter, std::string_view seed);
  static std::string verification_key(std::string_view scenario, std::string_view chapter, EdgeKind kind,
                                      std::string_view source, std::string_view target);

  std::vector<std::string> skeleton(const PromptContext& ctx) override;
  std::vector<Neighbor> expansion(const PromptContext& ctx) override;
  double verification(const PromptContext& ctx) override;
  bool concurrent_safe() const override { return true; }

 private:
  const Json* lookup(const std::string& key) const;

  Json fixture_;
};

class GroundingScorer {
 public:
  virtual ~GroundingScorer() = default;
  virtual double score(std::string_view sentence, std::string_view definition) const = 0;
};

/// Cosine similarity of lowercase token-count vectors. Symmetric, in [0, 1],
/// and 1 for identical texts.
class TokenCosineScorer : public GroundingScorer {
 public:
  double score(std::string_view a, std::string_view b) const override;
};

/// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view text);

struct QnodeEntry {
  std::string qnode;
  std::string label;
  std::string definition;
};

struct QnodeCatalog {
  std::vector<QnodeEntry> entries;

  /// JSON array of {qnode, label, definition}; qnodes must be unique.
  static QnodeCatalog from_json(const Json& value);
};

struct InductionConfig {
  double edge_threshold = 0.5;
  double grounding_threshold = 0.5;
  // Rounds of expansion: 1 expands skeleton events only.
  int expansion_depth = 1;
  bool parallel_chapters = true;

  void check() const;
};

struct ChapterDraft {
  std::string chapter;
  std::vector<CandidateEvent> candidates;
  std::vector<EventEdge> edges;
};

/// Round one: a path of temporal edges i -> i+1 over the generated sentences.
ChapterDraft induce_skeleton(GenerationBackend& backend, const InductionInput& input, const std::string& chapter);

/// Round two for one candidate. New neighbours are appended to the draft;
/// a neighbour whose sentence matches an existing candidate (ignoring case)
/// reuses it. Returns the edges added.
std::vector<EventEdge> expand_event(GenerationBackend& backend, const InductionInput& input, ChapterDraft& draft,
                                    std::size_t candidate);

/// Keeps edges scoring at least the threshold, then restores consistency:
/// hierarchical edges form a forest, temporal edges join siblings of the same
/// kind and form a DAG. Violations are repaired by repeatedly dropping the
/// lowest-confidence edge involved in any violation (ties: the
/// lexicographically last (source, target)).
std::vector<EventEdge> enforce_consistency(std::size_t candidate_count, std::vector<EventEdge> scored,
                                           double threshold);

/// Round three: scores every ordered pair of the chapter's candidates for both
/// edge kinds, then runs enforce_consistency.
std::vector<EventEdge> verify_relations(GenerationBackend& backend, const InductionInput& input,
                                        const ChapterDraft& draft, const InductionConfig& config);

/// Best catalog entry by scorer, if it clears the grounding threshold. Ties go
/// to the earlier entry.
std::optional<QnodeMatch> ground_event(const GroundingScorer& scorer, const CandidateEvent& candidate,
                                       const QnodeCatalog& catalog, const InductionConfig& config);

/// Builds the document: one chapter per input chapter, candidates as
/// primitive children (or children of their hierarchical source, which then
/// becomes a chapter), temporal edges as outlinks. All elements are tagged
/// induced. Throws InconsistentEdges if the drafts violate any invariant.
SchemaDocument assemble_schema(const InductionInput& input, const std::vector<ChapterDraft>& drafts);

/// Document @id for a scenario, e.g. "sci:general-ied".
std::string schema_id_for(std::string_view scenario);

/// Full pipeline. `catalog` and `scorer` are optional; without a catalog no
/// grounding is attempted.
SchemaDocument induce(GenerationBackend& backend, const InductionInput& input, const InductionConfig& config = {},
                      const QnodeCatalog* catalog = nullptr, const GroundingScorer* scorer = nullptr);

}  // namespace sci::induction
