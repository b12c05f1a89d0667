#pragma once

// Post-prediction processing of extracted event instances: stoplist filter,
// text rematching against a schema, frequency ranking, curation worklists and
// provenance coverage statistics.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sci/sdf.hpp"

namespace sci::instantiation {

struct SuggestedArg {
  std::string role;
  std::string name;

  bool operator==(const SuggestedArg&) const = default;
};

struct EventInstance {
  std::string surface;
  bool matched = false;
  long long count = 1;
  std::vector<SuggestedArg> suggested_args;
  // Set when rematch recovers the instance.
  std::optional<std::string> matched_event_id;

  bool operator==(const EventInstance&) const = default;
};

/// JSON array of {"surface", "matched", "count", "suggested_args": [{"role", "name"}]}.
/// Throws Error(BadInput) on shape problems or count < 1.
std::vector<EventInstance> parse_instances(const Json& value);
Json to_json(const std::vector<EventInstance>& instances);

struct Stoplist {
  std::set<std::string> lemmas;

  static Stoplist defaults();
  /// One lemma per line; blank lines and lines starting with '#' are skipped.
  static Stoplist parse(std::string_view text);
};

/// Lowercased form plus crude lemma guesses for a single token
/// ("going" -> "go", "used" -> "use", "went" -> "go").
std::vector<std::string> lemma_candidates(std::string_view word);

/// Drops unmatched instances whose lowercased surface, or the lemma of a
/// single-token surface, is on the stoplist. Matched instances always survive.
std::vector<EventInstance> filter_fine_grained(const std::vector<EventInstance>& instances, const Stoplist& stoplist);

class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

/// Jaccard similarity of lowercase whitespace-separated token sets. Two empty
/// texts count as identical.
class JaccardEncoder : public TextEncoder {
 public:
  double similarity(std::string_view a, std::string_view b) const override;
};

std::set<std::string> whitespace_tokens(std::string_view text);

struct MatcherConfig {
  double tau = 0.7;
  bool include_descriptions = false;
  std::shared_ptr<const TextEncoder> encoder;  // Jaccard when null

  void check() const;
};

struct RematchResult {
  std::vector<EventInstance> recovered;
  std::vector<EventInstance> still_unmatched;
};

/// Matched instances pass through into `recovered` unchanged. An unmatched one
/// is recovered iff its best similarity over primitive event names (and
/// descriptions, if configured) reaches tau; the first best event in document
/// order is recorded.
RematchResult rematch(const std::vector<EventInstance>& instances, const SchemaDocument& schema,
                      const MatcherConfig& config = {});

/// Merges equal surfaces (counts summed, args concatenated without repeats),
/// then orders by count descending and surface ascending.
std::vector<EventInstance> rank_unmatched(const std::vector<EventInstance>& instances);

struct WorklistEntry {
  std::string surface;
  long long count = 0;
  std::vector<SuggestedArg> suggested_args;
  std::size_t rank = 0;  // 1-based

  bool operator==(const WorklistEntry&) const = default;
};

std::vector<WorklistEntry> build_worklist(const std::vector<EventInstance>& ranked);
Json to_json(const std::vector<WorklistEntry>& worklist);
std::vector<WorklistEntry> parse_worklist(const Json& value);

struct CoverageStats {
  long long induced_events = 0;
  long long curated_events = 0;
  long long induced_participants = 0;
  long long curated_participants = 0;

  long long total_events() const { return induced_events + curated_events; }
  long long total_participants() const { return induced_participants + curated_participants; }
  long long increase_pct_events() const;
  long long increase_pct_participants() const;

  CoverageStats& operator+=(const CoverageStats& other);
  bool operator==(const CoverageStats&) const = default;
  Json to_json() const;
};

/// round(curated / induced * 100), half away from zero, in exact integer
/// arithmetic; 0 when induced is 0.
long long increase_pct(long long induced, long long curated);

/// Counts non-gate events and participants by provenance tag. Throws
/// Error(MissingProvenance) naming the first untagged element.
CoverageStats coverage_stats(const std::vector<SchemaDocument>& library);

/// Plain-text table with rows Induced / Manually Curated / Total / Increase (%).
std::string render_table(const CoverageStats& stats);

struct CoverageReport {
  std::vector<WorklistEntry> worklist;
  CoverageStats stats;
  std::size_t filtered = 0;
  std::size_t recovered = 0;

  Json to_json() const;
};

/// filter -> rematch -> rank -> worklist, plus coverage over the schema.
CoverageReport run_pipeline(const SchemaDocument& schema, const std::vector<EventInstance>& instances,
                            const Stoplist& stoplist, const MatcherConfig& config = {});

}  // namespace sci::instantiation
