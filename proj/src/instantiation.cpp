#include "sci/instantiation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <sstream>

#include "sci/error.hpp"

namespace sci::instantiation {

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

const std::string& string_field(const Json& item, const char* key) {
  if (!item.contains(key) || !item.at(key).is_string())
    throw Error(ErrorCode::BadInput, std::string("expected string field '") + key + "'");
  return item.at(key).get_ref<const std::string&>();
}

std::vector<SuggestedArg> parse_args(const Json& item) {
  std::vector<SuggestedArg> out;
  if (!item.contains("suggested_args")) return out;
  const auto& args = item.at("suggested_args");
  if (!args.is_array()) throw Error(ErrorCode::BadInput, "suggested_args must be an array");
  for (const auto& a : args) {
    if (!a.is_object()) throw Error(ErrorCode::BadInput, "suggested_args entries must be objects");
    out.push_back({string_field(a, "role"), string_field(a, "name")});
  }
  return out;
}

Json args_json(const std::vector<SuggestedArg>& args) {
  Json out = Json::array();
  for (const auto& a : args) out.push_back(Json{{"role", a.role}, {"name", a.name}});
  return out;
}

long long positive_count(const Json& item) {
  if (!item.contains("count")) return 1;
  const auto& c = item.at("count");
  if (!c.is_number_integer() || c.get<long long>() < 1)
    throw Error(ErrorCode::BadInput, "count must be a positive integer");
  return c.get<long long>();
}

}  // namespace

std::vector<EventInstance> parse_instances(const Json& value) {
  if (!value.is_array()) throw Error(ErrorCode::BadInput, "instance file must be a JSON array");
  std::vector<EventInstance> out;
  for (const auto& item : value) {
    if (!item.is_object()) throw Error(ErrorCode::BadInput, "instances must be objects");
    EventInstance inst;
    inst.surface = string_field(item, "surface");
    if (item.contains("matched")) {
      if (!item.at("matched").is_boolean()) throw Error(ErrorCode::BadInput, "matched must be a boolean");
      inst.matched = item.at("matched").get<bool>();
    }
    inst.count = positive_count(item);
    inst.suggested_args = parse_args(item);
    out.push_back(std::move(inst));
  }
  return out;
}

Json to_json(const std::vector<EventInstance>& instances) {
  Json out = Json::array();
  for (const auto& inst : instances) {
    Json item = Json::object();
    item["surface"] = inst.surface;
    item["matched"] = inst.matched;
    item["count"] = inst.count;
    item["suggested_args"] = args_json(inst.suggested_args);
    if (inst.matched_event_id) item["matched_event_id"] = *inst.matched_event_id;
    out.push_back(std::move(item));
  }
  return out;
}

// ---------------------------------------------------------------------------
// stoplist

Stoplist Stoplist::defaults() {
  return Stoplist{{"go", "use", "be", "have", "do", "get", "make", "take"}};
}

Stoplist Stoplist::parse(std::string_view text) {
  Stoplist out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string word = lower(trim(line));
    if (word.empty() || word.front() == '#') continue;
    out.lemmas.insert(word);
  }
  return out;
}

std::vector<std::string> lemma_candidates(std::string_view word) {
  static const std::map<std::string, std::string, std::less<>> irregular = {
      {"went", "go"},   {"gone", "go"},   {"goes", "go"},    {"was", "be"},    {"were", "be"},  {"is", "be"},
      {"are", "be"},    {"been", "be"},   {"being", "be"},   {"had", "have"},  {"has", "have"}, {"did", "do"},
      {"does", "do"},   {"done", "do"},   {"got", "get"},    {"gotten", "get"}, {"made", "make"},
      {"took", "take"}, {"taken", "take"}};
  std::string w = lower(word);
  std::vector<std::string> out{w};
  auto add = [&](std::string s) {
    if (s.size() >= 2 && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  if (auto it = irregular.find(w); it != irregular.end()) add(it->second);
  auto ends = [&](std::string_view suffix) {
    return w.size() > suffix.size() + 1 && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  auto undouble = [&](const std::string& stem) {
    if (stem.size() >= 2 && stem.back() == stem[stem.size() - 2]) add(stem.substr(0, stem.size() - 1));
  };
  if (ends("ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    add(stem);
    add(stem + "e");
    undouble(stem);
  } else if (ends("ed")) {
    std::string stem = w.substr(0, w.size() - 2);
    add(stem);
    add(stem + "e");
    undouble(stem);
  } else if (ends("es")) {
    add(w.substr(0, w.size() - 2));
    add(w.substr(0, w.size() - 1));
  } else if (ends("s") && !ends("ss")) {
    add(w.substr(0, w.size() - 1));
  }
  return out;
}

std::vector<EventInstance> filter_fine_grained(const std::vector<EventInstance>& instances, const Stoplist& stoplist) {
  std::vector<EventInstance> out;
  for (const auto& inst : instances) {
    bool drop = false;
    if (!inst.matched) {
      std::string surface = lower(trim(inst.surface));
      if (stoplist.lemmas.count(surface)) {
        drop = true;
      } else if (!surface.empty() && surface.find_first_of(" \t\r\n") == std::string::npos) {
        for (const auto& lemma : lemma_candidates(surface))
          if (stoplist.lemmas.count(lemma)) drop = true;
      }
    }
    if (!drop) out.push_back(inst);
  }
  return out;
}

// ---------------------------------------------------------------------------
// matching

std::set<std::string> whitespace_tokens(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{lower(text)};
  std::string token;
  while (in >> token) out.insert(token);
  return out;
}

double JaccardEncoder::similarity(std::string_view a, std::string_view b) const {
  auto ta = whitespace_tokens(a);
  auto tb = whitespace_tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : ta) common += tb.count(t);
  return static_cast<double>(common) / static_cast<double>(ta.size() + tb.size() - common);
}

void MatcherConfig::check() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::BadInput, "tau must lie in [0, 1]");
}

RematchResult rematch(const std::vector<EventInstance>& instances, const SchemaDocument& schema,
                      const MatcherConfig& config) {
  config.check();
  JaccardEncoder jaccard;
  const TextEncoder& encoder = config.encoder ? *config.encoder : jaccard;

  std::vector<const EventNode*> targets;
  for (const auto& ev : schema.events)
    if (kind_of(ev) == EventKind::Primitive) targets.push_back(&ev);

  RematchResult result;
  for (const auto& inst : instances) {
    if (inst.matched) {
      result.recovered.push_back(inst);
      continue;
    }
    const EventNode* best = nullptr;
    double best_score = -1.0;
    for (const auto* ev : targets) {
      double s = encoder.similarity(inst.surface, ev->name);
      if (config.include_descriptions && !ev->description.empty())
        s = std::max(s, encoder.similarity(inst.surface, ev->description));
      if (s > best_score) {
        best_score = s;
        best = ev;
      }
    }
    if (best && best_score >= config.tau) {
      EventInstance hit = inst;
      hit.matched = true;
      hit.matched_event_id = best->id;
      result.recovered.push_back(std::move(hit));
    } else {
      result.still_unmatched.push_back(inst);
    }
  }
  return result;
}

std::vector<EventInstance> rank_unmatched(const std::vector<EventInstance>& instances) {
  std::vector<EventInstance> merged;
  std::map<std::string, std::size_t> slot;
  for (const auto& inst : instances) {
    auto [it, fresh] = slot.emplace(inst.surface, merged.size());
    if (fresh) {
      merged.push_back(inst);
      continue;
    }
    auto& into = merged[it->second];
    into.count += inst.count;
    for (const auto& a : inst.suggested_args)
      if (std::find(into.suggested_args.begin(), into.suggested_args.end(), a) == into.suggested_args.end())
        into.suggested_args.push_back(a);
  }
  std::sort(merged.begin(), merged.end(), [](const EventInstance& a, const EventInstance& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.surface < b.surface;
  });
  return merged;
}

// ---------------------------------------------------------------------------
// worklist

std::vector<WorklistEntry> build_worklist(const std::vector<EventInstance>& ranked) {
  std::vector<WorklistEntry> out;
  for (std::size_t i = 0; i < ranked.size(); ++i)
    out.push_back({ranked[i].surface, ranked[i].count, ranked[i].suggested_args, i + 1});
  return out;
}

Json to_json(const std::vector<WorklistEntry>& worklist) {
  Json out = Json::array();
  for (const auto& e : worklist) {
    Json item = Json::object();
    item["surface"] = e.surface;
    item["count"] = e.count;
    item["suggested_args"] = args_json(e.suggested_args);
    item["rank"] = e.rank;
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<WorklistEntry> parse_worklist(const Json& value) {
  if (!value.is_array()) throw Error(ErrorCode::BadInput, "worklist must be a JSON array");
  std::vector<WorklistEntry> out;
  for (const auto& item : value) {
    if (!item.is_object()) throw Error(ErrorCode::BadInput, "worklist entries must be objects");
    WorklistEntry e;
    e.surface = string_field(item, "surface");
    e.count = positive_count(item);
    e.suggested_args = parse_args(item);
    if (!item.contains("rank") || !item.at("rank").is_number_unsigned())
      throw Error(ErrorCode::BadInput, "worklist entries need a rank");
    e.rank = item.at("rank").get<std::size_t>();
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// coverage

long long increase_pct(long long induced, long long curated) {
  if (induced <= 0) return 0;
  return (200 * curated + induced) / (2 * induced);
}

long long CoverageStats::increase_pct_events() const { return increase_pct(induced_events, curated_events); }

long long CoverageStats::increase_pct_participants() const {
  return increase_pct(induced_participants, curated_participants);
}

CoverageStats& CoverageStats::operator+=(const CoverageStats& other) {
  induced_events += other.induced_events;
  curated_events += other.curated_events;
  induced_participants += other.induced_participants;
  curated_participants += other.curated_participants;
  return *this;
}

Json CoverageStats::to_json() const {
  Json out = Json::object();
  out["induced_events"] = induced_events;
  out["curated_events"] = curated_events;
  out["total_events"] = total_events();
  out["induced_participants"] = induced_participants;
  out["curated_participants"] = curated_participants;
  out["total_participants"] = total_participants();
  out["increase_pct_events"] = increase_pct_events();
  out["increase_pct_participants"] = increase_pct_participants();
  return out;
}

CoverageStats coverage_stats(const std::vector<SchemaDocument>& library) {
  CoverageStats stats;
  for (const auto& doc : library) {
    auto tag = [&](const std::string& id) {
      auto it = doc.provenance.find(id);
      if (it == doc.provenance.end())
        throw Error(ErrorCode::MissingProvenance, "'" + id + "' in '" + doc.id + "' has no provenance tag");
      return it->second;
    };
    for (const auto& ev : doc.events) {
      if (ev.is_gate()) continue;
      (tag(ev.id) == Provenance::Induced ? stats.induced_events : stats.curated_events) += 1;
      for (const auto& p : ev.participants)
        (tag(p.id) == Provenance::Induced ? stats.induced_participants : stats.curated_participants) += 1;
    }
  }
  return stats;
}

std::string render_table(const CoverageStats& s) {
  std::vector<std::array<std::string, 3>> rows = {
      {"", "Events", "Participants"},
      {"Induced", std::to_string(s.induced_events), std::to_string(s.induced_participants)},
      {"Manually Curated", std::to_string(s.curated_events), std::to_string(s.curated_participants)},
      {"Total", std::to_string(s.total_events()), std::to_string(s.total_participants())},
      {"Increase (%)", std::to_string(s.increase_pct_events()), std::to_string(s.increase_pct_participants())},
  };
  std::array<std::size_t, 3> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (const auto& r : rows) {
    out += r[0] + std::string(width[0] - r[0].size(), ' ');
    for (std::size_t c = 1; c < 3; ++c) out += "  " + std::string(width[c] - r[c].size(), ' ') + r[c];
    out += "\n";
  }
  return out;
}

Json CoverageReport::to_json() const {
  Json out = Json::object();
  out["worklist"] = instantiation::to_json(worklist);
  out["stats"] = stats.to_json();
  out["filtered"] = filtered;
  out["recovered"] = recovered;
  return out;
}

CoverageReport run_pipeline(const SchemaDocument& schema, const std::vector<EventInstance>& instances,
                            const Stoplist& stoplist, const MatcherConfig& config) {
  auto kept = filter_fine_grained(instances, stoplist);
  auto split = rematch(kept, schema, config);
  CoverageReport report;
  report.filtered = instances.size() - kept.size();
  report.recovered = static_cast<std::size_t>(std::count_if(
      split.recovered.begin(), split.recovered.end(), [](const EventInstance& i) { return i.matched_event_id.has_value(); }));
  report.worklist = build_worklist(rank_unmatched(split.still_unmatched));
  report.stats = coverage_stats({schema});
  return report;
}

}  // namespace sci::instantiation
