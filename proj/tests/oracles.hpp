#pragma once

// Independent brute-force reference implementations. Nothing here calls the
// library code it is used to check.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Edge = std::pair<std::size_t, std::size_t>;

// Enumerates every simple path starting at `start`; returns true if some path
// can be closed back to `start` by one more edge.
inline bool on_cycle_by_paths(std::size_t n, const std::vector<Edge>& edges, std::size_t start) {
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (auto [u, v] : edges) m[u][v] = true;
  std::vector<bool> on_path(n, false);
  std::function<bool(std::size_t)> extend = [&](std::size_t at) {
    if (m[at][start]) return true;
    for (std::size_t next = 0; next < n; ++next) {
      if (!m[at][next] || on_path[next] || next == start) continue;
      on_path[next] = true;
      bool closed = extend(next);
      on_path[next] = false;
      if (closed) return true;
    }
    return false;
  };
  on_path[start] = true;
  return extend(start);
}

inline std::set<std::size_t> cyclic_nodes(std::size_t n, const std::vector<Edge>& edges) {
  std::set<std::size_t> out;
  for (std::size_t v = 0; v < n; ++v)
    if (on_cycle_by_paths(n, edges, v)) out.insert(v);
  return out;
}

inline bool has_cycle(std::size_t n, const std::vector<Edge>& edges) { return !cyclic_nodes(n, edges).empty(); }

// Path existence by enumeration of simple paths (from == to needs a non-empty path).
inline bool path_exists(std::size_t n, const std::vector<Edge>& edges, std::size_t from, std::size_t to) {
  std::vector<bool> seen(n, false);
  std::function<bool(std::size_t)> walk = [&](std::size_t at) {
    for (auto [u, v] : edges) {
      if (u != at) continue;
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = true;
      if (walk(v)) return true;
    }
    return false;
  };
  return walk(from);
}

// Every linear extension, by filtering all permutations.
inline std::vector<std::vector<std::size_t>> all_topological_orders(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[perm[i]] = i;
    bool ok = std::all_of(edges.begin(), edges.end(), [&](const Edge& e) { return pos[e.first] < pos[e.second]; });
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Token-set Jaccard via std set algorithms over a hand-rolled splitter.
inline double jaccard(const std::string& a, const std::string& b) {
  auto tokens = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  auto ta = tokens(a), tb = tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::vector<std::string> inter, uni;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(inter));
  std::set_union(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(uni));
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

// Reference ranking: merge by surface with a plain map, then insertion sort.
struct Counted {
  std::string surface;
  long long count;
};

inline std::vector<Counted> reference_rank(const std::vector<Counted>& items) {
  std::vector<Counted> merged;
  for (const auto& it : items) {
    auto found = std::find_if(merged.begin(), merged.end(), [&](const Counted& c) { return c.surface == it.surface; });
    if (found == merged.end()) merged.push_back(it);
    else found->count += it.count;
  }
  for (std::size_t i = 1; i < merged.size(); ++i)
    for (std::size_t j = i; j > 0; --j) {
      const auto& a = merged[j - 1];
      const auto& b = merged[j];
      bool swap = a.count < b.count || (a.count == b.count && b.surface < a.surface);
      if (!swap) break;
      std::swap(merged[j - 1], merged[j]);
    }
  return merged;
}

// round(100 * curated / induced) half away from zero, in long double.
inline long long percent(long long induced, long long curated) {
  if (induced == 0) return 0;
  long double exact = 100.0L * static_cast<long double>(curated) / static_cast<long double>(induced);
  long long floor_part = static_cast<long long>(exact);
  return exact - floor_part >= 0.5L ? floor_part + 1 : floor_part;
}

}  // namespace oracle
