#include "sci/digraph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace sci::digraph {

namespace {

// Iterative Tarjan; returns the component id of every node.
std::vector<std::size_t> strong_components(const Adjacency& adj, std::size_t& count) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (node, next edge)
  std::size_t next_index = 0;
  count = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, edge] = frames.back();
      if (edge < adj[v].size()) {
        std::size_t w = adj[v][edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

}  // namespace

std::vector<bool> nodes_on_cycles(const Adjacency& adj) {
  std::size_t count = 0;
  auto comp = strong_components(adj, count);
  std::vector<std::size_t> size(count, 0);
  for (auto c : comp) ++size[c];
  std::vector<bool> cyclic(adj.size(), false);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (size[comp[v]] > 1) cyclic[v] = true;
    for (auto w : adj[v])
      if (w == v) cyclic[v] = true;
  }
  return cyclic;
}

bool is_acyclic(const Adjacency& adj) { return stable_topological_order(adj).has_value(); }

std::optional<std::vector<std::size_t>> stable_topological_order(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<std::size_t> in_degree(n, 0);
  for (const auto& out : adj)
    for (auto w : out) ++in_degree[w];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (in_degree[v] == 0) ready.push(v);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : adj[v])
      if (--in_degree[w] == 0) ready.push(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

bool reachable(const Adjacency& adj, std::size_t from, std::size_t to) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return false;
}

}  // namespace sci::digraph
