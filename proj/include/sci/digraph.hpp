#pragma once

// Small algorithms over dense adjacency lists (nodes are 0..n-1).

#include <cstddef>
#include <optional>
#include <vector>

namespace sci::digraph {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Marks every node that lies on at least one directed cycle (self-loops
/// included). A node is cyclic iff its strongly connected component has more
/// than one node or it has a self-loop.
std::vector<bool> nodes_on_cycles(const Adjacency& adj);

bool is_acyclic(const Adjacency& adj);

/// Kahn's algorithm, always picking the smallest ready node, so the result is
/// the lexicographically smallest topological order. Empty optional on a cycle.
std::optional<std::vector<std::size_t>> stable_topological_order(const Adjacency& adj);

bool reachable(const Adjacency& adj, std::size_t from, std::size_t to);

}  // namespace sci::digraph
