#pragma once

#include <utility>
#include <vector>

namespace topowalk {

// Strongly connected components of a digraph on nodes 0..nodes-1.
// Returns comp[v] for every node; component ids are renumbered so that
// comparing ids of two components compares their smallest member nodes.
std::vector<int> strong_components(int nodes,
                                   const std::vector<std::pair<int, int>>& arcs);

// Connected components ignoring arc direction, same id convention.
std::vector<int> weak_components(int nodes,
                                 const std::vector<std::pair<int, int>>& arcs);

}  // namespace topowalk
