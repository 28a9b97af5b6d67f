#pragma once

#include <optional>
#include <vector>

#include "topowalk/surface_map.hpp"

namespace topowalk {

// Integer dart multiplicities, balanced at every vertex: the multiplicities
// of the darts leaving a vertex sum to the same value as those arriving.
struct Circulation {
  std::vector<int> phi;  // per dart slot; zero on dead and untraversable darts
  int total() const;
};

// Face labels certifying a bounding walk: the walk crosses each edge
// alpha(left) - alpha(right) times net, counted left to right.
struct AlexanderNumbering {
  std::vector<int> alpha;  // per face id
};

// Rewrites every two-way edge as two parallel one-way edges enclosing a tiny
// two-sided disk face. One-way edges, vertices and the ambient surface are
// untouched, so algorithms that assume purely directed edges can run on
// `map` and translate their answers back through to_original.
struct DirectedRefinement {
  SurfaceMap map;
  std::vector<DartId> to_original;  // per dart of map
  std::vector<EdgeId> twin;         // partner slot of a doubled edge, else -1
  Walk project(const Walk& w) const;
};
DirectedRefinement directed_refinement(const SurfaceMap& map);

// Deletes every edge lying on a coherently directed cocycle, i.e. whose dual
// arc has both endpoints in one dual strong component. The residue is a
// subgraph of the input with no directed cocycles. Two-way edges cross any
// closed curve once in each direction, so they never qualify.
SurfaceMap remove_cocycle_edges(const SurfaceMap& map);

// A directed cycle with distinct vertices bounding a disk, if one exists.
// A two-way edge counts as two parallel directed edges, so traversing one
// forward then backward between distinct endpoints is a simple digon.
std::optional<Walk> detect_simple_contractible_cycle(const SurfaceMap& map);

// A directed closed walk that contracts to a point, if one exists; the
// witness is the coherent boundary of a disk face left after cocycle
// removal, and never traverses more darts than the map can traverse.
std::optional<Walk> detect_contractible_walk(const SurfaceMap& map);

struct BoundingWitness {
  // Cocycle-free subgraph of the capped (and refined) input; the witness
  // walk traverses exactly its alive edges. Slots match the refined input.
  SurfaceMap map;
  AlexanderNumbering numbering;  // on map's faces; descends across each dart
  std::vector<DartId> to_input;  // per dart of map, back into the input map
  int depth = 1;                 // recursion level that emitted the witness
  Walk project(const Walk& w) const;
  Walk walk() const;  // Euler tour of the boundary circulation, on the input
};

// A directed closed walk that is null-homologous, if one exists. A surface
// with boundary is capped first by gluing one disk with b-1 holes along all
// boundary circles, which changes no walk's bounding status.
std::optional<BoundingWitness> detect_bounding_walk(const SurfaceMap& map);

// phi(d) = alpha(left) - alpha(right) on traversable darts. Throws MapError
// unless alpha never decreases left to right across a traversable dart and
// never increases across an untraversable one (so two-way edges need equal
// labels on both sides). Valid numberings always balance.
Circulation boundary_circulation(const AlexanderNumbering& numbering,
                                 const SurfaceMap& map);

// Dart multiplicities of a closed walk of the map.
Circulation walk_circulation(const Walk& w, const SurfaceMap& map);

// Closed walk traversing each dart d exactly circ.phi[d] times, built by
// cycle splicing, lowest dart first, starting at the lowest support vertex.
// Throws MapError if the circulation is unbalanced, touches a dead or
// untraversable dart, or its support is empty or disconnected.
Walk euler_tour(const Circulation& circ, const SurfaceMap& map);

// First Betti number of the footprint: a regular neighborhood of the alive
// edges plus the closures of all disk faces.
int footprint_betti1(const SurfaceMap& map);

}  // namespace topowalk
