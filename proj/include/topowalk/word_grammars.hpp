#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "topowalk/cfl_engine.hpp"
#include "topowalk/surface_map.hpp"

namespace topowalk {

// --- surfaces with boundary: system of dual arcs -----------------------------

// A set of beta = 2g+b-1 boundary-to-boundary dual paths that cut the surface
// into a disk. Edges crossed more than once are subdivided first, so on
// `sub.map` every edge carries at most one crossing. Each arc is directed;
// the direction is fixed so the arc crosses its lowest crossed edge from the
// left face of that edge's forward dart to the right face.
struct ArcSystem {
  Subdivision sub;                        // input map, subdivided as needed
  std::vector<int> arc_of_edge;           // per edge slot of sub.map, -1 free
  std::vector<DartId> ltr_dart;           // per edge slot, -1 when uncrossed
  std::vector<std::vector<EdgeId>> arcs;  // crossed edges in path order

  int beta() const { return static_cast<int>(arcs.size()); }

  // Free-group letter of a dart of sub.map: +i if the dart crosses arc i-1
  // left to right, -i right to left, 0 if its edge is uncrossed.
  int letter(DartId d) const;

  // Crossing word of a walk of the *input* map (epsilon letters dropped).
  std::vector<int> word(const Walk& w) const;
};

// Variant of tree-cotree for cellular maps with boundary: all boundary faces
// act as one dual root, every leftover edge contributes one arc routed
// root-to-root through the dual forest. Throws on closed surfaces.
ArcSystem system_of_dual_arcs(const SurfaceMap& map);

// --- closed surfaces: system of quads ----------------------------------------

// One vertex, 2g loops, one face: rotation a1 b1 a1' b1' a2 b2 a2' b2' ...
SurfaceMap canonical_system_of_loops(int g);

// The two-vertex quad decomposition of a closed genus-g surface together
// with the homotopy-preserving edge labels of a base map: contracting a
// spanning tree and deleting a dual spanning tree leaves a one-face system
// of loops; a hub z placed in that face and joined to every corner turns it
// into 4g edges and 2g quad faces. Each non-tree edge of the base map maps
// to the length-2 walk back corner -> z -> front corner.
struct QuadSystem {
  SurfaceMap quads;  // vertices {a, z}, 4g spoke edges, 2g quad faces
  VertexId a = 0;
  VertexId z = 1;
  int g = 0;
  std::vector<std::array<DartId, 2>> label;  // per base dart; {-1,-1} empty

  bool empty_label(DartId d) const { return label[d][0] < 0; }

  // Concatenated labels of a walk of the base map: a closed base walk is
  // contractible iff this word, lifted in the universal cover, closes.
  std::vector<DartId> word(const Walk& w) const;
};

// Requires a cellular closed map of genus >= 1; genus 0 has no quad system.
QuadSystem build_quads(const SurfaceMap& map);

// --- growth of the {4, 4g} tiling --------------------------------------------

// Vertex counts per distance layer obey a two-term linear recurrence; lambda
// is its dominant eigenvalue and the exponential growth rate of the tiling.
struct GrowthModel {
  int g = 2;
  double lambda = 0;      // 2g-1 + 2*sqrt(g*(g-1))
  double lambda_bar = 0;  // 1/lambda, the other eigenvalue
  double alpha = 0;       // sqrt(g/(g-1))
  long long m[2][2] = {{0, 0}, {0, 0}};  // [[4g-3, 4g-4], [1, 1]]

  // (n1, n2)(r): vertices at distance r with one resp. two neighbors at
  // distance r-1; starts from (4g, 0) at r = 1.
  std::pair<long long, long long> layer(int r) const;
  long long layer_total(int r) const;
  long long ball_size(int r) const;  // N(r) = 1 + sum of layers 1..r
};

GrowthModel growth_model(int g);
std::pair<long long, long long> growth_counts(int g, int r);

// Smallest integer r with lambda^r >= 2L/g. The boundary comparison is done
// in integers via lambda^r = A + B*sqrt(g(g-1)); floating point only seeds
// the search.
int rho(long long L, int g);

// --- finite patches of the universal cover -----------------------------------

// The {4, 4g} tiling out to a fixed radius around a lift of a. A patch dart
// is a (vertex, slot) pair; slot k at a vertex covers the k-th dart of the
// rotation of its image in Q, which makes the covering label implicit.
// Vertices closer than the radius carry all 4g neighbors and closed quads;
// frontier vertices only know their neighbors one layer down.
struct TilingPatch {
  int g = 0;
  int radius = 0;
  VertexId a_lift = 0;
  VertexId z_lift = -1;               // neighbor of a_lift through slot 0
  std::vector<DartId> rot[2];         // rotation of Q at a (0) and z (1)
  std::vector<int> slot_by_dart[2];   // Q dart -> slot in rot[cls], -1
  std::vector<int> ret_slot[2];       // slot -> matching slot at the far end
  std::vector<int32_t> nbr;           // vertex*4g + slot -> vertex, -1 open
  std::vector<int16_t> dist;          // BFS layer per vertex
  std::vector<uint8_t> cls;           // 0 projects to a, 1 to z
  std::vector<long long> layer_count; // vertices per layer 0..radius

  int deg() const { return 4 * g; }
  long long vertex_count() const { return static_cast<long long>(cls.size()); }
  int32_t neighbor(VertexId v, int slot) const {
    return nbr[static_cast<size_t>(v) * deg() + slot];
  }
  DartId label(VertexId v, int slot) const { return rot[cls[v]][slot]; }
};

// Layer-by-layer closure construction; `quads` must be the map of a
// QuadSystem (two vertices, all faces quads) of genus >= 2. Layer sizes are
// checked against the growth recurrence as the patch grows.
TilingPatch build_patch(const SurfaceMap& quads, int radius);

// Patch over the canonical genus-g quad system.
TilingPatch build_patch(int g, int radius);

// Walks a word of Q darts from a patch vertex. Returns the final vertex, or
// nullopt as soon as the walk steps onto a vertex the patch does not store.
// Throws MapError if the word is not a walk of Q starting at from's image.
std::optional<VertexId> replay(const TilingPatch& patch, VertexId from,
                               std::span<const DartId> word);

// --- grammars over the labelings ----------------------------------------------

// Dyck-style grammar of the free group on beta letters: the start symbol I
// derives exactly the nonempty words over {+-1, ..., +-beta} that freely
// reduce to the identity. 2*beta+1 nonterminals, 8*beta+1 productions.
CnfGrammar free_group_grammar(int beta);

// A map turned into a labeled graph, one letter per graph dart. An input
// dart whose label is a k-letter word becomes a chain of k graph darts
// through fresh direction-specific interior vertices; the split keeps walk
// weights and makes turning around in mid-edge impossible, so every closed
// graph walk projects back to a closed walk of the input map.
struct WordLabeling {
  LabeledGraph graph;
  std::vector<std::pair<DartId, int>> leg;  // graph dart -> (input dart, step)
  std::vector<int> chain_len;               // per input dart; 0 when skipped

  // Input-map walk of a graph walk; closed walks are rotated to start on an
  // input vertex first.
  Walk project(const Walk& graph_walk) const;
};

// Free-group letters of a surface with boundary: each finite dart carries
// the letters of the arcs it crosses, in crossing order (epsilon when it
// crosses none).
WordLabeling label_edges_free(const SurfaceMap& map, const ArcSystem& arcs);

// Quad-system letters of a closed surface: tree darts are epsilon, every
// other finite dart splits into its two spoke letters.
WordLabeling label_edges_hyperbolic(const SurfaceMap& map, const QuadSystem& qs);

// Short-class grammar over a quad system Q: a nonterminal is a pair of a
// vertex s of Q and a lift of s within 2*rho+2 of the base lift; it derives
// exactly the walk words of Q that run from s's base lift to that vertex in
// the universal cover. The start symbol is the identity class at a, whose
// words lift closed. Every generated word lifts closed. Completeness: every
// closed-lift word of length L is generated when rho(L, g) <= rho (the class
// radius serves that length) and L <= 4*rho+2 (the materialized patch
// serves it: compositions are enumerated by replay inside a patch of radius
// 3(rho+1), and a composition peaking at cover distance S only matters to
// words of length >= 2S-(2rho+2)). Both cuts keep soundness; rho=1 loses
// nothing to the second one. Terminals are the 8g darts of Q.
CnfGrammar short_class_grammar(const SurfaceMap& quads, int rho);

// Short-class grammar of the canonical genus-g quad system sized for closed
// walk words of length <= L; built once per (g, rho(L, g)) and cached.
const CnfGrammar& build_hyperbolic_grammar(int g, long long L);

// --- shortest contractible closed walks ----------------------------------------

// Cellular surface with boundary: the cheapest closed walk whose crossing
// word freely reduces to the identity, found as the better of the free-group
// grammar optimum and the best all-epsilon directed cycle. nullopt when no
// closed walk is contractible. The weight returned is the walk's weight in
// the input map.
std::optional<std::pair<Walk, double>> shortest_contractible_boundary(
    const SurfaceMap& map);

// Cellular closed surface of genus >= 2: same search over the quad-system
// labeling with the short-class grammar of the map's own quads, word budget
// L = 2 * edge_count. Internally climbs the grammar ladder rung by rung and
// stops as soon as the candidate in hand certifies itself against all walks
// with longer quad words (possible whenever every dart weight is positive),
// so well-behaved maps never pay for the big grammars. Any answer is a
// minimum over the walks whose quad word fits min(budget, 4*rho(budget)+2),
// the second term being the rung's guaranteed-complete word length, so it
// is exact whenever the true optimum fits that bound; candidates are always
// genuinely contractible walks regardless.
std::optional<std::pair<Walk, double>> shortest_contractible_hyperbolic(
    const SurfaceMap& map);
std::optional<std::pair<Walk, double>> shortest_contractible_hyperbolic(
    const SurfaceMap& map, long long word_budget);

}  // namespace topowalk
