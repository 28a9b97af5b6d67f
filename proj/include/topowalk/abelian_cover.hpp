#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "topowalk/surface_map.hpp"

namespace topowalk {

// Finite window of the universal abelian cover of an annulus or torus map:
// (2*radius+1)^dims copies of the map indexed by winding vectors, glued by
// per-dart winding shifts. A closed walk of the region projects to a closed
// base walk of zero winding, hence a contractible one on these surfaces.
struct CoverRegion {
  struct LiftedDart {
    int from = -1;  // lifted vertex ids
    int to = -1;
    DartId base = -1;
    double w = 0.0;
  };

  int dims = 0;    // independent winding directions: 1 annulus, 2 torus
  int radius = 0;  // winding coordinates run -radius..radius per direction
  int base_vertices = 0;
  std::vector<std::vector<int>> shift;  // dims x dart slots, each in -1..1
  std::vector<LiftedDart> darts;
  std::vector<std::vector<int>> out;  // lifted vertex -> lifted dart indices

  int axis() const { return 2 * radius + 1; }
  int copies() const { return dims == 2 ? axis() * axis() : axis(); }
  int vertex_count() const { return copies() * base_vertices; }
  int center_copy() const { return (copies() - 1) / 2; }
  int lifted_vertex(int copy, VertexId v) const {
    return copy * base_vertices + v;
  }
  int copy_of(int lifted) const { return lifted / base_vertices; }
  VertexId base_of(int lifted) const { return lifted % base_vertices; }
  DartId project(int lifted_dart) const { return darts[lifted_dart].base; }

  // Base walk under the projection; hop count and weight are preserved.
  Walk project_walk(const std::vector<int>& lifted) const;

  // Follows a base walk dart by dart starting at the given lifted vertex;
  // absent when some step leaves the window or is untraversable.
  std::optional<std::vector<int>> lift_walk(const Walk& w, int from) const;
};

// Region of the annulus cover (genus 0, two boundary circles) holding every
// closed lift of a contractible closed walk of at most hop_budget hops that
// starts in the center copy. Throws MapError on any other surface.
CoverRegion build_annulus_region(const SurfaceMap& map, int hop_budget);

// Torus analogue (genus 1, cellular, no boundary): a (2*hop_budget+1)^2
// grid of copies indexed by the two winding numbers.
CoverRegion build_torus_region(const SurfaceMap& map, int hop_budget);

// Shortest closed walk in the region through any vertex of the given copy,
// as lifted dart indices with its weight. Ties break toward the lowest
// starting vertex, then the lowest closing dart. Absent when no such walk
// exists (the region is acyclic through that copy).
std::optional<std::pair<std::vector<int>, double>> shortest_region_cycle(
    const CoverRegion& region, int copy);

// Shortest contractible closed directed walk of an annulus or torus map,
// with its weight; absent when every directed cycle is non-contractible or
// the map has no directed cycle at all. Hop budget is the edge count, which
// suffices: some minimum-weight contractible closed walk repeats no dart.
std::optional<std::pair<Walk, double>> shortest_contractible_abelian(
    const SurfaceMap& map);

}  // namespace topowalk
