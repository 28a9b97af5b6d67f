#pragma once

#include "topowalk/surface_map.hpp"

namespace topowalk::fixtures {

// K4 drawn in the plane (vertex 3 inside triangle 0,1,2): sphere, 4 faces.
SurfaceMap tetrahedron_map();

// One vertex, two loops in commutator position: torus, one face.
SurfaceMap one_vertex_torus_map();

// Two vertices joined by antiparallel one-way edges: sphere, two digon faces.
SurfaceMap digon_sphere_map();

// Directed triangle on the sphere (one-way edges), two faces.
SurfaceMap triangle_sphere_map();

// One loop on the sphere with both faces punctured: annulus with core loop.
SurfaceMap loop_annulus_map();

// One loop on the sphere with one face punctured: disk map.
SurfaceMap loop_disk_map();

// Two disjoint directed triangles, outer walks sharing an annular face.
SurfaceMap nested_triangles_sphere_map();

// One symmetric edge on an annulus, both boundary circles in its single face.
SurfaceMap spanning_edge_annulus_map();

// Structural equality: same rotation system, edge table (alive slots), face
// grouping and annotations, and surface data. User ids are compared too.
bool same_map(const SurfaceMap& a, const SurfaceMap& b);

}  // namespace topowalk::fixtures
