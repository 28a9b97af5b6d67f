#include "fixtures.hpp"

namespace topowalk::fixtures {

namespace {

EdgeRec sym(VertexId t, VertexId h, double w = 1.0) {
  return EdgeRec{t, h, w, w, true};
}

EdgeRec one_way(VertexId t, VertexId h, double w = 1.0) {
  return EdgeRec{t, h, w, kInf, true};
}

}  // namespace

SurfaceMap tetrahedron_map() {
  // e0:0-1 e1:0-2 e2:0-3 e3:1-2 e4:1-3 e5:2-3, v3 drawn inside triangle 012.
  std::vector<EdgeRec> edges = {sym(0, 1), sym(0, 2), sym(0, 3),
                                sym(1, 2), sym(1, 3), sym(2, 3)};
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), forward_dart(2), forward_dart(1)},
      {forward_dart(3), forward_dart(4), reverse_dart(0)},
      {reverse_dart(1), forward_dart(5), reverse_dart(3)},
      {reverse_dart(5), reverse_dart(2), reverse_dart(4)},
  };
  return SurfaceMap::from_parts(rot, edges);
}

SurfaceMap one_vertex_torus_map() {
  std::vector<EdgeRec> edges = {sym(0, 0), sym(0, 0)};
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), forward_dart(1), reverse_dart(0), reverse_dart(1)},
  };
  return SurfaceMap::from_parts(rot, edges);
}

SurfaceMap digon_sphere_map() {
  std::vector<EdgeRec> edges = {one_way(0, 1), one_way(1, 0)};
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), reverse_dart(1)},
      {forward_dart(1), reverse_dart(0)},
  };
  return SurfaceMap::from_parts(rot, edges);
}

SurfaceMap triangle_sphere_map() {
  std::vector<EdgeRec> edges = {one_way(0, 1), one_way(1, 2), one_way(2, 0)};
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), reverse_dart(2)},
      {forward_dart(1), reverse_dart(0)},
      {forward_dart(2), reverse_dart(1)},
  };
  return SurfaceMap::from_parts(rot, edges);
}

SurfaceMap loop_annulus_map() {
  std::vector<EdgeRec> edges = {sym(0, 0)};
  std::vector<std::vector<DartId>> rot = {{forward_dart(0), reverse_dart(0)}};
  // Both monogon faces are punctured: the loop is the annulus core.
  std::vector<FaceSpec> specs = {{{0}, 0, 1}, {{1}, 0, 1}};
  return SurfaceMap::from_parts(rot, edges, specs);
}

SurfaceMap loop_disk_map() {
  std::vector<EdgeRec> edges = {sym(0, 0)};
  std::vector<std::vector<DartId>> rot = {{forward_dart(0), reverse_dart(0)}};
  std::vector<FaceSpec> specs = {{{1}, 0, 1}};
  return SurfaceMap::from_parts(rot, edges, specs);
}

SurfaceMap nested_triangles_sphere_map() {
  std::vector<EdgeRec> edges = {one_way(0, 1), one_way(1, 2), one_way(2, 0),
                                one_way(3, 4), one_way(4, 5), one_way(5, 3)};
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), reverse_dart(2)},
      {forward_dart(1), reverse_dart(0)},
      {forward_dart(2), reverse_dart(1)},
      {forward_dart(3), reverse_dart(5)},
      {forward_dart(4), reverse_dart(3)},
      {forward_dart(5), reverse_dart(4)},
  };
  // Walk 1 ({1,3,5}: around triangle 012) and walk 3 ({7,9,11}: around
  // triangle 345) bound one annular face: triangle 345 sits inside it.
  std::vector<FaceSpec> specs = {{{1, 3}, 0, 0}};
  return SurfaceMap::from_parts(rot, edges, specs);
}

SurfaceMap spanning_edge_annulus_map() {
  std::vector<EdgeRec> edges = {sym(0, 1)};
  std::vector<std::vector<DartId>> rot = {{forward_dart(0)},
                                          {reverse_dart(0)}};
  std::vector<FaceSpec> specs = {{{0}, 0, 2}};
  return SurfaceMap::from_parts(rot, edges, specs);
}

bool same_map(const SurfaceMap& a, const SurfaceMap& b) {
  if (a.vertex_count() != b.vertex_count()) return false;
  if (a.edge_slots() != b.edge_slots()) return false;
  for (EdgeId e = 0; e < a.edge_slots(); ++e) {
    if (a.edge_alive(e) != b.edge_alive(e)) return false;
    if (!a.edge_alive(e)) continue;
    const EdgeRec& ea = a.edge(e);
    const EdgeRec& eb = b.edge(e);
    if (ea.tail != eb.tail || ea.head != eb.head) return false;
    if (ea.w_fwd != eb.w_fwd || ea.w_rev != eb.w_rev) return false;
    if (a.user_edge_id(e) != b.user_edge_id(e)) return false;
  }
  for (VertexId v = 0; v < a.vertex_count(); ++v) {
    if (a.rotation(v) != b.rotation(v)) return false;
    if (a.user_vertex_id(v) != b.user_vertex_id(v)) return false;
  }
  if (a.face_count() != b.face_count()) return false;
  for (FaceId f = 0; f < a.face_count(); ++f) {
    const FaceRec& fa = a.face(f);
    const FaceRec& fb = b.face(f);
    if (fa.walks != fb.walks) return false;
    if (fa.extra_genus != fb.extra_genus) return false;
    if (fa.boundary_circles != fb.boundary_circles) return false;
  }
  return a.genus() == b.genus() && a.boundary_circles() == b.boundary_circles();
}

}  // namespace topowalk::fixtures
