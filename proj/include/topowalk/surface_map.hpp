#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topowalk/types.hpp"

namespace topowalk {

struct EdgeRec {
  VertexId tail = -1;
  VertexId head = -1;
  double w_fwd = 1.0;  // weight of dart 2e (tail -> head)
  double w_rev = 1.0;  // weight of dart 2e+1 (head -> tail)
  bool alive = true;
};

// A face of the embedding. Faces need not be disks: extra_genus counts
// handles attached to the open cell, boundary_circles counts surface
// boundary circles in its interior, and walks lists the face walks of the
// rotation system that bound it (possibly several, possibly none after
// edge deletions).
struct FaceRec {
  std::vector<int> walks;  // canonical face-walk ids, ascending
  int extra_genus = 0;
  int boundary_circles = 0;

  int chi() const {
    return 2 - 2 * extra_genus - static_cast<int>(walks.size()) -
           boundary_circles;
  }
  bool is_disk() const {
    return extra_genus == 0 && boundary_circles == 0 && walks.size() == 1;
  }
  bool is_boundary() const { return boundary_circles > 0; }
};

// Face description used when constructing a map: which face walks bound the
// face (by canonical walk id) plus its annotations. Walks not covered by any
// spec become singleton disk faces.
struct FaceSpec {
  std::vector<int> walks;
  int extra_genus = 0;
  int boundary_circles = 0;
};

struct DualArc {
  FaceId tail = -1;  // Left(e)*
  FaceId head = -1;  // Right(e)*
  EdgeId primal = -1;
};

struct DualGraph {
  int node_count = 0;  // one node per face
  std::vector<DualArc> arcs;
};

struct TreeCotree {
  std::vector<EdgeId> tree;      // spans primal vertices
  std::vector<EdgeId> cotree;    // spans dual nodes
  std::vector<EdgeId> leftover;  // the rest; 2g on cellular closed maps
};

// Immutable rotation-system embedding with face bookkeeping. Vertices and
// edge slots keep their indices across derived maps (subgraphs mark edges
// dead instead of renumbering), so walks and witnesses stay comparable.
class SurfaceMap {
 public:
  // Empty placeholder; every usable map comes from from_parts or a loader.
  SurfaceMap() = default;

  // Validating constructor; throws MapError on any inconsistency.
  // rotations[v] lists outgoing darts counterclockwise; every dart of an
  // alive edge must appear exactly once, in the rotation of its tail.
  static SurfaceMap from_parts(std::vector<std::vector<DartId>> rotations,
                               std::vector<EdgeRec> edges,
                               std::vector<FaceSpec> face_specs = {},
                               std::vector<int> user_vertex_ids = {},
                               std::vector<int> user_edge_ids = {});

  // Face-walk orbits of a rotation system, in canonical order: darts are
  // scanned ascending and each unvisited orbit is traced with
  // next(d) = rot_next(rev(d)), which walks along the face left of d.
  static std::vector<std::vector<DartId>> trace_walks(
      const std::vector<std::vector<DartId>>& rotations,
      const std::vector<EdgeRec>& edges);

  // --- sizes
  int vertex_count() const { return static_cast<int>(rotations_.size()); }
  int active_vertex_count() const { return active_vertices_; }
  int edge_slots() const { return static_cast<int>(edges_.size()); }
  int dart_slots() const { return 2 * edge_slots(); }
  int edge_count() const { return alive_edges_; }
  int walk_count() const { return static_cast<int>(walks_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  // --- edges and darts
  bool edge_alive(EdgeId e) const { return edges_[e].alive; }
  const EdgeRec& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<EdgeRec>& edges() const { return edges_; }
  std::vector<EdgeId> alive_edge_ids() const;
  VertexId tail_of(DartId d) const {
    const EdgeRec& e = edges_[edge_of(d)];
    return is_forward(d) ? e.tail : e.head;
  }
  VertexId head_of(DartId d) const { return tail_of(rev(d)); }
  double dart_weight(DartId d) const {
    const EdgeRec& e = edges_[edge_of(d)];
    return is_forward(d) ? e.w_fwd : e.w_rev;
  }
  bool dart_finite(DartId d) const { return dart_weight(d) < kInf; }

  // --- rotations and faces
  const std::vector<DartId>& rotation(VertexId v) const {
    return rotations_[v];
  }
  DartId rot_next(DartId d) const { return rot_next_[d]; }
  DartId face_next(DartId d) const { return rot_next_[rev(d)]; }
  int walk_of_dart(DartId d) const { return walk_of_dart_[d]; }
  const std::vector<DartId>& walk_darts(int fwid) const {
    return walks_[fwid];
  }
  FaceId face_of_walk(int fwid) const { return face_of_walk_[fwid]; }
  FaceId left_face(DartId d) const {
    return face_of_walk_[walk_of_dart_[d]];
  }
  FaceId right_face(DartId d) const { return left_face(rev(d)); }
  const FaceRec& face(FaceId f) const { return faces_[f]; }
  const std::vector<FaceRec>& faces() const { return faces_; }

  // --- surface
  int genus() const { return genus_; }
  int boundary_circles() const { return boundary_circles_; }
  int surface_chi() const { return 2 - 2 * genus_ - boundary_circles_; }
  int betti1() const {
    return boundary_circles_ == 0 ? 2 * genus_
                                  : 2 * genus_ + boundary_circles_ - 1;
  }
  bool closed_surface() const { return boundary_circles_ == 0; }
  bool cellular() const;  // every face a disk

  // --- user-facing identifiers (preserved by IO and derived maps)
  int user_vertex_id(VertexId v) const { return user_vertex_ids_[v]; }
  int user_edge_id(EdgeId e) const { return user_edge_ids_[e]; }
  VertexId vertex_by_user_id(int uid) const;
  EdgeId edge_by_user_id(int uid) const;

  // --- derived maps (the ambient surface is unchanged)
  // Keeps all vertices and only the given edges; new faces are the regions
  // obtained by merging old faces across deleted edges, with chi bookkeeping.
  SurfaceMap subgraph_with_faces(const std::vector<EdgeId>& kept) const;
  // Glues a (b-1)-holed sphere along all boundary circles, producing a map
  // of the closed surface of genus g + b - 1. Requires b > 0.
  SurfaceMap cap_boundary() const;
  // Same rotation system, new face grouping/annotations.
  SurfaceMap regrouped(std::vector<FaceSpec> face_specs) const;

  // --- walks
  bool walk_ok(const Walk& w) const;  // incidences + alive darts
  double walk_weight(const Walk& w) const;

  // --- io
  void save(std::ostream& out, const std::vector<Walk>& walks = {}) const;
  std::string to_text(const std::vector<Walk>& walks = {}) const;

 private:
  void index_faces(std::vector<FaceSpec> face_specs, bool allow_walkless);
  void compute_surface();
  static SurfaceMap assemble(std::vector<std::vector<DartId>> rotations,
                             std::vector<EdgeRec> edges,
                             std::vector<FaceSpec> face_specs,
                             std::vector<int> user_vertex_ids,
                             std::vector<int> user_edge_ids,
                             bool allow_walkless);

  std::vector<std::vector<DartId>> rotations_;
  std::vector<EdgeRec> edges_;
  std::vector<DartId> rot_next_;          // per dart; -1 for dead darts
  std::vector<std::vector<DartId>> walks_;
  std::vector<int> walk_of_dart_;         // per dart; -1 for dead darts
  std::vector<FaceId> face_of_walk_;
  std::vector<FaceRec> faces_;
  std::vector<int> user_vertex_ids_;
  std::vector<int> user_edge_ids_;
  int active_vertices_ = 0;
  int alive_edges_ = 0;
  int genus_ = 0;
  int boundary_circles_ = 0;
};

DualGraph dual(const SurfaceMap& map);

// Spanning tree of the primal graph, spanning tree of the dual over the
// remaining edges, leftover edges; all chosen lowest-edge-id-first.
// Throws MapError if the primal graph or the dual is disconnected.
TreeCotree tree_cotree(const SurfaceMap& map);

// Subdivides each listed edge into the given number of pieces (>= 1).
// Piece j of edge e runs tail..head order and keeps e's orientation;
// weights are split evenly so walk weights are preserved.
struct Subdivision {
  SurfaceMap map;
  std::vector<std::vector<EdgeId>> pieces;  // per original edge id
  std::vector<std::pair<EdgeId, int>> origin;  // per new edge: (orig, index)
  // Maps a walk of the subdivided map back to the original map. The walk
  // must traverse complete piece runs (no turning around mid-edge).
  Walk project(const Walk& w) const;
  // Lifts an original-map dart to the corresponding dart sequence.
  std::vector<DartId> lift(DartId d) const;
};
Subdivision subdivide_edges(const SurfaceMap& map,
                            const std::vector<int>& piece_count);

// --- file io ---------------------------------------------------------------

struct MapFile {
  SurfaceMap map;
  std::vector<Walk> walks;
};

MapFile load_map(std::istream& in);
MapFile load_map_text(const std::string& text);
MapFile load_map_file(const std::string& path);
std::string save_map(const SurfaceMap& map, const std::vector<Walk>& walks = {});
void save_map_file(const SurfaceMap& map, const std::string& path,
                   const std::vector<Walk>& walks = {});

// Parses "+3,-1,+2" (user edge ids; '+' forward dart, '-' reverse dart).
Walk parse_walk(const SurfaceMap& map, const std::string& text);
std::string format_walk(const SurfaceMap& map, const Walk& w);

}  // namespace topowalk
