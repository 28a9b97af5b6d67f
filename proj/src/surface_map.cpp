#include "topowalk/surface_map.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "topowalk/union_find.hpp"

namespace topowalk {

namespace {

std::string format_weight(double w) {
  if (w == kInf) return "inf";
  if (w == std::floor(w) && std::abs(w) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(w));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

}  // namespace

std::vector<std::vector<DartId>> SurfaceMap::trace_walks(
    const std::vector<std::vector<DartId>>& rotations,
    const std::vector<EdgeRec>& edges) {
  const int darts = 2 * static_cast<int>(edges.size());
  std::vector<DartId> rot_next(darts, -1);
  for (const auto& rot : rotations) {
    for (size_t i = 0; i < rot.size(); ++i) {
      rot_next[rot[i]] = rot[(i + 1) % rot.size()];
    }
  }
  std::vector<std::vector<DartId>> walks;
  std::vector<bool> seen(darts, false);
  for (DartId d0 = 0; d0 < darts; ++d0) {
    if (seen[d0] || !edges[edge_of(d0)].alive) continue;
    std::vector<DartId> walk;
    DartId d = d0;
    do {
      seen[d] = true;
      walk.push_back(d);
      d = rot_next[rev(d)];  // next dart along the face left of d
    } while (d != d0);
    walks.push_back(std::move(walk));
  }
  return walks;
}

SurfaceMap SurfaceMap::assemble(std::vector<std::vector<DartId>> rotations,
                                std::vector<EdgeRec> edges,
                                std::vector<FaceSpec> face_specs,
                                std::vector<int> user_vertex_ids,
                                std::vector<int> user_edge_ids,
                                bool allow_walkless) {
  const int V = static_cast<int>(rotations.size());
  const int E = static_cast<int>(edges.size());

  for (int e = 0; e < E; ++e) {
    const EdgeRec& r = edges[e];
    if (!r.alive) continue;
    require(r.tail >= 0 && r.tail < V && r.head >= 0 && r.head < V,
            "edge " + std::to_string(e) + " has an endpoint out of range");
    require(r.w_fwd >= 0 && r.w_rev >= 0 && !std::isnan(r.w_fwd) &&
                !std::isnan(r.w_rev),
            "edge " + std::to_string(e) + " has an invalid weight");
  }

  // Every alive dart appears exactly once, in the rotation of its tail.
  std::vector<int> dart_at(2 * E, -1);
  for (int v = 0; v < V; ++v) {
    for (DartId d : rotations[v]) {
      require(d >= 0 && d < 2 * E, "rotation dart out of range");
      require(edges[edge_of(d)].alive, "rotation references a dead edge");
      require(dart_at[d] == -1, "dart listed in two rotations");
      dart_at[d] = v;
    }
  }
  for (int e = 0; e < E; ++e) {
    if (!edges[e].alive) continue;
    require(dart_at[forward_dart(e)] == edges[e].tail,
            "dart of edge " + std::to_string(e) + " missing at its tail");
    require(dart_at[reverse_dart(e)] == edges[e].head,
            "dart of edge " + std::to_string(e) + " missing at its head");
  }

  SurfaceMap m;
  m.rotations_ = std::move(rotations);
  m.edges_ = std::move(edges);
  if (user_vertex_ids.empty()) {
    user_vertex_ids.resize(V);
    for (int v = 0; v < V; ++v) user_vertex_ids[v] = v;
  }
  if (user_edge_ids.empty()) {
    user_edge_ids.resize(E);
    for (int e = 0; e < E; ++e) user_edge_ids[e] = e;
  }
  require(static_cast<int>(user_vertex_ids.size()) == V &&
              static_cast<int>(user_edge_ids.size()) == E,
          "user id table size mismatch");
  m.user_vertex_ids_ = std::move(user_vertex_ids);
  m.user_edge_ids_ = std::move(user_edge_ids);

  m.rot_next_.assign(2 * E, -1);
  for (int v = 0; v < V; ++v) {
    const auto& rot = m.rotations_[v];
    for (size_t i = 0; i < rot.size(); ++i) {
      m.rot_next_[rot[i]] = rot[(i + 1) % rot.size()];
    }
  }

  m.walks_ = trace_walks(m.rotations_, m.edges_);
  m.walk_of_dart_.assign(2 * E, -1);
  for (int w = 0; w < static_cast<int>(m.walks_.size()); ++w) {
    for (DartId d : m.walks_[w]) m.walk_of_dart_[d] = w;
  }

  m.index_faces(std::move(face_specs), allow_walkless);
  m.compute_surface();
  return m;
}

SurfaceMap SurfaceMap::from_parts(std::vector<std::vector<DartId>> rotations,
                                  std::vector<EdgeRec> edges,
                                  std::vector<FaceSpec> face_specs,
                                  std::vector<int> user_vertex_ids,
                                  std::vector<int> user_edge_ids) {
  return assemble(std::move(rotations), std::move(edges),
                  std::move(face_specs), std::move(user_vertex_ids),
                  std::move(user_edge_ids), /*allow_walkless=*/false);
}

void SurfaceMap::index_faces(std::vector<FaceSpec> face_specs,
                             bool allow_walkless) {
  const int W = walk_count();
  std::vector<int> covered(W, -1);
  for (size_t s = 0; s < face_specs.size(); ++s) {
    const FaceSpec& spec = face_specs[s];
    require(spec.extra_genus >= 0 && spec.boundary_circles >= 0,
            "negative face annotation");
    require(allow_walkless || !spec.walks.empty(),
            "face spec with no boundary walks");
    for (int w : spec.walks) {
      require(w >= 0 && w < W, "face spec references unknown walk " +
                                   std::to_string(w));
      require(covered[w] == -1, "walk " + std::to_string(w) +
                                    " grouped into two faces");
      covered[w] = static_cast<int>(s);
    }
  }
  for (int w = 0; w < W; ++w) {
    if (covered[w] == -1) {
      FaceSpec single;
      single.walks = {w};
      face_specs.push_back(std::move(single));
    }
  }

  // Canonical face order: faces with walks sorted by smallest member walk,
  // then walkless faces in their given order.
  std::stable_sort(face_specs.begin(), face_specs.end(),
                   [](const FaceSpec& a, const FaceSpec& b) {
                     if (a.walks.empty() || b.walks.empty())
                       return b.walks.empty() && !a.walks.empty();
                     return *std::min_element(a.walks.begin(), a.walks.end()) <
                            *std::min_element(b.walks.begin(), b.walks.end());
                   });

  faces_.clear();
  face_of_walk_.assign(W, -1);
  for (const FaceSpec& spec : face_specs) {
    FaceRec rec;
    rec.walks = spec.walks;
    std::sort(rec.walks.begin(), rec.walks.end());
    rec.extra_genus = spec.extra_genus;
    rec.boundary_circles = spec.boundary_circles;
    for (int w : rec.walks) face_of_walk_[w] = static_cast<int>(faces_.size());
    faces_.push_back(std::move(rec));
  }
}

void SurfaceMap::compute_surface() {
  active_vertices_ = 0;
  for (const auto& rot : rotations_) {
    if (!rot.empty()) ++active_vertices_;
  }
  alive_edges_ = 0;
  for (const EdgeRec& e : edges_) {
    if (e.alive) ++alive_edges_;
  }

  if (alive_edges_ == 0) {
    require(face_count() == 1 && faces_[0].walks.empty(),
            "edgeless map needs exactly one explicit face");
  } else {
    for (const FaceRec& f : faces_) {
      require(!f.walks.empty() || face_count() == 1,
              "face without boundary walks on a map with edges");
    }
  }

  int chi_faces = 0;
  boundary_circles_ = 0;
  for (const FaceRec& f : faces_) {
    chi_faces += f.chi();
    boundary_circles_ += f.boundary_circles;
  }
  const int chi = active_vertices_ - alive_edges_ + chi_faces;
  const int twog = 2 - boundary_circles_ - chi;
  require(twog >= 0 && twog % 2 == 0,
          "Euler checksum does not describe an orientable surface (chi=" +
              std::to_string(chi) + ", b=" + std::to_string(boundary_circles_) +
              ")");
  genus_ = twog / 2;

  // The surface must be connected: vertices are linked by alive edges and
  // by sharing a face (via its listed walks).
  if (alive_edges_ > 0) {
    UnionFind uf(vertex_count());
    for (const EdgeRec& e : edges_) {
      if (e.alive) uf.unite(e.tail, e.head);
    }
    for (const FaceRec& f : faces_) {
      for (size_t i = 1; i < f.walks.size(); ++i) {
        uf.unite(tail_of(walks_[f.walks[0]][0]),
                 tail_of(walks_[f.walks[i]][0]));
      }
    }
    int root = -1;
    for (int v = 0; v < vertex_count(); ++v) {
      if (rotations_[v].empty()) continue;
      if (root == -1) root = uf.find(v);
      require(uf.find(v) == root, "map is disconnected");
    }
  }
}

std::vector<EdgeId> SurfaceMap::alive_edge_ids() const {
  std::vector<EdgeId> ids;
  ids.reserve(alive_edges_);
  for (int e = 0; e < edge_slots(); ++e) {
    if (edges_[e].alive) ids.push_back(e);
  }
  return ids;
}

VertexId SurfaceMap::vertex_by_user_id(int uid) const {
  for (int v = 0; v < vertex_count(); ++v) {
    if (user_vertex_ids_[v] == uid) return v;
  }
  return -1;
}

EdgeId SurfaceMap::edge_by_user_id(int uid) const {
  for (int e = 0; e < edge_slots(); ++e) {
    if (edges_[e].alive && user_edge_ids_[e] == uid) return e;
  }
  return -1;
}

bool SurfaceMap::cellular() const {
  for (const FaceRec& f : faces_) {
    if (!f.is_disk()) return false;
  }
  return true;
}

SurfaceMap SurfaceMap::subgraph_with_faces(
    const std::vector<EdgeId>& kept) const {
  std::vector<bool> keep(edge_slots(), false);
  for (EdgeId e : kept) {
    require(e >= 0 && e < edge_slots() && edges_[e].alive,
            "subgraph keeps an unknown or dead edge");
    keep[e] = true;
  }

  std::vector<EdgeRec> new_edges = edges_;
  std::vector<EdgeId> deleted;
  for (int e = 0; e < edge_slots(); ++e) {
    if (edges_[e].alive && !keep[e]) {
      new_edges[e].alive = false;
      deleted.push_back(e);
    }
  }

  std::vector<std::vector<DartId>> new_rot(vertex_count());
  for (int v = 0; v < vertex_count(); ++v) {
    for (DartId d : rotations_[v]) {
      if (keep[edge_of(d)]) new_rot[v].push_back(d);
    }
  }

  // Regions: old faces glued across each deleted edge.
  UnionFind uf(face_count());
  for (EdgeId e : deleted) {
    uf.unite(left_face(forward_dart(e)), left_face(reverse_dart(e)));
  }
  std::vector<int> deleted_in(face_count(), 0);
  for (EdgeId e : deleted) ++deleted_in[uf.find(left_face(forward_dart(e)))];
  std::vector<int> newly_floating(face_count(), 0);
  for (int v = 0; v < vertex_count(); ++v) {
    if (rotations_[v].empty() || !new_rot[v].empty()) continue;
    // All faces around v were glued into one region by v's deleted edges.
    int region = uf.find(left_face(rotations_[v][0]));
    for (DartId d : rotations_[v]) {
      assert(uf.find(left_face(d)) == region);
      (void)d;
    }
    ++newly_floating[region];
  }

  std::vector<int> chi_sum(face_count(), 0), circles(face_count(), 0);
  for (int f = 0; f < face_count(); ++f) {
    int r = uf.find(f);
    chi_sum[r] += faces_[f].chi();
    circles[r] += faces_[f].boundary_circles;
  }

  // New walks and their regions.
  auto new_walks = trace_walks(new_rot, new_edges);
  std::map<int, std::vector<int>> region_walks;
  for (int w = 0; w < static_cast<int>(new_walks.size()); ++w) {
    int region = uf.find(left_face(new_walks[w][0]));
    for (DartId d : new_walks[w]) {
      assert(uf.find(left_face(d)) == region);
      (void)d;
    }
    region_walks[region].push_back(w);
  }
  // Regions with no remaining walks still exist (they absorbed everything
  // around them); only possible when the whole graph went away.
  std::set<int> roots;
  for (int f = 0; f < face_count(); ++f) roots.insert(uf.find(f));

  std::vector<FaceSpec> specs;
  for (int r : roots) {
    FaceSpec spec;
    auto it = region_walks.find(r);
    if (it != region_walks.end()) spec.walks = it->second;
    const int chi = chi_sum[r] - deleted_in[r] + newly_floating[r];
    const int k = static_cast<int>(spec.walks.size());
    spec.boundary_circles = circles[r];
    const int twoh = 2 - k - circles[r] - chi;
    require(twoh >= 0 && twoh % 2 == 0, "region chi bookkeeping failed");
    spec.extra_genus = twoh / 2;
    if (spec.walks.empty() && roots.size() > 1) {
      // A walkless region on a map that still has edges would mean the
      // surface were disconnected; it cannot happen.
      require(false, "walkless region next to surviving edges");
    }
    specs.push_back(std::move(spec));
  }

  SurfaceMap sub = assemble(std::move(new_rot), std::move(new_edges),
                            std::move(specs), user_vertex_ids_,
                            user_edge_ids_, /*allow_walkless=*/true);
  assert(sub.genus() == genus() && sub.boundary_circles() == boundary_circles());
  return sub;
}

SurfaceMap SurfaceMap::regrouped(std::vector<FaceSpec> face_specs) const {
  return assemble(rotations_, edges_, std::move(face_specs),
                  user_vertex_ids_, user_edge_ids_, /*allow_walkless=*/false);
}

SurfaceMap SurfaceMap::cap_boundary() const {
  require(boundary_circles_ > 0, "cap_boundary needs a surface with boundary");
  FaceSpec merged;
  int chi_sum = 0;
  std::vector<FaceSpec> specs;
  for (const FaceRec& f : faces_) {
    if (f.boundary_circles == 0) {
      if (f.walks.size() >= 2 || f.extra_genus > 0) {
        specs.push_back({f.walks, f.extra_genus, f.boundary_circles});
      }
      continue;  // plain faces re-emerge as singleton disks
    }
    merged.walks.insert(merged.walks.end(), f.walks.begin(), f.walks.end());
    chi_sum += f.chi();
  }
  // Glue a (b-1)-holed sphere (chi = 2-b) along all boundary circles.
  const int chi = chi_sum + 2 - boundary_circles_;
  const int k = static_cast<int>(merged.walks.size());
  const int twoh = 2 - k - chi;
  assert(twoh >= 0 && twoh % 2 == 0);
  merged.extra_genus = twoh / 2;
  merged.boundary_circles = 0;
  specs.push_back(std::move(merged));
  SurfaceMap capped = regrouped(std::move(specs));
  assert(capped.genus() == genus() + boundary_circles() - 1);
  assert(capped.boundary_circles() == 0);
  return capped;
}

bool SurfaceMap::walk_ok(const Walk& w) const {
  if (w.darts.empty()) return !w.closed;
  for (size_t i = 0; i < w.darts.size(); ++i) {
    DartId d = w.darts[i];
    if (d < 0 || d >= dart_slots() || !edges_[edge_of(d)].alive) return false;
    if (i + 1 < w.darts.size() && head_of(d) != tail_of(w.darts[i + 1]))
      return false;
  }
  if (w.closed && head_of(w.darts.back()) != tail_of(w.darts.front()))
    return false;
  return true;
}

double SurfaceMap::walk_weight(const Walk& w) const {
  double total = 0;
  for (DartId d : w.darts) total += dart_weight(d);
  return total;
}

// --- derived structures ------------------------------------------------------

DualGraph dual(const SurfaceMap& map) {
  DualGraph g;
  g.node_count = map.face_count();
  for (EdgeId e : map.alive_edge_ids()) {
    g.arcs.push_back({map.left_face(forward_dart(e)),
                      map.left_face(reverse_dart(e)), e});
  }
  return g;
}

TreeCotree tree_cotree(const SurfaceMap& map) {
  TreeCotree tc;
  UnionFind primal(map.vertex_count());
  std::vector<EdgeId> rest;
  for (EdgeId e : map.alive_edge_ids()) {
    if (primal.unite(map.edge(e).tail, map.edge(e).head)) {
      tc.tree.push_back(e);
    } else {
      rest.push_back(e);
    }
  }
  require(static_cast<int>(tc.tree.size()) == map.active_vertex_count() - 1,
          "tree_cotree: primal graph is disconnected");

  UnionFind dualuf(map.face_count());
  for (EdgeId e : rest) {
    if (dualuf.unite(map.left_face(forward_dart(e)),
                     map.left_face(reverse_dart(e)))) {
      tc.cotree.push_back(e);
    } else {
      tc.leftover.push_back(e);
    }
  }
  require(static_cast<int>(tc.cotree.size()) == map.face_count() - 1,
          "tree_cotree: dual graph is disconnected");
  return tc;
}

Subdivision subdivide_edges(const SurfaceMap& map,
                            const std::vector<int>& piece_count) {
  require(static_cast<int>(piece_count.size()) == map.edge_slots(),
          "piece_count must cover every edge slot");
  Subdivision out;
  out.pieces.resize(map.edge_slots());

  const int V0 = map.vertex_count();
  std::vector<EdgeRec> edges;
  std::vector<int> user_eids;
  std::vector<std::vector<DartId>> rot(V0);
  std::vector<int> user_vids;
  for (int v = 0; v < V0; ++v) user_vids.push_back(map.user_vertex_id(v));
  int next_vertex = V0;
  int next_user_vid = 0;
  int next_user_eid = 0;
  for (int v = 0; v < V0; ++v)
    next_user_vid = std::max(next_user_vid, map.user_vertex_id(v) + 1);
  for (int e = 0; e < map.edge_slots(); ++e) {
    if (map.edge_alive(e))
      next_user_eid = std::max(next_user_eid, map.user_edge_id(e) + 1);
  }

  // Lay out the new edge table: pieces of edge e are consecutive.
  std::vector<std::vector<VertexId>> chain_vertices(map.edge_slots());
  for (EdgeId e = 0; e < map.edge_slots(); ++e) {
    if (!map.edge_alive(e)) continue;
    const int k = piece_count[e];
    require(k >= 1, "piece count must be at least 1");
    const EdgeRec& r = map.edge(e);
    std::vector<VertexId> vs = {r.tail};
    for (int j = 1; j < k; ++j) vs.push_back(next_vertex++);
    vs.push_back(r.head);
    chain_vertices[e] = vs;
    for (int j = 0; j < k; ++j) {
      EdgeRec piece;
      piece.tail = vs[j];
      piece.head = vs[j + 1];
      piece.w_fwd = r.w_fwd == kInf ? kInf : r.w_fwd / k;
      piece.w_rev = r.w_rev == kInf ? kInf : r.w_rev / k;
      out.pieces[e].push_back(static_cast<EdgeId>(edges.size()));
      out.origin.push_back({e, j});
      edges.push_back(piece);
      user_eids.push_back(k == 1 ? map.user_edge_id(e) : next_user_eid++);
    }
  }

  rot.resize(next_vertex);
  user_vids.resize(next_vertex);
  for (int v = V0; v < next_vertex; ++v) user_vids[v] = next_user_vid++;

  // Original vertices keep their rotation order; each interior chain vertex
  // sees the next piece and the previous piece's reversal.
  for (int v = 0; v < V0; ++v) {
    for (DartId d : map.rotation(v)) {
      const EdgeId e = edge_of(d);
      const auto& ps = out.pieces[e];
      rot[v].push_back(is_forward(d) ? forward_dart(ps.front())
                                     : reverse_dart(ps.back()));
    }
  }
  for (EdgeId e = 0; e < map.edge_slots(); ++e) {
    const auto& ps = out.pieces[e];
    for (size_t j = 1; j < ps.size(); ++j) {
      VertexId v = chain_vertices[e][j];
      rot[v].push_back(forward_dart(ps[j]));
      rot[v].push_back(reverse_dart(ps[j - 1]));
    }
  }

  // Faces: subdividing does not change the face structure; walk ids map
  // one-to-one because piece darts inherit their edge's position in every
  // orbit. Rebuild the specs through the walk correspondence.
  std::vector<FaceSpec> specs;
  {
    auto new_walks = SurfaceMap::trace_walks(rot, edges);
    // Identify each new walk by the lowest original dart on it.
    auto orig_dart = [&](DartId nd) {
      auto [oe, idx] = out.origin[edge_of(nd)];
      return is_forward(nd) ? forward_dart(oe) : reverse_dart(oe);
    };
    std::vector<int> new_walk_of_old(map.walk_count(), -1);
    for (int w = 0; w < static_cast<int>(new_walks.size()); ++w) {
      int best = -1;
      for (DartId nd : new_walks[w]) best = best == -1
                                                ? orig_dart(nd)
                                                : std::min(best, orig_dart(nd));
      int old_walk = map.walk_of_dart(best);
      require(new_walk_of_old[old_walk] == -1,
              "subdivision changed the face structure");
      new_walk_of_old[old_walk] = w;
    }
    for (const FaceRec& f : map.faces()) {
      FaceSpec spec;
      for (int w : f.walks) spec.walks.push_back(new_walk_of_old[w]);
      spec.extra_genus = f.extra_genus;
      spec.boundary_circles = f.boundary_circles;
      specs.push_back(std::move(spec));
    }
  }

  out.map = SurfaceMap::from_parts(std::move(rot), std::move(edges),
                                   std::move(specs), std::move(user_vids),
                                   std::move(user_eids));
  return out;
}

std::vector<DartId> Subdivision::lift(DartId d) const {
  const auto& ps = pieces[edge_of(d)];
  std::vector<DartId> out;
  if (is_forward(d)) {
    for (EdgeId p : ps) out.push_back(forward_dart(p));
  } else {
    for (auto it = ps.rbegin(); it != ps.rend(); ++it)
      out.push_back(reverse_dart(*it));
  }
  return out;
}

Walk Subdivision::project(const Walk& w) const {
  Walk result;
  result.closed = w.closed;
  size_t i = 0;
  while (i < w.darts.size()) {
    DartId d = w.darts[i];
    auto [e, idx] = origin[edge_of(d)];
    const int k = static_cast<int>(pieces[e].size());
    // A run must cover the whole chain of pieces in order.
    if (is_forward(d)) {
      require(idx == 0, "walk enters an edge chain mid-way");
      for (int j = 0; j < k; ++j) {
        require(i + j < w.darts.size() &&
                    w.darts[i + j] == forward_dart(pieces[e][j]),
                "walk reverses inside an edge chain");
      }
      result.darts.push_back(forward_dart(e));
    } else {
      require(idx == k - 1, "walk enters an edge chain mid-way");
      for (int j = 0; j < k; ++j) {
        require(i + j < w.darts.size() &&
                    w.darts[i + j] == reverse_dart(pieces[e][k - 1 - j]),
                "walk reverses inside an edge chain");
      }
      result.darts.push_back(reverse_dart(e));
    }
    i += k;
  }
  return result;
}

// --- io ----------------------------------------------------------------------

void SurfaceMap::save(std::ostream& out, const std::vector<Walk>& walks) const {
  for (const FaceRec& f : faces_) {
    require(!f.walks.empty(), "map with walkless faces cannot be serialized");
  }
  for (int v = 0; v < vertex_count(); ++v) {
    out << "vertex " << user_vertex_ids_[v] << ":";
    for (DartId d : rotations_[v]) {
      out << ' ' << (is_forward(d) ? '+' : '-') << user_edge_ids_[edge_of(d)];
    }
    out << '\n';
  }
  for (int e = 0; e < edge_slots(); ++e) {
    if (!edges_[e].alive) continue;
    const EdgeRec& r = edges_[e];
    out << "edge " << user_edge_ids_[e] << " tail=" << user_vertex_ids_[r.tail]
        << " head=" << user_vertex_ids_[r.head]
        << " w+=" << format_weight(r.w_fwd)
        << " w-=" << format_weight(r.w_rev) << '\n';
  }
  for (const FaceRec& f : faces_) {
    if (f.walks.size() < 2) continue;
    out << "same_face";
    for (int w : f.walks) out << ' ' << w;
    out << '\n';
  }
  for (int fid = 0; fid < face_count(); ++fid) {
    const FaceRec& f = faces_[fid];
    if (f.extra_genus == 0 && f.boundary_circles == 0) continue;
    out << "face " << fid << " genus=" << f.extra_genus
        << " boundary=" << f.boundary_circles << '\n';
  }
  for (const Walk& w : walks) {
    out << "walk:";
    for (DartId d : w.darts) {
      out << ' ' << (is_forward(d) ? '+' : '-') << user_edge_ids_[edge_of(d)];
    }
    out << '\n';
  }
}

std::string SurfaceMap::to_text(const std::vector<Walk>& walks) const {
  std::ostringstream ss;
  save(ss, walks);
  return ss.str();
}

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw MapError("line " + std::to_string(line) + ": " + msg);
}

long parse_int(const Line& line, const std::string& tok) {
  try {
    size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail_at(line.number, "expected an integer, got '" + tok + "'");
  }
}

double parse_weight_token(const Line& line, const std::string& tok) {
  if (tok == "inf") return kInf;
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail_at(line.number, "expected a weight, got '" + tok + "'");
  }
}

// "+12" / "-12" -> (user edge id, forward?)
std::pair<long, bool> parse_signed_edge(const Line& line,
                                        const std::string& tok) {
  if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-')) {
    fail_at(line.number, "expected a signed edge id, got '" + tok + "'");
  }
  return {parse_int(line, tok.substr(1)), tok[0] == '+'};
}

}  // namespace

MapFile load_map(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.resize(hash);
    }
    std::istringstream ss(raw);
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }

  // Vertices and edges first; rotations and annotations need their ids.
  std::unordered_map<long, int> vid_index, eid_index;
  std::vector<int> user_vids, user_eids;
  std::vector<EdgeRec> edges;
  std::vector<const Line*> vertex_lines;
  for (const Line& line : lines) {
    const std::string& kind = line.tokens[0];
    if (kind == "vertex") {
      if (line.tokens.size() < 2 || line.tokens[1].back() != ':')
        fail_at(line.number, "expected 'vertex <id>:'");
      std::string idtok = line.tokens[1].substr(0, line.tokens[1].size() - 1);
      long uid = parse_int(line, idtok);
      if (vid_index.count(uid))
        fail_at(line.number, "duplicate vertex " + std::to_string(uid));
      vid_index[uid] = static_cast<int>(user_vids.size());
      user_vids.push_back(static_cast<int>(uid));
      vertex_lines.push_back(&line);
    } else if (kind == "edge") {
      if (line.tokens.size() != 6)
        fail_at(line.number,
                "expected 'edge <id> tail=<v> head=<v> w+=<w> w-=<w>'");
      long uid = parse_int(line, line.tokens[1]);
      if (eid_index.count(uid))
        fail_at(line.number, "duplicate edge " + std::to_string(uid));
      EdgeRec rec;
      auto keyed = [&](int i, const std::string& key) -> std::string {
        const std::string& tok = line.tokens[i];
        if (tok.rfind(key, 0) != 0)
          fail_at(line.number, "expected '" + key + "...', got '" + tok + "'");
        return tok.substr(key.size());
      };
      long tail_uid = parse_int(line, keyed(2, "tail="));
      long head_uid = parse_int(line, keyed(3, "head="));
      auto tv = vid_index.find(tail_uid);
      auto hv = vid_index.find(head_uid);
      if (tv == vid_index.end())
        fail_at(line.number, "unknown vertex " + std::to_string(tail_uid));
      if (hv == vid_index.end())
        fail_at(line.number, "unknown vertex " + std::to_string(head_uid));
      rec.tail = tv->second;
      rec.head = hv->second;
      rec.w_fwd = parse_weight_token(line, keyed(4, "w+="));
      rec.w_rev = parse_weight_token(line, keyed(5, "w-="));
      if (rec.w_fwd < 0 || rec.w_rev < 0)
        fail_at(line.number, "negative weight");
      eid_index[uid] = static_cast<int>(edges.size());
      user_eids.push_back(static_cast<int>(uid));
      edges.push_back(rec);
    }
  }
  // Vertex declarations must precede edge lines that use them, which the
  // single pass above already enforces; rotations can reference edges
  // declared anywhere, so resolve them now.
  std::vector<std::vector<DartId>> rotations(user_vids.size());
  for (const Line* lp : vertex_lines) {
    const Line& line = *lp;
    std::string idtok = line.tokens[1].substr(0, line.tokens[1].size() - 1);
    int v = vid_index[parse_int(line, idtok)];
    for (size_t i = 2; i < line.tokens.size(); ++i) {
      auto [ueid, fwd] = parse_signed_edge(line, line.tokens[i]);
      auto it = eid_index.find(ueid);
      if (it == eid_index.end())
        fail_at(line.number, "unknown edge " + std::to_string(ueid));
      rotations[v].push_back(fwd ? forward_dart(it->second)
                                 : reverse_dart(it->second));
    }
  }

  require(!edges.empty(), "map file declares no edges");
  auto walks = SurfaceMap::trace_walks(rotations, edges);
  const int W = static_cast<int>(walks.size());

  // Face grouping and annotations.
  std::vector<FaceSpec> groups;
  std::vector<int> covered(W, -1);
  for (const Line& line : lines) {
    if (line.tokens[0] != "same_face") continue;
    if (line.tokens.size() < 3)
      fail_at(line.number, "same_face needs at least two walk ids");
    FaceSpec spec;
    for (size_t i = 1; i < line.tokens.size(); ++i) {
      long w = parse_int(line, line.tokens[i]);
      if (w < 0 || w >= W)
        fail_at(line.number, "unknown face walk " + std::to_string(w));
      if (covered[w] != -1)
        fail_at(line.number,
                "face walk " + std::to_string(w) + " grouped twice");
      covered[w] = 1;
      spec.walks.push_back(static_cast<int>(w));
    }
    groups.push_back(std::move(spec));
  }
  for (int w = 0; w < W; ++w) {
    if (covered[w] == -1) groups.push_back({{w}, 0, 0});
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const FaceSpec& a, const FaceSpec& b) {
                     return *std::min_element(a.walks.begin(), a.walks.end()) <
                            *std::min_element(b.walks.begin(), b.walks.end());
                   });
  for (const Line& line : lines) {
    if (line.tokens[0] != "face") continue;
    if (line.tokens.size() != 4)
      fail_at(line.number, "expected 'face <id> genus=<h> boundary=<c>'");
    long fid = parse_int(line, line.tokens[1]);
    if (fid < 0 || fid >= static_cast<long>(groups.size()))
      fail_at(line.number, "unknown face " + std::to_string(fid));
    auto keyed = [&](int i, const std::string& key) -> std::string {
      const std::string& tok = line.tokens[i];
      if (tok.rfind(key, 0) != 0)
        fail_at(line.number, "expected '" + key + "...', got '" + tok + "'");
      return tok.substr(key.size());
    };
    long h = parse_int(line, keyed(2, "genus="));
    long c = parse_int(line, keyed(3, "boundary="));
    if (h < 0 || c < 0) fail_at(line.number, "negative face annotation");
    groups[fid].extra_genus = static_cast<int>(h);
    groups[fid].boundary_circles = static_cast<int>(c);
  }

  MapFile out;
  out.map = SurfaceMap::from_parts(std::move(rotations), std::move(edges),
                                   std::move(groups), std::move(user_vids),
                                   std::move(user_eids));

  for (const Line& line : lines) {
    if (line.tokens[0] != "walk:") continue;
    Walk w;
    for (size_t i = 1; i < line.tokens.size(); ++i) {
      auto [ueid, fwd] = parse_signed_edge(line, line.tokens[i]);
      auto it = eid_index.find(ueid);
      if (it == eid_index.end())
        fail_at(line.number, "unknown edge " + std::to_string(ueid));
      w.darts.push_back(fwd ? forward_dart(it->second)
                            : reverse_dart(it->second));
    }
    if (!out.map.walk_ok(w))
      fail_at(line.number, "walk darts are not consecutive");
    out.walks.push_back(std::move(w));
  }

  for (const Line& line : lines) {
    const std::string& kind = line.tokens[0];
    if (kind != "vertex" && kind != "edge" && kind != "same_face" &&
        kind != "face" && kind != "walk:") {
      fail_at(line.number, "unknown directive '" + kind + "'");
    }
  }
  return out;
}

MapFile load_map_text(const std::string& text) {
  std::istringstream ss(text);
  return load_map(ss);
}

MapFile load_map_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open '" + path + "'");
  try {
    return load_map(in);
  } catch (const MapError& err) {
    throw MapError(path + ": " + err.what());
  }
}

std::string save_map(const SurfaceMap& map, const std::vector<Walk>& walks) {
  return map.to_text(walks);
}

void save_map_file(const SurfaceMap& map, const std::string& path,
                   const std::vector<Walk>& walks) {
  std::ofstream out(path);
  require(out.good(), "cannot open '" + path + "' for writing");
  map.save(out, walks);
}

Walk parse_walk(const SurfaceMap& map, const std::string& text) {
  Walk w;
  std::string tok;
  std::istringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    // allow surrounding spaces
    while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    if (tok.empty()) continue;
    require(tok.size() >= 2 && (tok[0] == '+' || tok[0] == '-'),
            "walk element '" + tok + "' must look like +3 or -3");
    int uid = 0;
    try {
      size_t pos = 0;
      uid = std::stoi(tok.substr(1), &pos);
      require(pos == tok.size() - 1, "trailing characters");
    } catch (const std::exception&) {
      throw MapError("walk element '" + tok + "' must look like +3 or -3");
    }
    EdgeId e = map.edge_by_user_id(uid);
    require(e >= 0, "walk references unknown edge '" + tok + "'");
    w.darts.push_back(tok[0] == '+' ? forward_dart(e) : reverse_dart(e));
  }
  require(map.walk_ok(w), "walk darts are not consecutive");
  return w;
}

std::string format_walk(const SurfaceMap& map, const Walk& w) {
  std::string out;
  for (DartId d : w.darts) {
    if (!out.empty()) out += ',';
    out += is_forward(d) ? '+' : '-';
    out += std::to_string(map.user_edge_id(edge_of(d)));
  }
  return out;
}

}  // namespace topowalk
