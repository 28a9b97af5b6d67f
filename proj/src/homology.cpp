#include "topowalk/homology.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <queue>
#include <utility>

#include "topowalk/digraph.hpp"

namespace topowalk {

int Circulation::total() const {
  int sum = 0;
  for (int m : phi) sum += m;
  return sum;
}

namespace {

Walk translate(const Walk& w, const std::vector<DartId>& table) {
  Walk out;
  out.closed = w.closed;
  out.darts.reserve(w.darts.size());
  for (DartId d : w.darts) {
    require(d >= 0 && d < static_cast<int>(table.size()),
            "walk leaves the map");
    out.darts.push_back(table[d]);
  }
  return out;
}

}  // namespace

Walk DirectedRefinement::project(const Walk& w) const {
  return translate(w, to_original);
}

DirectedRefinement directed_refinement(const SurfaceMap& map) {
  std::vector<EdgeId> doubled;
  for (EdgeId e : map.alive_edge_ids()) {
    const EdgeRec& rec = map.edge(e);
    if (rec.w_fwd < kInf && rec.w_rev < kInf) doubled.push_back(e);
  }

  DirectedRefinement out;
  if (doubled.empty()) {
    out.map = map;
    out.to_original.resize(map.dart_slots());
    std::iota(out.to_original.begin(), out.to_original.end(), 0);
    out.twin.assign(map.edge_slots(), -1);
    return out;
  }

  std::vector<std::vector<DartId>> rot;
  rot.reserve(map.vertex_count());
  std::vector<int> user_vertex_ids;
  for (VertexId v = 0; v < map.vertex_count(); ++v) {
    rot.push_back(map.rotation(v));
    user_vertex_ids.push_back(map.user_vertex_id(v));
  }
  std::vector<EdgeRec> edges = map.edges();
  std::vector<int> user_edge_ids;
  int next_uid = 0;
  for (EdgeId e = 0; e < map.edge_slots(); ++e) {
    user_edge_ids.push_back(map.user_edge_id(e));
    next_uid = std::max(next_uid, map.user_edge_id(e) + 1);
  }

  const int total_slots = map.edge_slots() + static_cast<int>(doubled.size());
  out.twin.assign(total_slots, -1);
  out.to_original.resize(2 * total_slots);
  std::iota(out.to_original.begin(),
            out.to_original.begin() + map.dart_slots(), 0);

  for (EdgeId e : doubled) {
    const EdgeId t = static_cast<EdgeId>(edges.size());
    EdgeRec back;
    back.tail = edges[e].head;
    back.head = edges[e].tail;
    back.w_fwd = edges[e].w_rev;
    back.w_rev = kInf;
    edges[e].w_rev = kInf;
    edges.push_back(back);
    out.twin[e] = t;
    out.twin[t] = e;
    out.to_original[forward_dart(t)] = reverse_dart(e);
    out.to_original[reverse_dart(t)] = forward_dart(e);
    user_edge_ids.push_back(next_uid++);

    // Splice the new rail against the old edge: its reverse dart enters the
    // tail rotation just before the old forward dart, and its forward dart
    // enters the head rotation just after the old reverse dart. Loops share
    // one rotation list, so search fresh before each insert.
    auto& tail_rot = rot[back.head];
    auto it = std::find(tail_rot.begin(), tail_rot.end(), forward_dart(e));
    assert(it != tail_rot.end());
    tail_rot.insert(it, reverse_dart(t));
    auto& head_rot = rot[back.tail];
    auto jt = std::find(head_rot.begin(), head_rot.end(), reverse_dart(e));
    assert(jt != head_rot.end());
    head_rot.insert(jt + 1, forward_dart(t));
  }

  // Group the traced walks back into the old faces: a two-dart walk over a
  // doubled pair is the new enclosed disk; every other walk is an old walk
  // with each doubled forward dart replaced by the new reverse rail.
  auto new_walks = SurfaceMap::trace_walks(rot, edges);
  std::vector<std::vector<int>> walks_of_face(map.face_count());
  for (int w = 0; w < static_cast<int>(new_walks.size()); ++w) {
    const auto& darts = new_walks[w];
    if (darts.size() == 2 && is_forward(darts[0]) && is_forward(darts[1]) &&
        out.twin[edge_of(darts[0])] == edge_of(darts[1])) {
      continue;  // enclosed disk; defaults to a singleton face
    }
    walks_of_face[map.left_face(out.to_original[darts[0]])].push_back(w);
  }
  std::vector<FaceSpec> specs;
  for (FaceId f = 0; f < map.face_count(); ++f) {
    const FaceRec& rec = map.face(f);
    assert(walks_of_face[f].size() == rec.walks.size());
    FaceSpec spec;
    spec.walks = walks_of_face[f];
    spec.extra_genus = rec.extra_genus;
    spec.boundary_circles = rec.boundary_circles;
    specs.push_back(std::move(spec));
  }

  out.map = SurfaceMap::from_parts(std::move(rot), std::move(edges),
                                   std::move(specs),
                                   std::move(user_vertex_ids),
                                   std::move(user_edge_ids));
  assert(out.map.genus() == map.genus());
  assert(out.map.boundary_circles() == map.boundary_circles());
  return out;
}

namespace {

std::vector<EdgeId> cocycle_free_edges(const SurfaceMap& m) {
  std::vector<std::pair<int, int>> arcs;
  for (EdgeId e : m.alive_edge_ids()) {
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      if (m.dart_finite(d)) arcs.emplace_back(m.left_face(d), m.right_face(d));
    }
  }
  std::vector<int> comp = strong_components(m.face_count(), arcs);
  std::vector<EdgeId> kept;
  for (EdgeId e : m.alive_edge_ids()) {
    bool on_cocycle = false;
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      if (m.dart_finite(d) && comp[m.left_face(d)] == comp[m.right_face(d)])
        on_cocycle = true;
    }
    if (!on_cocycle) kept.push_back(e);
  }
  return kept;
}

// Cocycle removal for maps whose edges are already one-way.
SurfaceMap remove_cocycles_directed(const SurfaceMap& m) {
  return m.subgraph_with_faces(cocycle_free_edges(m));
}

}  // namespace

SurfaceMap remove_cocycle_edges(const SurfaceMap& map) {
  DirectedRefinement ref = directed_refinement(map);
  if (ref.map.edge_slots() == map.edge_slots())
    return remove_cocycles_directed(map);
  std::vector<EdgeId> kept;
  for (EdgeId e : cocycle_free_edges(ref.map)) {
    if (e < map.edge_slots()) kept.push_back(e);
  }
  return map.subgraph_with_faces(kept);
}

namespace {

bool distinct_tails(const SurfaceMap& m, const std::vector<DartId>& darts) {
  std::vector<VertexId> tails;
  tails.reserve(darts.size());
  for (DartId d : darts) tails.push_back(m.tail_of(d));
  std::sort(tails.begin(), tails.end());
  return std::adjacent_find(tails.begin(), tails.end()) == tails.end();
}

void rotate_to_min(std::vector<DartId>& darts) {
  auto it = std::min_element(darts.begin(), darts.end());
  std::rotate(darts.begin(), it, darts.end());
}

std::optional<Walk> coherent_disk_witness(const SurfaceMap& input,
                                          bool need_simple) {
  if (input.edge_count() == 0) return std::nullopt;
  DirectedRefinement ref = directed_refinement(input);
  SurfaceMap residue = remove_cocycles_directed(ref.map);
  for (FaceId f = 0; f < residue.face_count(); ++f) {
    const FaceRec& face = residue.face(f);
    if (!face.is_disk()) continue;
    const std::vector<DartId>& orbit = residue.walk_darts(face.walks[0]);
    auto finite = [&](DartId d) { return residue.dart_finite(d); };

    std::vector<std::vector<DartId>> candidates;
    // Counterclockwise: the orbit itself bounds the disk on its left.
    if (std::all_of(orbit.begin(), orbit.end(), finite))
      candidates.push_back(orbit);
    // Clockwise: the reversed orbit bounds the disk on its right.
    std::vector<DartId> anti(orbit.rbegin(), orbit.rend());
    for (DartId& d : anti) d = rev(d);
    if (std::all_of(anti.begin(), anti.end(), finite))
      candidates.push_back(std::move(anti));

    for (const auto& cand : candidates) {
      if (need_simple && !distinct_tails(residue, cand)) continue;
      Walk w;
      w.darts = cand;
      Walk projected = ref.project(w);
      rotate_to_min(projected.darts);
      assert(input.walk_ok(projected));
      return projected;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Walk> detect_simple_contractible_cycle(const SurfaceMap& map) {
  return coherent_disk_witness(map, /*need_simple=*/true);
}

std::optional<Walk> detect_contractible_walk(const SurfaceMap& map) {
  return coherent_disk_witness(map, /*need_simple=*/false);
}

namespace {

// Labels faces by decreasing topological rank of the dual, lowest face id
// first among ties, so alpha strictly descends across every traversable
// dart. Requires a cocycle-free map.
std::vector<int> dual_sort_ranks(const SurfaceMap& m) {
  const int F = m.face_count();
  std::vector<std::vector<int>> arcs(F);
  std::vector<int> indeg(F, 0);
  for (EdgeId e : m.alive_edge_ids()) {
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      if (!m.dart_finite(d)) continue;
      arcs[m.left_face(d)].push_back(m.right_face(d));
      ++indeg[m.right_face(d)];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int f = 0; f < F; ++f) {
    if (indeg[f] == 0) ready.push(f);
  }
  std::vector<int> alpha(F, 0);
  int pos = 0;
  while (!ready.empty()) {
    const int f = ready.top();
    ready.pop();
    alpha[f] = F - 1 - pos;
    ++pos;
    for (int g : arcs[f]) {
      if (--indeg[g] == 0) ready.push(g);
    }
  }
  assert(pos == F);
  return alpha;
}

std::optional<BoundingWitness> bounding_search(const SurfaceMap& m, int depth,
                                               int limit) {
  assert(depth <= limit);
  (void)limit;

  std::vector<std::pair<int, int>> arcs;
  for (EdgeId e : m.alive_edge_ids()) {
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      if (m.dart_finite(d)) arcs.emplace_back(m.tail_of(d), m.head_of(d));
    }
  }
  std::vector<int> comp = strong_components(m.vertex_count(), arcs);
  int comp_count = 0;
  for (int c : comp) comp_count = std::max(comp_count, c + 1);

  // Closed walks stay inside one strong component.
  std::vector<std::vector<EdgeId>> intra(comp_count);
  for (EdgeId e : m.alive_edge_ids()) {
    const EdgeRec& rec = m.edge(e);
    if (comp[rec.tail] == comp[rec.head]) intra[comp[rec.tail]].push_back(e);
  }

  for (int c = 0; c < comp_count; ++c) {
    if (intra[c].empty()) continue;
    SurfaceMap res = remove_cocycles_directed(m.subgraph_with_faces(intra[c]));
    if (res.edge_count() == 0) continue;

    std::vector<std::pair<int, int>> support;
    for (EdgeId e : res.alive_edge_ids())
      support.emplace_back(res.edge(e).tail, res.edge(e).head);
    std::vector<int> wc = weak_components(res.vertex_count(), support);
    std::vector<char> touched(res.vertex_count(), 0);
    for (auto [a, b] : support) touched[a] = touched[b] = 1;
    std::vector<int> parts;
    std::vector<char> seen(res.vertex_count(), 0);
    for (VertexId v = 0; v < res.vertex_count(); ++v) {
      if (touched[v] && !seen[wc[v]]) {
        seen[wc[v]] = 1;
        parts.push_back(wc[v]);
      }
    }

    if (parts.size() == 1) {
      // Cocycle-free and connected: every closed walk here bounds, and the
      // dual ranks certify one that covers the whole residue.
      BoundingWitness out;
      out.numbering.alpha = dual_sort_ranks(res);
#ifndef NDEBUG
      for (EdgeId e : res.alive_edge_ids()) {
        for (DartId d : {forward_dart(e), reverse_dart(e)}) {
          if (res.dart_finite(d))
            assert(out.numbering.alpha[res.left_face(d)] >
                   out.numbering.alpha[res.right_face(d)]);
        }
      }
#endif
      out.map = std::move(res);
      out.depth = depth;
      return out;
    }

    // Deleting cocycles split the component; the pieces see a coarser face
    // structure, so each gets a fresh search.
    for (int part : parts) {
      std::vector<EdgeId> edges;
      for (EdgeId e : res.alive_edge_ids()) {
        if (wc[res.edge(e).tail] == part) edges.push_back(e);
      }
      auto found = bounding_search(res.subgraph_with_faces(edges), depth + 1,
                                   limit);
      if (found) return found;
    }
  }
  return std::nullopt;
}

}  // namespace

Walk BoundingWitness::project(const Walk& w) const {
  return translate(w, to_input);
}

Walk BoundingWitness::walk() const {
  return project(euler_tour(boundary_circulation(numbering, map), map));
}

std::optional<BoundingWitness> detect_bounding_walk(const SurfaceMap& map) {
  std::vector<EdgeId> usable;
  for (EdgeId e : map.alive_edge_ids()) {
    const EdgeRec& rec = map.edge(e);
    if (rec.w_fwd < kInf || rec.w_rev < kInf) usable.push_back(e);
  }
  if (usable.empty()) return std::nullopt;

  SurfaceMap base = static_cast<int>(usable.size()) == map.edge_count()
                        ? map
                        : map.subgraph_with_faces(usable);
  if (base.boundary_circles() > 0) base = base.cap_boundary();
  DirectedRefinement ref = directed_refinement(base);
  const int limit = footprint_betti1(ref.map) + 1;
  auto found = bounding_search(ref.map, 1, limit);
  if (!found) return std::nullopt;
  found->to_input = std::move(ref.to_original);
  return found;
}

Circulation boundary_circulation(const AlexanderNumbering& numbering,
                                 const SurfaceMap& map) {
  require(static_cast<int>(numbering.alpha.size()) == map.face_count(),
          "numbering labels " + std::to_string(numbering.alpha.size()) +
              " faces on a map with " + std::to_string(map.face_count()));
  Circulation circ;
  circ.phi.assign(map.dart_slots(), 0);
  for (EdgeId e : map.alive_edge_ids()) {
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      const int delta = numbering.alpha[map.left_face(d)] -
                        numbering.alpha[map.right_face(d)];
      if (map.dart_finite(d)) {
        require(delta >= 0,
                "invalid numbering: negative boundary on a traversable dart");
        circ.phi[d] = delta;
      } else {
        require(delta <= 0,
                "invalid numbering: positive boundary on an untraversable "
                "dart");
      }
    }
  }
#ifndef NDEBUG
  std::vector<int> net(map.vertex_count(), 0);
  for (EdgeId e : map.alive_edge_ids()) {
    const EdgeRec& rec = map.edge(e);
    net[rec.tail] += circ.phi[forward_dart(e)] - circ.phi[reverse_dart(e)];
    net[rec.head] += circ.phi[reverse_dart(e)] - circ.phi[forward_dart(e)];
  }
  for (int v : net) assert(v == 0);
#endif
  return circ;
}

Circulation walk_circulation(const Walk& w, const SurfaceMap& map) {
  require(map.walk_ok(w), "not a walk of this map");
  require(w.closed, "a circulation needs a closed walk");
  Circulation circ;
  circ.phi.assign(map.dart_slots(), 0);
  for (DartId d : w.darts) ++circ.phi[d];
  return circ;
}

Walk euler_tour(const Circulation& circ, const SurfaceMap& map) {
  require(static_cast<int>(circ.phi.size()) == map.dart_slots(),
          "circulation covers " + std::to_string(circ.phi.size()) +
              " darts on a map with " + std::to_string(map.dart_slots()));
  std::vector<long long> net(map.vertex_count(), 0);
  std::vector<std::pair<int, int>> support;
  for (DartId d = 0; d < map.dart_slots(); ++d) {
    const int mult = circ.phi[d];
    require(mult >= 0, "negative circulation multiplicity");
    if (mult == 0) continue;
    require(map.edge_alive(edge_of(d)), "circulation uses a dead edge");
    require(map.dart_finite(d), "circulation uses an untraversable dart");
    net[map.tail_of(d)] += mult;
    net[map.head_of(d)] -= mult;
    support.emplace_back(map.tail_of(d), map.head_of(d));
  }
  require(!support.empty(), "circulation support is empty");
  for (long long n : net)
    require(n == 0, "circulation is not balanced");

  std::vector<int> wc = weak_components(map.vertex_count(), support);
  std::vector<char> touched(map.vertex_count(), 0);
  for (auto [a, b] : support) touched[a] = touched[b] = 1;
  int pieces = 0;
  VertexId start = -1;
  std::vector<char> seen(map.vertex_count(), 0);
  for (VertexId v = 0; v < map.vertex_count(); ++v) {
    if (!touched[v]) continue;
    if (start < 0) start = v;
    if (!seen[wc[v]]) {
      seen[wc[v]] = 1;
      ++pieces;
    }
  }
  require(pieces == 1, "circulation support is disconnected");

  std::vector<std::vector<DartId>> out(map.vertex_count());
  for (DartId d = 0; d < map.dart_slots(); ++d) {
    if (circ.phi[d] > 0) out[map.tail_of(d)].push_back(d);
  }
  std::vector<int> remaining = circ.phi;
  std::vector<size_t> cursor(map.vertex_count(), 0);
  std::vector<DartId> stack, circuit;
  VertexId at = start;
  while (true) {
    auto& lane = out[at];
    size_t& cur = cursor[at];
    while (cur < lane.size() && remaining[lane[cur]] == 0) ++cur;
    if (cur < lane.size()) {
      const DartId d = lane[cur];
      --remaining[d];
      stack.push_back(d);
      at = map.head_of(d);
    } else if (!stack.empty()) {
      circuit.push_back(stack.back());
      at = map.tail_of(stack.back());
      stack.pop_back();
    } else {
      break;
    }
  }
  std::reverse(circuit.begin(), circuit.end());

  Walk w;
  w.darts = std::move(circuit);
  assert(static_cast<int>(w.darts.size()) == circ.total());
  assert(map.walk_ok(w));
  return w;
}

int footprint_betti1(const SurfaceMap& map) {
  std::vector<EdgeId> alive = map.alive_edge_ids();
  if (alive.empty()) return 0;
  std::vector<std::pair<int, int>> arcs;
  std::vector<char> touched(map.vertex_count(), 0);
  for (EdgeId e : alive) {
    const EdgeRec& rec = map.edge(e);
    arcs.emplace_back(rec.tail, rec.head);
    touched[rec.tail] = touched[rec.head] = 1;
  }
  std::vector<int> comp = weak_components(map.vertex_count(), arcs);
  int verts = 0, comps = 0;
  std::vector<char> seen(map.vertex_count(), 0);
  for (VertexId v = 0; v < map.vertex_count(); ++v) {
    if (!touched[v]) continue;
    ++verts;
    if (!seen[comp[v]]) {
      seen[comp[v]] = 1;
      ++comps;
    }
  }
  int disks = 0;
  for (const FaceRec& f : map.faces()) {
    if (f.is_disk()) ++disks;
  }
  const int closed = map.cellular() ? 1 : 0;
  return comps + closed - verts + static_cast<int>(alive.size()) - disks;
}

}  // namespace topowalk
