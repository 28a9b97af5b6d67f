#include "topowalk/word_grammars.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace topowalk {

namespace {

using boost::multiprecision::cpp_int;

// -- system of dual arcs ------------------------------------------------------

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

struct RouteEntry {
  EdgeId edge;
  FaceId from;
  FaceId to;
};

// Dual dart of a crossing: 2e when the arc runs left-of-2e -> right-of-2e.
DartId crossing_token(const SurfaceMap& map, const RouteEntry& r) {
  return map.left_face(forward_dart(r.edge)) == r.from ? forward_dart(r.edge)
                                                       : reverse_dart(r.edge);
}

void flip_route(std::vector<RouteEntry>& route) {
  std::reverse(route.begin(), route.end());
  for (RouteEntry& r : route) std::swap(r.from, r.to);
}

}  // namespace

int ArcSystem::letter(DartId d) const {
  int arc = arc_of_edge[edge_of(d)];
  if (arc < 0) return 0;
  return d == ltr_dart[edge_of(d)] ? arc + 1 : -(arc + 1);
}

std::vector<int> ArcSystem::word(const Walk& w) const {
  std::vector<int> out;
  for (DartId d : w.darts)
    for (DartId piece : sub.lift(d))
      if (int l = letter(piece); l != 0) out.push_back(l);
  return out;
}

ArcSystem system_of_dual_arcs(const SurfaceMap& map) {
  require(map.boundary_circles() > 0,
          "system of dual arcs: closed surface has no boundary to cut to");
  for (const FaceRec& f : map.faces())
    require(f.is_disk() || (f.extra_genus == 0 && f.walks.size() == 1 &&
                            f.boundary_circles == 1),
            "system of dual arcs needs a cellular map with boundary");

  TreeCotree tc = tree_cotree(map);
  std::vector<char> in_tree(map.edge_slots(), 0);
  for (EdgeId e : tc.tree) in_tree[e] = 1;

  // Dual spanning forest rooted at the boundary: all boundary faces are one
  // node, so every other face gets a unique climb toward some boundary face.
  Dsu dsu(map.face_count());
  FaceId first_boundary = -1;
  for (FaceId f = 0; f < map.face_count(); ++f)
    if (map.face(f).is_boundary()) {
      if (first_boundary < 0)
        first_boundary = f;
      else
        dsu.unite(first_boundary, f);
    }

  std::vector<std::vector<std::pair<FaceId, EdgeId>>> adj(map.face_count());
  std::vector<EdgeId> leftover;
  for (EdgeId e : map.alive_edge_ids()) {
    if (in_tree[e]) continue;
    FaceId l = map.left_face(forward_dart(e));
    FaceId r = map.right_face(forward_dart(e));
    if (dsu.unite(l, r)) {
      adj[l].push_back({r, e});
      adj[r].push_back({l, e});
    } else {
      leftover.push_back(e);
    }
  }
  require(static_cast<int>(leftover.size()) == map.betti1(),
          "system of dual arcs: leftover count is not the first Betti number");

  std::vector<FaceId> parent_face(map.face_count(), -1);
  std::vector<EdgeId> parent_edge(map.face_count(), -1);
  std::vector<char> seen(map.face_count(), 0);
  std::queue<FaceId> bfs;
  for (FaceId f = 0; f < map.face_count(); ++f)
    if (map.face(f).is_boundary()) {
      seen[f] = 1;
      bfs.push(f);
    }
  while (!bfs.empty()) {
    FaceId f = bfs.front();
    bfs.pop();
    for (auto [g, e] : adj[f])
      if (!seen[g]) {
        seen[g] = 1;
        parent_face[g] = f;
        parent_edge[g] = e;
        bfs.push(g);
      }
  }
  for (FaceId f = 0; f < map.face_count(); ++f)
    require(seen[f], "system of dual arcs: dual forest misses a face");

  // Root-to-root route per leftover edge: climb down to its left face, cross
  // it, climb back up from its right face.
  auto chain_down = [&](FaceId f) {
    std::vector<RouteEntry> down;
    while (parent_face[f] >= 0) {
      down.push_back({parent_edge[f], parent_face[f], f});
      f = parent_face[f];
    }
    std::reverse(down.begin(), down.end());
    return down;
  };

  std::vector<std::vector<RouteEntry>> routes;
  for (EdgeId e : leftover) {
    FaceId l = map.left_face(forward_dart(e));
    FaceId r = map.right_face(forward_dart(e));
    std::vector<RouteEntry> route = chain_down(l);
    route.push_back({e, l, r});
    std::vector<RouteEntry> up = chain_down(r);
    flip_route(up);
    route.insert(route.end(), up.begin(), up.end());

    std::vector<RouteEntry> flipped = route;
    flip_route(flipped);
    auto token_less = [&](const std::vector<RouteEntry>& a,
                          const std::vector<RouteEntry>& b) {
      for (size_t i = 0; i < a.size(); ++i) {
        DartId ta = crossing_token(map, a[i]);
        DartId tb = crossing_token(map, b[i]);
        if (ta != tb) return ta < tb;
      }
      return false;
    };
    if (token_less(flipped, route)) route = std::move(flipped);
    routes.push_back(std::move(route));
  }

  // One crossing per edge after subdivision; the spare uncrossed piece keeps
  // the left and right faces glued in the cut complex.
  std::vector<int> crossings(map.edge_slots(), 0);
  for (const auto& route : routes)
    for (const RouteEntry& r : route) ++crossings[r.edge];
  std::vector<int> piece_count(map.edge_slots(), 1);
  for (EdgeId e = 0; e < map.edge_slots(); ++e)
    if (crossings[e] > 0) piece_count[e] = crossings[e] + 1;

  ArcSystem out;
  out.sub = subdivide_edges(map, piece_count);
  out.arc_of_edge.assign(out.sub.map.edge_slots(), -1);
  out.ltr_dart.assign(out.sub.map.edge_slots(), -1);

  std::vector<int> next_visit(map.edge_slots(), 0);
  for (size_t i = 0; i < routes.size(); ++i) {
    std::vector<EdgeId> crossed;
    for (const RouteEntry& r : routes[i]) {
      EdgeId piece = out.sub.pieces[r.edge][next_visit[r.edge]++];
      // The dart whose left face is the arc's target side crosses the arc
      // left to right; piece darts keep the original edge's sides.
      DartId d = map.left_face(forward_dart(r.edge)) == r.to
                     ? forward_dart(r.edge)
                     : reverse_dart(r.edge);
      require(out.arc_of_edge[piece] < 0,
              "system of dual arcs: edge piece crossed twice");
      out.arc_of_edge[piece] = static_cast<int>(i);
      out.ltr_dart[piece] =
          is_forward(d) ? forward_dart(piece) : reverse_dart(piece);
      crossed.push_back(piece);
    }
    out.arcs.push_back(std::move(crossed));
  }
  return out;
}

// -- system of quads ----------------------------------------------------------

SurfaceMap canonical_system_of_loops(int g) {
  require(g >= 1, "system of loops needs genus >= 1");
  std::vector<EdgeRec> edges(2 * g, EdgeRec{0, 0, 1.0, 1.0});
  std::vector<DartId> rot;
  for (int i = 0; i < g; ++i) {
    DartId a = forward_dart(2 * i), b = forward_dart(2 * i + 1);
    rot.insert(rot.end(), {a, b, rev(a), rev(b)});
  }
  return SurfaceMap::from_parts({rot}, std::move(edges));
}

namespace {

// Contracts every tree edge into the root and returns the root's rotation,
// which then lists both darts of every non-tree edge. Children are spliced
// in before their parents so each contraction merges a finished subtree.
std::vector<DartId> contract_tree(const SurfaceMap& map,
                                  const std::vector<EdgeId>& tree) {
  std::vector<std::vector<DartId>> rot(map.vertex_count());
  VertexId root = -1;
  for (VertexId v = 0; v < map.vertex_count(); ++v) {
    rot[v] = map.rotation(v);
    if (root < 0 && !rot[v].empty()) root = v;
  }
  require(root >= 0, "contract_tree: map has no darts");

  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj(map.vertex_count());
  for (EdgeId e : tree) {
    adj[map.edge(e).tail].push_back({map.edge(e).head, e});
    adj[map.edge(e).head].push_back({map.edge(e).tail, e});
  }
  std::vector<VertexId> order{root};
  std::vector<EdgeId> up_edge(map.vertex_count(), -1);
  std::vector<char> visited(map.vertex_count(), 0);
  visited[root] = 1;
  for (size_t i = 0; i < order.size(); ++i)
    for (auto [w, e] : adj[order[i]])
      if (!visited[w]) {
        visited[w] = 1;
        up_edge[w] = e;
        order.push_back(w);
      }
  require(order.size() == static_cast<size_t>(map.active_vertex_count()),
          "contract_tree: tree does not span the active vertices");

  for (size_t i = order.size(); i-- > 1;) {
    VertexId v = order[i];
    EdgeId e = up_edge[v];
    VertexId u = map.edge(e).tail == v ? map.edge(e).head : map.edge(e).tail;
    DartId down = map.edge(e).tail == u ? forward_dart(e) : reverse_dart(e);

    auto pos_u = std::find(rot[u].begin(), rot[u].end(), down);
    auto pos_v = std::find(rot[v].begin(), rot[v].end(), rev(down));
    require(pos_u != rot[u].end() && pos_v != rot[v].end(),
            "contract_tree: tree dart missing from a rotation");
    std::vector<DartId> merged(rot[u].begin(), pos_u);
    merged.insert(merged.end(), pos_v + 1, rot[v].end());
    merged.insert(merged.end(), rot[v].begin(), pos_v);
    merged.insert(merged.end(), pos_u + 1, rot[u].end());
    rot[u] = std::move(merged);
    rot[v].clear();
  }
  return rot[root];
}

}  // namespace

std::vector<DartId> QuadSystem::word(const Walk& w) const {
  std::vector<DartId> out;
  for (DartId d : w.darts)
    if (!empty_label(d)) {
      out.push_back(label[d][0]);
      out.push_back(label[d][1]);
    }
  return out;
}

QuadSystem build_quads(const SurfaceMap& map) {
  require(map.closed_surface(), "system of quads needs a closed surface");
  require(map.cellular(), "system of quads needs a cellular map");
  require(map.genus() >= 1, "system of quads: genus 0 leaves no loops");
  int g = map.genus();

  TreeCotree tc = tree_cotree(map);
  std::vector<char> in_tree(map.edge_slots(), 0), in_cotree(map.edge_slots(), 0);
  for (EdgeId e : tc.tree) in_tree[e] = 1;
  for (EdgeId e : tc.cotree) in_cotree[e] = 1;

  std::vector<DartId> rot_all = contract_tree(map, tc.tree);

  // Loop-system rotation sigma = leftover darts only; every other non-tree
  // dart is charged to the corner of sigma it sits in.
  int n = 4 * g;
  std::vector<DartId> sigma;
  std::vector<int> sigma_pos(map.dart_slots(), -1);
  for (DartId d : rot_all)
    if (!in_cotree[edge_of(d)]) {
      sigma_pos[d] = static_cast<int>(sigma.size());
      sigma.push_back(d);
    }
  require(static_cast<int>(sigma.size()) == n,
          "system of quads: loop system is not a 4g-gon");

  // corner_after[d]: the corner of sigma a dart sits in, taking the corner
  // that follows d in rotation order when d is itself a side of the polygon.
  // corner_before[d] differs only on polygon sides, where it is the corner
  // ahead of the side; a dart pushed off the polygon boundary leaves through
  // the corner before it and arrives through the corner after its reverse.
  std::vector<int> corner_after(map.dart_slots(), -1);
  std::vector<int> corner_before(map.dart_slots(), -1);
  {
    size_t start = 0;
    while (sigma_pos[rot_all[start]] < 0) ++start;
    int cur = -1;
    for (size_t t = 0; t < rot_all.size(); ++t) {
      DartId d = rot_all[(start + t) % rot_all.size()];
      if (sigma_pos[d] >= 0) cur = sigma_pos[d];
      corner_after[d] = cur;
      corner_before[d] = sigma_pos[d] >= 0 ? (sigma_pos[d] + n - 1) % n : cur;
    }
  }

  // The face walk of the 4g-gon visits each corner once; the hub's rotation
  // runs through the corners in the reverse of that order.
  std::vector<int> corner_order;
  {
    DartId d = sigma[0];
    do {
      corner_order.push_back(sigma_pos[rev(d)]);
      d = sigma[(sigma_pos[rev(d)] + 1) % n];
    } while (d != sigma[0]);
    require(static_cast<int>(corner_order.size()) == n,
            "system of quads: loop system has more than one face");
  }

  std::vector<EdgeRec> spokes(n, EdgeRec{0, 1, 1.0, 1.0});
  std::vector<DartId> rot_a(n), rot_z(n);
  for (int k = 0; k < n; ++k) rot_a[k] = forward_dart(k);
  for (int k = 0; k < n; ++k)
    rot_z[k] = reverse_dart(corner_order[n - 1 - k]);

  QuadSystem qs;
  qs.g = g;
  qs.quads = SurfaceMap::from_parts({rot_a, rot_z}, std::move(spokes));
  require(qs.quads.genus() == g && qs.quads.face_count() == 2 * g,
          "system of quads: assembled map is not 2g quads");
  for (int w = 0; w < qs.quads.walk_count(); ++w)
    require(qs.quads.walk_darts(w).size() == 4,
            "system of quads: non-quad face");

  qs.label.assign(map.dart_slots(), {-1, -1});
  for (EdgeId e : map.alive_edge_ids()) {
    if (in_tree[e]) continue;
    for (DartId d : {forward_dart(e), reverse_dart(e)})
      qs.label[d] = {forward_dart(corner_before[d]),
                     reverse_dart(corner_after[rev(d)])};
  }
  return qs;
}

// -- growth model ---------------------------------------------------------

GrowthModel growth_model(int g) {
  require(g >= 2, "growth model needs genus >= 2");
  GrowthModel gm;
  gm.g = g;
  gm.lambda = 2 * g - 1 + 2 * std::sqrt(double(g) * (g - 1));
  gm.lambda_bar = 1.0 / gm.lambda;
  gm.alpha = std::sqrt(double(g) / (g - 1));
  gm.m[0][0] = 4 * g - 3;
  gm.m[0][1] = 4 * g - 4;
  gm.m[1][0] = 1;
  gm.m[1][1] = 1;
  return gm;
}

std::pair<long long, long long> GrowthModel::layer(int r) const {
  require(r >= 1, "growth layers start at r = 1");
  long long n1 = 4LL * g, n2 = 0;
  for (int i = 1; i < r; ++i) {
    long long n1next = m[0][0] * n1 + m[0][1] * n2;
    long long n2next = m[1][0] * n1 + m[1][1] * n2;
    n1 = n1next;
    n2 = n2next;
  }
  return {n1, n2};
}

long long GrowthModel::layer_total(int r) const {
  auto [n1, n2] = layer(r);
  return n1 + n2;
}

long long GrowthModel::ball_size(int r) const {
  long long total = 1;
  for (int i = 1; i <= r; ++i) total += layer_total(i);
  return total;
}

std::pair<long long, long long> growth_counts(int g, int r) {
  return growth_model(g).layer(r);
}

int rho(long long L, int g) {
  require(L >= 1 && g >= 2, "rho needs L >= 1 and g >= 2");
  // lambda^r = A + B*sqrt(D) with integer A, B; the ceiling test
  // lambda^r >= 2L/g compares g*B*sqrt(D) against 2L - g*A exactly.
  cpp_int D = cpp_int(g) * (g - 1);
  auto reached = [&](const cpp_int& A, const cpp_int& B) {
    cpp_int rhs = 2 * cpp_int(L) - g * A;
    if (rhs <= 0) return true;
    return cpp_int(g) * g * B * B * D >= rhs * rhs;
  };
  cpp_int A = 1, B = 0;
  int r = 0;
  while (!reached(A, B)) {
    cpp_int a2 = (2 * g - 1) * A + 2 * D * B;
    cpp_int b2 = (2 * g - 1) * B + 2 * A;
    A = a2;
    B = b2;
    ++r;
  }
  return r;
}

// -- tiling patches ---------------------------------------------------------

namespace {

struct PatchBuilder {
  TilingPatch p;
  int deg;

  size_t slot(VertexId v, int k) const {
    return static_cast<size_t>(v) * deg + k;
  }
  int wrap(int k) const { return (k % deg + deg) % deg; }

  VertexId create(uint8_t c, int16_t d) {
    p.cls.push_back(c);
    p.dist.push_back(d);
    p.nbr.insert(p.nbr.end(), deg, -1);
    return static_cast<VertexId>(p.cls.size() - 1);
  }

  void link(VertexId v, int k, VertexId w, int wk) {
    int32_t& a = p.nbr[slot(v, k)];
    int32_t& b = p.nbr[slot(w, wk)];
    if (a == w && b == v) return;
    require(a == -1 && b == -1, "patch: quad closure contradiction");
    require(p.rot[p.cls[w]][wk] == rev(p.rot[p.cls[v]][k]),
            "patch: closure pairs mismatched covering labels");
    a = w;
    b = v;
  }

  // Far end of the patch dart (v, k), when present.
  bool reverse_of(VertexId v, int k, VertexId& w, int& wk) const {
    int32_t n = p.nbr[slot(v, k)];
    if (n < 0) return false;
    w = n;
    wk = p.ret_slot[p.cls[v]][k];
    return true;
  }

  // A missing neighbor is forced as soon as the other three sides of either
  // adjacent quad exist: walk that quad the long way around.
  bool try_close(VertexId v, int k) {
    VertexId x = v;
    int s = k;
    bool ok = true;
    for (int step = 0; step < 3 && ok; ++step) {
      VertexId w;
      int wk;
      if (reverse_of(x, wrap(s - 1), w, wk)) {
        x = w;
        s = wk;
      } else {
        ok = false;
      }
    }
    if (ok) {
      link(v, k, x, wrap(s - 1));
      return true;
    }
    x = v;
    s = k;
    ok = true;
    for (int step = 0; step < 3 && ok; ++step) {
      VertexId w;
      int wk;
      if (reverse_of(x, wrap(s + 1), w, wk)) {
        x = w;
        s = wk;
      } else {
        ok = false;
      }
    }
    if (ok) {
      link(v, k, x, wrap(s + 1));
      return true;
    }
    return false;
  }
};

}  // namespace

TilingPatch build_patch(const SurfaceMap& quads, int radius) {
  require(radius >= 1, "patch radius must be at least 1");
  require(quads.vertex_count() == 2 && quads.closed_surface(),
          "patch needs a two-vertex quad system");
  int g = quads.genus();
  require(g >= 2, "patch growth needs genus >= 2");
  require(quads.edge_count() == 4 * g && quads.face_count() == 2 * g,
          "patch needs a system of quads");
  for (int w = 0; w < quads.walk_count(); ++w)
    require(quads.walk_darts(w).size() == 4, "patch: non-quad face");
  for (EdgeId e : quads.alive_edge_ids())
    require(quads.edge(e).tail == 0 && quads.edge(e).head == 1,
            "patch: quad system edges must run a to z");

  PatchBuilder b;
  b.deg = 4 * g;
  b.p.g = g;
  b.p.radius = radius;
  b.p.rot[0] = quads.rotation(0);
  b.p.rot[1] = quads.rotation(1);
  for (int c = 0; c < 2; ++c) {
    require(static_cast<int>(b.p.rot[c].size()) == b.deg,
            "patch: quad system vertex degree is not 4g");
    b.p.slot_by_dart[c].assign(2 * b.deg, -1);
    for (int s = 0; s < b.deg; ++s) b.p.slot_by_dart[c][b.p.rot[c][s]] = s;
  }
  for (int c = 0; c < 2; ++c) {
    b.p.ret_slot[c].resize(b.deg);
    for (int s = 0; s < b.deg; ++s) {
      int r = b.p.slot_by_dart[1 - c][rev(b.p.rot[c][s])];
      require(r >= 0, "patch: rotation tables disagree");
      b.p.ret_slot[c][s] = r;
    }
  }

  GrowthModel gm = growth_model(g);
  long long ball = gm.ball_size(radius);
  b.p.cls.reserve(ball);
  b.p.dist.reserve(ball);
  b.p.nbr.reserve(ball * b.deg);

  b.create(0, 0);
  long long layer_begin = 0, layer_end = 1;
  b.p.layer_count.assign(1, 1);
  for (int r = 0; r < radius; ++r) {
    for (VertexId v = static_cast<VertexId>(layer_begin);
         v < static_cast<VertexId>(layer_end); ++v) {
      for (int k = 0; k < b.deg; ++k) {
        if (b.p.nbr[b.slot(v, k)] >= 0) continue;
        if (b.try_close(v, k)) continue;
        VertexId w = b.create(1 - b.p.cls[v], static_cast<int16_t>(r + 1));
        b.link(v, k, w, b.p.ret_slot[b.p.cls[v]][k]);
      }
    }
    for (VertexId v = static_cast<VertexId>(layer_begin);
         v < static_cast<VertexId>(layer_end); ++v)
      for (int k = 0; k < b.deg; ++k)
        require(b.p.nbr[b.slot(v, k)] >= 0, "patch: interior vertex left open");
    layer_begin = layer_end;
    layer_end = static_cast<long long>(b.p.cls.size());
    b.p.layer_count.push_back(layer_end - layer_begin);
    require(layer_end - layer_begin == gm.layer_total(r + 1),
            "patch layer count deviates from the growth recurrence");
  }

  b.p.a_lift = 0;
  b.p.z_lift = b.p.nbr[0];
  return std::move(b.p);
}

TilingPatch build_patch(int g, int radius) {
  return build_patch(build_quads(canonical_system_of_loops(g)).quads, radius);
}

std::optional<VertexId> replay(const TilingPatch& patch, VertexId from,
                               std::span<const DartId> word) {
  VertexId v = from;
  for (DartId q : word) {
    require(q >= 0 && q < 8 * patch.g, "replay: label is not a dart of Q");
    int s = patch.slot_by_dart[patch.cls[v]][q];
    require(s >= 0, "replay: word is not a walk of Q from here");
    int32_t n = patch.neighbor(v, s);
    if (n < 0) return std::nullopt;
    v = n;
  }
  return v;
}

// -- free-group grammar -------------------------------------------------------

CnfGrammar free_group_grammar(int beta) {
  require(beta >= 1, "free group grammar needs beta >= 1");
  CnfGrammar g;
  g.nonterminal_count = 2 * beta + 1;
  g.start = 0;
  g.names.push_back("I");
  g.binary.push_back({0, 0, 0});
  for (int i = 1; i <= beta; ++i) {
    int A = 2 * i - 1, R = 2 * i;
    g.names.push_back("A" + std::to_string(i));
    g.names.push_back("A" + std::to_string(i) + "'");
    g.binary.push_back({0, A, R});
    g.binary.push_back({0, R, A});
    g.terminal.push_back({A, i});
    g.binary.push_back({A, A, 0});
    g.binary.push_back({A, 0, A});
    g.terminal.push_back({R, -i});
    g.binary.push_back({R, R, 0});
    g.binary.push_back({R, 0, R});
  }
  g.check();
  return g;
}

// -- labelings ----------------------------------------------------------------

Walk WordLabeling::project(const Walk& graph_walk) const {
  require(!graph_walk.darts.empty(), "projection needs a nonempty walk");
  std::vector<int> ds = graph_walk.darts;
  if (graph_walk.closed && leg[ds.front()].second != 0) {
    size_t cut = 0;
    while (cut < ds.size() && leg[ds[cut]].second != 0) ++cut;
    require(cut < ds.size(), "projection: closed walk never leaves a chain");
    std::rotate(ds.begin(), ds.begin() + cut, ds.end());
  }
  Walk out;
  out.closed = graph_walk.closed;
  size_t i = 0;
  while (i < ds.size()) {
    DartId d = leg[ds[i]].first;
    for (int j = 0; j < chain_len[d]; ++j, ++i)
      require(i < ds.size() && leg[ds[i]] == std::make_pair(d, j),
              "projection: chain traversed out of order");
    out.darts.push_back(d);
  }
  return out;
}

WordLabeling label_edges_free(const SurfaceMap& map, const ArcSystem& arcs) {
  require(static_cast<int>(arcs.sub.pieces.size()) == map.edge_slots(),
          "free labeling: arc system does not belong to this map");
  WordLabeling wl;
  wl.chain_len.assign(map.dart_slots(), 0);
  int extra = 0;
  for (EdgeId e : map.alive_edge_ids())
    for (DartId d : {forward_dart(e), reverse_dart(e)})
      if (map.dart_finite(d))
        extra += static_cast<int>(arcs.sub.lift(d).size()) - 1;
  wl.graph.vertices = map.vertex_count() + extra;
  int next = map.vertex_count();
  for (EdgeId e : map.alive_edge_ids())
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      if (!map.dart_finite(d)) continue;
      std::vector<DartId> pieces = arcs.sub.lift(d);
      int k = static_cast<int>(pieces.size());
      wl.chain_len[d] = k;
      VertexId from = map.tail_of(d);
      for (int j = 0; j < k; ++j) {
        VertexId to = j + 1 == k ? map.head_of(d) : next++;
        int letter = arcs.letter(pieces[j]);
        wl.graph.add(from, to, arcs.sub.map.dart_weight(pieces[j]),
                     letter == 0 ? kEpsilonLabel : letter);
        wl.leg.push_back({d, j});
        from = to;
      }
    }
  return wl;
}

WordLabeling label_edges_hyperbolic(const SurfaceMap& map,
                                    const QuadSystem& qs) {
  require(static_cast<int>(qs.label.size()) == map.dart_slots(),
          "quad labeling: quad system does not belong to this map");
  WordLabeling wl;
  wl.chain_len.assign(map.dart_slots(), 0);
  int extra = 0;
  for (EdgeId e : map.alive_edge_ids())
    for (DartId d : {forward_dart(e), reverse_dart(e)})
      if (map.dart_finite(d) && !qs.empty_label(d)) ++extra;
  wl.graph.vertices = map.vertex_count() + extra;
  int next = map.vertex_count();
  for (EdgeId e : map.alive_edge_ids())
    for (DartId d : {forward_dart(e), reverse_dart(e)}) {
      if (!map.dart_finite(d)) continue;
      double w = map.dart_weight(d);
      if (qs.empty_label(d)) {
        wl.chain_len[d] = 1;
        wl.graph.add(map.tail_of(d), map.head_of(d), w, kEpsilonLabel);
        wl.leg.push_back({d, 0});
      } else {
        wl.chain_len[d] = 2;
        VertexId mid = next++;
        wl.graph.add(map.tail_of(d), mid, w / 2, qs.label[d][0]);
        wl.leg.push_back({d, 0});
        wl.graph.add(mid, map.head_of(d), w / 2, qs.label[d][1]);
        wl.leg.push_back({d, 1});
      }
    }
  return wl;
}

// -- short-class grammar ------------------------------------------------------

namespace {

// A patch together with the dart relabeling that roots it at a or at z. The
// z-rooted patch is built over the root-swapped quad system, whose dart d
// plays the input system's dart d^1.
struct RootedPatch {
  TilingPatch patch;
  int flip = 0;

  int32_t step(VertexId v, DartId q) const {
    int s = patch.slot_by_dart[patch.cls[v]][q ^ flip];
    require(s >= 0, "short classes: letter does not start at this class");
    return patch.neighbor(v, s);
  }
  int vertex_class(VertexId v) const { return patch.cls[v] ^ flip; }
};

SurfaceMap swap_quad_roots(const SurfaceMap& quads) {
  std::vector<DartId> r0, r1;
  for (DartId d : quads.rotation(1)) r0.push_back(d ^ 1);
  for (DartId d : quads.rotation(0)) r1.push_back(d ^ 1);
  std::vector<EdgeRec> spokes(quads.edge_count(), EdgeRec{0, 1, 1.0, 1.0});
  return SurfaceMap::from_parts({std::move(r0), std::move(r1)},
                                std::move(spokes));
}

}  // namespace

CnfGrammar short_class_grammar(const SurfaceMap& quads, int rho) {
  require(rho >= 1, "short-class grammar needs rho >= 1");
  const int g = quads.genus();
  const int K = 2 * rho + 2;    // class radius
  const int R = 3 * (rho + 1);  // patch radius 3K/2: an unpruned replay of
                                // one class word from another class endpoint
                                // peaks at distance (K + K + K) / 2
  GrowthModel gm = growth_model(g);
  require(gm.ball_size(R) <= 20'000'000,
          "short-class grammar: patch for this rho does not fit in memory");
  const int nc = static_cast<int>(gm.ball_size(K));

  RootedPatch side[2];
  side[0] = {build_patch(quads, R), 0};
  side[1] = {build_patch(swap_quad_roots(quads), R), 1};
  const int deg = 4 * g;

  // Canonical-word tries: BFS trees of the two radius-K balls with children
  // in ascending dart order. FIFO discovery keeps queue order equal to the
  // lexicographic order of the canonical words, so each vertex's word is the
  // least shortest one. Vertices are created layer by layer, which makes ids
  // below nc exactly the radius-K ball.
  std::vector<std::vector<std::pair<DartId, int32_t>>> kid[2];
  for (int s = 0; s < 2; ++s) {
    kid[s].assign(nc, {});
    std::vector<char> seen(nc, 0);
    std::vector<int32_t> order = {0};
    seen[0] = 1;
    order.reserve(nc);
    for (size_t head = 0; head < order.size(); ++head) {
      int32_t v = order[head];
      if (side[s].patch.dist[v] == K) continue;
      for (DartId q = side[s].vertex_class(v) == 0 ? 0 : 1; q < 2 * deg;
           q += 2) {
        int32_t w = side[s].step(v, q);
        if (w < 0 || w >= nc || seen[w]) continue;
        seen[w] = 1;
        kid[s][v].push_back({q, w});
        order.push_back(w);
      }
    }
    require(static_cast<int>(order.size()) == nc,
            "short classes: ball is not connected");
  }

  CnfGrammar out;
  out.nonterminal_count = 2 * nc;
  out.start = 0;  // the identity class at a
  auto nt = [nc](int s, int32_t v) { return s * nc + v; };

  for (DartId q = 0; q < 2 * deg; ++q) {
    int s = q & 1;
    out.terminal.push_back({nt(s, side[s].step(0, q)), q});
  }

  // One production per valid composition: replay B's canonical word from A's
  // endpoint p and keep the results that land inside the ball. A subtree is
  // dead as soon as the position cannot return to the ball within the
  // letters a class word may still have.
  for (int sa = 0; sa < 2; ++sa) {
    const RootedPatch& A = side[sa];
    for (int32_t p = 0; p < nc; ++p) {
      int sb = A.vertex_class(p);
      const RootedPatch& B = side[sb];
      auto dfs = [&](auto&& self, int32_t tv, int32_t r, int depth) -> void {
        if (A.patch.dist[r] <= K)
          out.binary.push_back({nt(sa, r), nt(sa, p), nt(sb, tv)});
        for (auto [q, tc] : kid[sb][tv]) {
          int32_t r2 = A.step(r, q);
          if (r2 < 0) continue;
          if (A.patch.dist[r2] > 2 * K - (depth + 1)) continue;
          self(self, tc, r2, depth + 1);
        }
      };
      dfs(dfs, 0, p, 0);
    }
  }
  out.check();
  return out;
}

const CnfGrammar& build_hyperbolic_grammar(int g, long long L) {
  require(g >= 2, "hyperbolic grammar needs genus >= 2");
  int r = rho(L, g);
  static std::mutex mu;
  static std::map<std::pair<int, int>, CnfGrammar> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({g, r});
  if (it == cache.end()) {
    CnfGrammar built = short_class_grammar(
        build_quads(canonical_system_of_loops(g)).quads, r);
    it = cache.emplace(std::make_pair(g, r), std::move(built)).first;
  }
  return it->second;
}

// -- shortest contractible closed walks ---------------------------------------

namespace {

// Cheapest directed cycle through epsilon darts only; ties go to the lowest
// start vertex, then to scan order.
std::optional<std::pair<Walk, double>> shortest_epsilon_cycle(
    const LabeledGraph& lg) {
  std::vector<std::vector<int>> out(lg.vertices);
  for (size_t i = 0; i < lg.darts.size(); ++i)
    if (lg.darts[i].label == kEpsilonLabel)
      out[lg.darts[i].from].push_back(static_cast<int>(i));
  std::optional<std::pair<Walk, double>> best;
  std::vector<double> dist(lg.vertices);
  std::vector<int> par(lg.vertices);
  for (int s = 0; s < lg.vertices; ++s) {
    if (out[s].empty()) continue;
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(par.begin(), par.end(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [w, v] = pq.top();
      pq.pop();
      if (w > dist[v]) continue;
      for (int di : out[v]) {
        const LabeledGraph::Dart& dart = lg.darts[di];
        if (w + dart.w < dist[dart.to]) {
          dist[dart.to] = w + dart.w;
          par[dart.to] = di;
          pq.push({dist[dart.to], dart.to});
        }
      }
    }
    for (size_t i = 0; i < lg.darts.size(); ++i) {
      const LabeledGraph::Dart& dart = lg.darts[i];
      if (dart.label != kEpsilonLabel || dart.to != s) continue;
      if (!(dist[dart.from] < kInf)) continue;
      double total = dist[dart.from] + dart.w;
      if (best && total >= best->second) continue;
      Walk cyc;
      cyc.closed = true;
      cyc.darts.push_back(static_cast<int>(i));
      for (int v = dart.from; v != s; v = lg.darts[par[v]].from)
        cyc.darts.push_back(par[v]);
      std::reverse(cyc.darts.begin(), cyc.darts.end());
      best = {std::move(cyc), total};
    }
  }
  return best;
}

std::optional<std::pair<Walk, double>> best_projected(
    const SurfaceMap& map, const WordLabeling& wl,
    std::optional<std::pair<Walk, double>> generated) {
  auto eps = shortest_epsilon_cycle(wl.graph);
  if (eps && (!generated || eps->second <= generated->second))
    generated = std::move(eps);
  if (!generated) return std::nullopt;
  Walk w = wl.project(generated->first);
  require(w.closed && map.walk_ok(w),
          "contractible search: projection broke the walk");
  double total = map.walk_weight(w);
  return std::make_pair(std::move(w), total);
}

}  // namespace

std::optional<std::pair<Walk, double>> shortest_contractible_boundary(
    const SurfaceMap& map) {
  require(map.boundary_circles() > 0,
          "boundary search needs a surface with boundary");
  ArcSystem arcs = system_of_dual_arcs(map);
  WordLabeling wl = label_edges_free(map, arcs);
  std::optional<std::pair<Walk, double>> gen;
  if (arcs.beta() >= 1)
    gen = shortest_generated_closed_walk(wl.graph,
                                         free_group_grammar(arcs.beta()));
  return best_projected(map, wl, std::move(gen));
}

std::optional<std::pair<Walk, double>> shortest_contractible_hyperbolic(
    const SurfaceMap& map) {
  return shortest_contractible_hyperbolic(map, 2LL * map.edge_count());
}

std::optional<std::pair<Walk, double>> shortest_contractible_hyperbolic(
    const SurfaceMap& map, long long word_budget) {
  require(map.closed_surface() && map.genus() >= 2,
          "hyperbolic search needs a closed surface of genus >= 2");
  QuadSystem qs = build_quads(map);
  WordLabeling wl = label_edges_hyperbolic(map, qs);
  GrowthModel gm = growth_model(qs.g);

  double w_min = kInf;
  for (EdgeId e : map.alive_edge_ids())
    for (DartId d : {forward_dart(e), reverse_dart(e)})
      if (map.dart_finite(d)) w_min = std::min(w_min, map.dart_weight(d));
  bool can_certify = w_min > 0 && w_min < kInf;

  // Climb the grammar ladder instead of jumping to the rung the full budget
  // asks for. A rung-r grammar derives every closed-lift word of length up
  // to 4r+2 (its patch has complete adjacency through distance 3r+2), and a
  // candidate of weight W rules out all walks of more than W/w_min hops,
  // whose words exceed 2W/w_min letters. So once a rung's best candidate
  // certifies itself the climb stops, which keeps typical searches on the
  // small rungs; the expensive top rung runs only for uncertified answers.
  const int want = rho(word_budget, qs.g);
  std::optional<std::pair<Walk, double>> gen;
  for (int r = 1;; ++r) {
    if (gm.ball_size(3 * (r + 1)) > 20'000'000) {
      require(r > 1,
              "hyperbolic search: smallest grammar does not fit in memory");
      break;  // best effort: the mandated rung is out of reach on this host
    }
    CnfGrammar grammar = short_class_grammar(qs.quads, r);
    gen = shortest_generated_closed_walk(wl.graph, grammar);
    if (r >= want) break;
    auto eps = shortest_epsilon_cycle(wl.graph);
    double best = kInf;
    if (gen) best = gen->second;
    if (eps) best = std::min(best, eps->second);
    if (!can_certify || !(best < kInf)) continue;
    // Longest word a strictly better walk could have: fewer than
    // best / w_min hops, two letters per hop.
    long long rival = static_cast<long long>(std::ceil(2.0 * best / w_min)) - 1;
    if (rival < 1) break;
    if (rival <= 4 * r + 2 && rho(rival, qs.g) <= r) break;
  }
  return best_projected(map, wl, std::move(gen));
}

}  // namespace topowalk
