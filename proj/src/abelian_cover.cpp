#include "topowalk/abelian_cover.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace topowalk {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// One winding functional per leftover edge of a boundary-merged tree-cotree
// split. phi[d] counts signed crossings of dart d with the dual cut cycle of
// that leftover edge: the dual dart of the edge itself plus the dual forest
// path closing it up (running through the merged boundary node when the map
// has boundary). Each functional vanishes on every internal face boundary,
// on the primal tree and on the other leftover edges, and every value is
// -1, 0 or 1, so an h-hop walk changes each winding coordinate by at most h.
std::vector<std::vector<int>> winding_shifts(const SurfaceMap& map) {
  TreeCotree tc = tree_cotree(map);
  std::vector<char> in_tree(map.edge_slots(), 0);
  for (EdgeId e : tc.tree) in_tree[e] = 1;

  int faces = map.face_count();
  int root = faces;  // stands for all boundary faces at once
  Dsu dsu(faces + 1);
  std::vector<std::vector<std::pair<int, EdgeId>>> adj(faces + 1);
  for (FaceId f = 0; f < faces; ++f) {
    if (!map.face(f).is_boundary()) continue;
    dsu.unite(root, f);
    adj[root].push_back({f, -1});
    adj[f].push_back({root, -1});
  }

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

  std::vector<int> parent(faces + 1, -1), depth(faces + 1, -1);
  std::vector<EdgeId> pedge(faces + 1, -1);
  std::queue<int> queue;
  int start = adj[root].empty() ? 0 : root;
  depth[start] = 0;
  queue.push(start);
  while (!queue.empty()) {
    int f = queue.front();
    queue.pop();
    for (auto [g, e] : adj[f]) {
      if (depth[g] >= 0) continue;
      depth[g] = depth[f] + 1;
      parent[g] = f;
      pedge[g] = e;
      queue.push(g);
    }
  }
  for (FaceId f = 0; f < faces; ++f)
    require(depth[f] >= 0, "winding_shifts: dual forest does not span");

  std::vector<std::vector<int>> shifts;
  for (EdgeId x : leftover) {
    std::vector<int> phi(map.dart_slots(), 0);
    auto use = [&](DartId d) {
      phi[d] += 1;
      phi[rev(d)] -= 1;
    };
    auto step = [&](int from, int to, EdgeId e) {
      if (e < 0) return;  // hop through the merged boundary node
      DartId d = forward_dart(e);
      if (map.left_face(d) == from) {
        require(map.right_face(d) == to, "winding_shifts: bad forest step");
        use(d);
      } else {
        require(map.right_face(d) == from && map.left_face(d) == to,
                "winding_shifts: bad forest step");
        use(rev(d));
      }
    };
    use(forward_dart(x));
    int a = map.right_face(forward_dart(x));
    int b = map.left_face(forward_dart(x));
    while (a != b) {
      if (depth[a] >= depth[b]) {
        step(a, parent[a], pedge[a]);
        a = parent[a];
      } else {
        step(parent[b], b, pedge[b]);
        b = parent[b];
      }
    }
    for (int value : phi)
      require(value >= -1 && value <= 1, "winding_shifts: crossing overflow");
    for (FaceId f = 0; f < faces; ++f) {
      if (map.face(f).is_boundary()) continue;
      int total = 0;
      for (int fw : map.face(f).walks)
        for (DartId d : map.walk_darts(fw)) total += phi[d];
      require(total == 0, "winding_shifts: not a cocycle");
    }
    for (EdgeId y : leftover)
      require(phi[forward_dart(y)] == (y == x ? 1 : 0),
              "winding_shifts: leftover edges not independent");
    shifts.push_back(std::move(phi));
  }
  return shifts;
}

CoverRegion assemble(const SurfaceMap& map, int hop_budget,
                     std::vector<std::vector<int>> shifts) {
  for (EdgeId e : map.alive_edge_ids())
    for (DartId d : {forward_dart(e), reverse_dart(e)})
      require(map.dart_weight(d) >= 0, "cover region: negative dart weight");

  CoverRegion region;
  region.dims = static_cast<int>(shifts.size());
  region.radius = hop_budget;
  region.base_vertices = map.vertex_count();
  region.shift = std::move(shifts);
  region.out.assign(region.vertex_count(), {});

  int axis = region.axis();
  std::vector<EdgeId> alive = map.alive_edge_ids();
  for (int c = 0; c < region.copies(); ++c) {
    int cx = c % axis - hop_budget;
    int cy = region.dims == 2 ? c / axis - hop_budget : 0;
    for (EdgeId e : alive) {
      for (DartId d : {forward_dart(e), reverse_dart(e)}) {
        if (!map.dart_finite(d)) continue;
        int nx = cx + region.shift[0][d];
        int ny = region.dims == 2 ? cy + region.shift[1][d] : 0;
        if (std::abs(nx) > hop_budget || std::abs(ny) > hop_budget) continue;
        int nc = region.dims == 2 ? (ny + hop_budget) * axis + nx + hop_budget
                                  : nx + hop_budget;
        CoverRegion::LiftedDart lifted;
        lifted.from = region.lifted_vertex(c, map.tail_of(d));
        lifted.to = region.lifted_vertex(nc, map.head_of(d));
        lifted.base = d;
        lifted.w = map.dart_weight(d);
        region.out[lifted.from].push_back(static_cast<int>(region.darts.size()));
        region.darts.push_back(lifted);
      }
    }
  }
  return region;
}

}  // namespace

Walk CoverRegion::project_walk(const std::vector<int>& lifted) const {
  Walk w;
  w.darts.reserve(lifted.size());
  for (int k : lifted) w.darts.push_back(darts[k].base);
  w.closed = !lifted.empty() &&
             darts[lifted.front()].from == darts[lifted.back()].to;
  return w;
}

std::optional<std::vector<int>> CoverRegion::lift_walk(const Walk& w,
                                                       int from) const {
  std::vector<int> lifted;
  lifted.reserve(w.darts.size());
  int cur = from;
  for (DartId d : w.darts) {
    int found = -1;
    for (int k : out[cur])
      if (darts[k].base == d) {
        found = k;
        break;
      }
    if (found < 0) return std::nullopt;
    lifted.push_back(found);
    cur = darts[found].to;
  }
  return lifted;
}

CoverRegion build_annulus_region(const SurfaceMap& map, int hop_budget) {
  require(map.genus() == 0 && map.boundary_circles() == 2,
          "build_annulus_region: map is not an annulus");
  require(hop_budget >= 0, "build_annulus_region: negative hop budget");
  std::vector<std::vector<int>> shifts = winding_shifts(map);
  require(shifts.size() <= 1, "build_annulus_region: winding rank too high");
  if (shifts.empty())  // graph carries no winding; all cycles contract
    shifts.assign(1, std::vector<int>(map.dart_slots(), 0));
  return assemble(map, hop_budget, std::move(shifts));
}

CoverRegion build_torus_region(const SurfaceMap& map, int hop_budget) {
  require(map.genus() == 1 && map.closed_surface() && map.cellular(),
          "build_torus_region: map is not a cellular torus");
  require(hop_budget >= 0, "build_torus_region: negative hop budget");
  std::vector<std::vector<int>> shifts = winding_shifts(map);
  require(shifts.size() == 2, "build_torus_region: winding rank broke");
  return assemble(map, hop_budget, std::move(shifts));
}

std::optional<std::pair<std::vector<int>, double>> shortest_region_cycle(
    const CoverRegion& region, int copy) {
  require(copy >= 0 && copy < region.copies(),
          "shortest_region_cycle: copy out of range");
  const double inf = std::numeric_limits<double>::infinity();
  std::optional<std::pair<std::vector<int>, double>> best;
  std::vector<double> dist(region.vertex_count());
  std::vector<int> par(region.vertex_count());
  for (VertexId v = 0; v < region.base_vertices; ++v) {
    int s = region.lifted_vertex(copy, v);
    if (region.out[s].empty()) continue;
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(par.begin(), par.end(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[s] = 0;
    heap.push({0, s});
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      for (int k : region.out[u]) {
        const CoverRegion::LiftedDart& ld = region.darts[k];
        double cand = du + ld.w;
        if (cand < dist[ld.to]) {
          dist[ld.to] = cand;
          par[ld.to] = k;
          heap.push({cand, ld.to});
        }
      }
    }
    for (size_t k = 0; k < region.darts.size(); ++k) {
      const CoverRegion::LiftedDart& ld = region.darts[k];
      if (ld.to != s || dist[ld.from] == inf) continue;
      double len = dist[ld.from] + ld.w;
      if (best && len >= best->second) continue;
      std::vector<int> cycle;
      for (int u = ld.from; u != s; u = region.darts[par[u]].from)
        cycle.push_back(par[u]);
      std::reverse(cycle.begin(), cycle.end());
      cycle.push_back(static_cast<int>(k));
      best = {std::move(cycle), len};
    }
  }
  return best;
}

std::optional<std::pair<Walk, double>> shortest_contractible_abelian(
    const SurfaceMap& map) {
  int budget = map.edge_count();
  CoverRegion region;
  if (map.genus() == 0 && map.boundary_circles() == 2)
    region = build_annulus_region(map, budget);
  else if (map.genus() == 1 && map.closed_surface())
    region = build_torus_region(map, budget);
  else
    throw MapError(
        "shortest_contractible_abelian: map is not an annulus or a torus");
  auto cycle = shortest_region_cycle(region, region.center_copy());
  if (!cycle) return std::nullopt;
  Walk w = region.project_walk(cycle->first);
  require(w.closed && map.walk_ok(w),
          "shortest_contractible_abelian: projection broke");
  return std::make_pair(std::move(w), cycle->second);
}

}  // namespace topowalk
