#include "topowalk/random_maps.hpp"

#include <algorithm>

namespace topowalk {

SurfaceMap random_cellular_map(std::mt19937_64& rng,
                               const RandomMapOptions& opt) {
  const int V = 1 + rng_below(rng, opt.max_vertices);
  const int lo = std::max(opt.min_edges, V - 1);
  require(opt.max_edges >= lo, "edge budget cannot connect the vertices");
  const int E = lo + rng_below(rng, opt.max_edges - lo + 1);

  std::vector<EdgeRec> edges;
  auto add_edge = [&](int u, int v) {
    EdgeRec e;
    e.tail = u;
    e.head = v;
    if (opt.one_way) {
      e.w_fwd = 1;
      e.w_rev = kInf;
    } else if (opt.unit_weights) {
      e.w_fwd = e.w_rev = 1;
    } else {
      e.w_fwd = 1 + rng_below(rng, 4);
      e.w_rev = 1 + rng_below(rng, 4);
    }
    edges.push_back(e);
  };
  for (int v = 1; v < V; ++v) {
    int u = rng_below(rng, v);
    if (rng_below(rng, 2)) {
      add_edge(u, v);
    } else {
      add_edge(v, u);
    }
  }
  while (static_cast<int>(edges.size()) < E) {
    add_edge(rng_below(rng, V), rng_below(rng, V));
  }

  std::vector<std::vector<DartId>> rot(V);
  for (int e = 0; e < E; ++e) {
    rot[edges[e].tail].push_back(forward_dart(e));
    rot[edges[e].head].push_back(reverse_dart(e));
  }
  for (auto& r : rot) {
    for (size_t i = r.size(); i > 1; --i) {
      std::swap(r[i - 1], r[rng_below(rng, static_cast<int>(i))]);
    }
  }
  return SurfaceMap::from_parts(std::move(rot), std::move(edges));
}

std::vector<SurfaceMap> random_maps_of_genus(std::mt19937_64& rng, int genus,
                                             int count,
                                             const RandomMapOptions& opt) {
  std::vector<SurfaceMap> out;
  for (int attempts = 0; static_cast<int>(out.size()) < count; ++attempts) {
    require(attempts < 2000000, "genus rejection sampling did not converge");
    SurfaceMap m = random_cellular_map(rng, opt);
    if (m.genus() == genus) out.push_back(std::move(m));
  }
  return out;
}

SurfaceMap punch_holes(std::mt19937_64& rng, const SurfaceMap& map,
                       int holes) {
  require(map.boundary_circles() == 0, "punch_holes expects a closed map");
  require(map.face_count() >= holes, "not enough faces to punch");
  std::vector<FaceId> ids(map.face_count());
  for (int f = 0; f < map.face_count(); ++f) ids[f] = f;
  for (size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[rng_below(rng, static_cast<int>(i))]);
  }
  ids.resize(holes);
  std::vector<FaceSpec> specs;
  for (FaceId f = 0; f < map.face_count(); ++f) {
    const FaceRec& rec = map.face(f);
    int extra = std::count(ids.begin(), ids.end(), f) ? 1 : 0;
    specs.push_back({rec.walks, rec.extra_genus, rec.boundary_circles + extra});
  }
  SurfaceMap out = map.regrouped(std::move(specs));
  require(out.genus() == map.genus() && out.boundary_circles() == holes,
          "punch_holes bookkeeping failed");
  return out;
}

}  // namespace topowalk
