#pragma once

#include <random>
#include <vector>

#include "topowalk/surface_map.hpp"

namespace topowalk {

struct RandomMapOptions {
  int max_vertices = 4;
  int min_edges = 1;
  int max_edges = 6;
  bool one_way = false;       // w+ = 1, w- = inf on every edge
  bool unit_weights = true;   // false: integer weights in 1..4
};

// Random connected multigraph (loops and parallel edges allowed) with a
// random rotation system; every face is a disk, so the result is the closed
// cellular surface determined by the rotation system.
SurfaceMap random_cellular_map(std::mt19937_64& rng,
                               const RandomMapOptions& opt);

// Rejection-samples closed cellular maps of the requested genus.
std::vector<SurfaceMap> random_maps_of_genus(std::mt19937_64& rng, int genus,
                                             int count,
                                             const RandomMapOptions& opt);

// Declares `holes` randomly chosen disk faces of a closed map as boundary
// faces (one surface boundary circle inside each), leaving the genus alone:
// sphere + 2 holes = annulus, sphere + 3 = pair of pants, torus + 1 = (1,1).
SurfaceMap punch_holes(std::mt19937_64& rng, const SurfaceMap& map, int holes);

// Uniform integer in [0, n), stable across platforms for a fixed seed.
inline int rng_below(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<unsigned long long>(n));
}

}  // namespace topowalk
