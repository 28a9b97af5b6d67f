#pragma once

#include <functional>
#include <vector>

#include "topowalk/surface_map.hpp"

namespace topowalk {

// Brute-force verifiers, independent of the detection algorithms. Everything
// here favours obviousness over speed and is meant for small maps.

// True iff the walk's signed edge multiplicities form the boundary of an
// integer face labeling that vanishes on boundary faces. Decided by an exact
// rational solve of the face-to-edge incidence system; the rational solution
// is rounded and re-verified, since the system only has integer solutions
// when it has any. Throws MapError if the walk is open or not on the map.
bool is_bounding(const SurfaceMap& map, const Walk& walk);

// True iff the walk is null-homotopic on the ambient surface. Closed walks on
// the sphere always are; on the torus homotopy agrees with homology; surfaces
// with boundary reduce to free reduction of a crossing word; closed surfaces
// of genus >= 2 lift the walk through the quad tiling of the universal cover
// and test whether the lift closes. Requires a cellular map away from the
// sphere/torus cases.
bool is_contractible(const SurfaceMap& map, const Walk& walk);

// Visits every closed walk of 1..max_hops traversable darts exactly once up
// to rotation, in increasing starting-dart order; each visited walk is the
// lexicographically least rotation of itself.
void enumerate_closed_walks(const SurfaceMap& map, int max_hops,
                            const std::function<void(const Walk&)>& visit);

std::vector<Walk> enumerate_closed_walks(const SurfaceMap& map, int max_hops);

}  // namespace topowalk
