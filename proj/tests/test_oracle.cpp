#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "topowalk/oracle.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "topowalk/homology.hpp"
#include "topowalk/random_maps.hpp"
#include "topowalk/word_grammars.hpp"

using namespace topowalk;
using namespace topowalk::fixtures;

namespace {

EdgeRec one_way(VertexId tail, VertexId head) {
  EdgeRec e;
  e.tail = tail;
  e.head = head;
  e.w_fwd = 1.0;
  e.w_rev = kInf;
  return e;
}

SurfaceMap one_way_digon() {
  return SurfaceMap::from_parts({{0, 3}, {2, 1}},
                                {one_way(0, 1), one_way(1, 0)});
}

SurfaceMap one_way_triangle() {
  return SurfaceMap::from_parts({{0, 5}, {2, 1}, {4, 3}},
                                {one_way(0, 1), one_way(1, 2), one_way(2, 0)});
}

SurfaceMap one_way_torus() {
  return SurfaceMap::from_parts({{0, 2, 1, 3}}, {one_way(0, 0), one_way(0, 0)});
}

// Torus grid with a contractible one-way monogon at each vertex.
SurfaceMap cascade_map() {
  return SurfaceMap::from_parts(
      {{0, 4, 3, 5, 9, 8}, {2, 6, 1, 7, 11, 10}},
      {one_way(0, 1), one_way(1, 0), one_way(0, 0), one_way(1, 1),
       one_way(0, 0), one_way(1, 1)});
}

Walk rotated(const Walk& w, int by) {
  Walk out = w;
  std::rotate(out.darts.begin(), out.darts.begin() + by, out.darts.end());
  return out;
}

}  // namespace

TEST_CASE("is_bounding on the one-vertex torus") {
  SurfaceMap m = one_vertex_torus_map();
  CHECK(!is_bounding(m, Walk{{0}}));
  CHECK(!is_bounding(m, Walk{{2}}));
  CHECK(!is_bounding(m, Walk{{0, 2}}));
  CHECK(is_bounding(m, Walk{{0, 1}}));           // out and back
  CHECK(is_bounding(m, Walk{{0, 3, 1, 2}}));     // commutator
  CHECK(is_bounding(m, Walk{{0, 2, 1, 3}}));
}

TEST_CASE("is_bounding matches zero net crossings on the sphere") {
  for (const SurfaceMap& m : {tetrahedron_map(), nested_triangles_sphere_map()})
    for (const Walk& w : enumerate_closed_walks(m, 3))
      CHECK(is_bounding(m, w));  // sphere: every cycle separates
}

TEST_CASE("is_bounding rejects bad walks") {
  SurfaceMap m = one_vertex_torus_map();
  Walk open{{0}, false};
  CHECK_THROWS_AS(is_bounding(m, open), MapError);
  CHECK_THROWS_AS(is_bounding(m, Walk{{}}), MapError);
  CHECK_THROWS_AS(is_bounding(tetrahedron_map(), Walk{{0, 5}}), MapError);
}

TEST_CASE("is_bounding respects boundary pinning") {
  // the annulus core circles both faces, one of which is boundary
  SurfaceMap m = loop_annulus_map();
  CHECK(!is_bounding(m, Walk{{0}}));
  CHECK(is_bounding(m, Walk{{0, 1}}));

  SurfaceMap disk = loop_disk_map();
  CHECK(is_bounding(disk, Walk{{0}}));  // bounds the disk side
  CHECK(is_bounding(disk, Walk{{1}}));
}

TEST_CASE("is_contractible on sphere and disk") {
  SurfaceMap sphere = tetrahedron_map();
  for (const Walk& w : enumerate_closed_walks(sphere, 3))
    CHECK(is_contractible(sphere, w));

  SurfaceMap disk = loop_disk_map();
  CHECK(is_contractible(disk, Walk{{0}}));
  CHECK(is_contractible(disk, Walk{{1}}));
}

TEST_CASE("is_contractible on the annulus") {
  SurfaceMap m = loop_annulus_map();
  CHECK(!is_contractible(m, Walk{{0}}));
  CHECK(!is_contractible(m, Walk{{0, 0}}));
  CHECK(is_contractible(m, Walk{{0, 1}}));
}

TEST_CASE("is_contractible equals is_bounding on the torus") {
  SurfaceMap m = one_vertex_torus_map();
  CHECK(!is_contractible(m, Walk{{0}}));
  CHECK(is_contractible(m, Walk{{0, 3, 1, 2}}));
  for (const Walk& w : enumerate_closed_walks(m, 4))
    CHECK(is_contractible(m, w) == is_bounding(m, w));

  SurfaceMap cascade = cascade_map();
  CHECK(is_contractible(cascade, Walk{{8}}));
  CHECK(is_bounding(cascade, Walk{{8}}));
  CHECK(!is_contractible(cascade, Walk{{0, 2}}));
  CHECK(!is_bounding(cascade, Walk{{0, 2}}));
}

TEST_CASE("genus two splits homology from homotopy") {
  SurfaceMap m = canonical_system_of_loops(2);

  // one handle's commutator bounds but does not contract
  Walk commutator{{0, 2, 1, 3}};
  CHECK(is_bounding(m, commutator));
  CHECK(!is_contractible(m, commutator));

  // the full relator is the boundary of the single face
  Walk relator{m.walk_darts(0)};
  REQUIRE(relator.darts.size() == 8);
  CHECK(is_bounding(m, relator));
  CHECK(is_contractible(m, relator));

  CHECK(!is_contractible(m, Walk{{0}}));
  CHECK(!is_contractible(m, Walk{{0, 4}}));
  CHECK(is_contractible(m, Walk{{0, 1}}));
  CHECK(is_contractible(m, Walk{{4, 0, 1, 5}}));
}

TEST_CASE("oracle answers are rotation invariant") {
  SurfaceMap m = canonical_system_of_loops(2);
  Walk relator{m.walk_darts(0)};
  Walk commutator{{0, 2, 1, 3}};
  for (int r = 1; r < 8; ++r)
    CHECK(is_contractible(m, rotated(relator, r)));
  for (int r = 1; r < 4; ++r) {
    CHECK(!is_contractible(m, rotated(commutator, r)));
    CHECK(is_bounding(m, rotated(commutator, r)));
  }

  SurfaceMap torus = one_vertex_torus_map();
  for (const Walk& w : enumerate_closed_walks(torus, 4)) {
    bool c = is_contractible(torus, w);
    bool b = is_bounding(torus, w);
    for (int r = 1; r < static_cast<int>(w.darts.size()); ++r) {
      CHECK(is_contractible(torus, rotated(w, r)) == c);
      CHECK(is_bounding(torus, rotated(w, r)) == b);
    }
  }
}

TEST_CASE("contractible concatenations stay contractible") {
  SurfaceMap m = canonical_system_of_loops(2);
  Walk commutator{{0, 2, 1, 3}};
  Walk back{{2, 0, 3, 1}};  // the commutator walked backwards

  Walk cancel = commutator;
  cancel.darts.insert(cancel.darts.end(), back.darts.begin(),
                      back.darts.end());
  CHECK(is_contractible(m, cancel));

  Walk padded{{4, 5}};  // trivial out-and-back, then the commutator
  padded.darts.insert(padded.darts.end(), commutator.darts.begin(),
                      commutator.darts.end());
  CHECK(!is_contractible(m, padded));
  CHECK(is_bounding(m, padded));
}

TEST_CASE("enumerate_closed_walks counts small maps") {
  CHECK(enumerate_closed_walks(one_way_digon(), 4).size() == 2);
  CHECK(enumerate_closed_walks(one_way_triangle(), 3).size() == 1);
  CHECK(enumerate_closed_walks(tetrahedron_map(), 2).size() == 6);
  CHECK(enumerate_closed_walks(tetrahedron_map(), 3).size() == 14);
  CHECK(enumerate_closed_walks(one_way_torus(), 4).size() == 15);
  CHECK_THROWS_AS(enumerate_closed_walks(one_way_digon(), 0), MapError);
}

TEST_CASE("enumerated walks are canonical rotations, visited once") {
  SurfaceMap m = one_vertex_torus_map();
  auto walks = enumerate_closed_walks(m, 4);
  std::set<std::vector<DartId>> seen;
  for (const Walk& w : walks) {
    CHECK(m.walk_ok(w));
    CHECK(w.closed);
    // lexicographically least among its rotations
    for (int r = 1; r < static_cast<int>(w.darts.size()); ++r)
      CHECK(!(rotated(w, r).darts < w.darts));
    CHECK(!seen.count(w.darts));
    seen.insert(w.darts);
  }
}

TEST_CASE("detectors agree with the oracle on random one-way maps") {
  std::mt19937_64 rng(5);
  RandomMapOptions opt;
  opt.max_vertices = 3;
  opt.max_edges = 5;
  opt.one_way = true;
  for (int i = 0; i < 40; ++i) {
    SurfaceMap m = random_cellular_map(rng, opt);

    auto cyc = detect_simple_contractible_cycle(m);
    if (cyc) CHECK(is_contractible(m, *cyc));

    auto walk = detect_contractible_walk(m);
    if (walk) {
      CHECK(is_contractible(m, *walk));
    } else {
      for (const Walk& w : enumerate_closed_walks(m, 4))
        CHECK(!is_contractible(m, w));
    }

    auto bounding = detect_bounding_walk(m);
    if (bounding) CHECK(is_bounding(m, bounding->walk()));
  }
}

TEST_CASE("contractible walks always bound") {
  std::mt19937_64 rng(9);
  RandomMapOptions opt;
  opt.max_vertices = 3;
  opt.max_edges = 6;
  for (int i = 0; i < 25; ++i) {
    SurfaceMap m = random_cellular_map(rng, opt);
    for (const Walk& w : enumerate_closed_walks(m, 4))
      if (is_contractible(m, w)) CHECK(is_bounding(m, w));
  }
}
