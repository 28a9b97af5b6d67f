#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "topowalk/word_grammars.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "support/fixtures.hpp"
#include "topowalk/oracle.hpp"
#include "topowalk/random_maps.hpp"

using namespace topowalk;
using namespace topowalk::fixtures;

namespace {

EdgeRec sym(VertexId tail, VertexId head) {
  EdgeRec e;
  e.tail = tail;
  e.head = head;
  e.w_fwd = 1.0;
  e.w_rev = 1.0;
  return e;
}

EdgeRec one_way(VertexId tail, VertexId head) {
  EdgeRec e;
  e.tail = tail;
  e.head = head;
  e.w_fwd = 1.0;
  e.w_rev = kInf;
  return e;
}

bool reduces_to_identity(const std::vector<int>& word) {
  std::vector<int> stack;
  for (int x : word) {
    if (!stack.empty() && stack.back() == -x) {
      stack.pop_back();
    } else {
      stack.push_back(x);
    }
  }
  return stack.empty();
}

struct BruteBest {
  double weight = 0.0;
  int hops = 0;  // fewest hops among minimum-weight walks
};

std::optional<BruteBest> brute_force_min(const SurfaceMap& map, int max_hops) {
  std::optional<BruteBest> best;
  enumerate_closed_walks(map, max_hops, [&](const Walk& w) {
    if (!is_contractible(map, w)) return;
    double total = map.walk_weight(w);
    if (!best || total < best->weight) {
      best = BruteBest{total, w.hops()};
    } else if (total == best->weight) {
      best->hops = std::min(best->hops, w.hops());
    }
  });
  return best;
}

// All words the grammar generates with length <= max_len, via a bottom-up
// table indexed by (length, nonterminal). Cheap as long as the language
// restricted to short lengths stays small.
std::set<std::vector<int>> derivable_words(const CnfGrammar& g, int max_len) {
  std::vector<std::vector<std::set<std::vector<int>>>> words(
      max_len + 1, std::vector<std::set<std::vector<int>>>(g.nonterminal_count));
  for (const auto& t : g.terminal) words[1][t.lhs].insert({t.label});
  for (int len = 2; len <= max_len; ++len) {
    for (const auto& b : g.binary) {
      for (int k = 1; k < len; ++k) {
        const auto& lhs_words = words[k][b.left];
        const auto& rhs_words = words[len - k][b.right];
        if (lhs_words.empty() || rhs_words.empty()) continue;
        for (const auto& u : lhs_words) {
          for (const auto& v : rhs_words) {
            std::vector<int> w = u;
            w.insert(w.end(), v.begin(), v.end());
            words[len][b.lhs].insert(std::move(w));
          }
        }
      }
    }
  }
  std::set<std::vector<int>> out;
  for (int len = 1; len <= max_len; ++len) {
    out.insert(words[len][g.start].begin(), words[len][g.start].end());
  }
  return out;
}

// Three parallel edges u -> v; faces are the three digons between
// rotation-consecutive edges. Punching two of them leaves an annulus whose
// only intact face is the digon bounded by edges 0 and 1.
SurfaceMap theta_annulus() {
  std::vector<EdgeRec> edges = {sym(0, 1), sym(0, 1), sym(0, 1)};
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), forward_dart(1), forward_dart(2)},
      {reverse_dart(2), reverse_dart(1), reverse_dart(0)}};
  std::vector<FaceSpec> specs = {{{0}, 0, 1}, {{2}, 0, 1}};
  return SurfaceMap::from_parts(rot, edges, specs);
}

SurfaceMap one_way_core_annulus() {
  std::vector<FaceSpec> specs = {{{0}, 0, 1}, {{1}, 0, 1}};
  return SurfaceMap::from_parts({{0, 1}}, {one_way(0, 0)}, specs);
}

// Canonical genus-2 gluing with a fifth loop inserted parallel to loop 0,
// creating one digon face next to the single big face.
SurfaceMap genus2_with_digon() {
  std::vector<EdgeRec> edges(5, sym(0, 0));
  std::vector<std::vector<DartId>> rot = {
      {forward_dart(0), forward_dart(4), forward_dart(1), reverse_dart(4),
       reverse_dart(0), reverse_dart(1), forward_dart(2), forward_dart(3),
       reverse_dart(2), reverse_dart(3)}};
  return SurfaceMap::from_parts(rot, edges);
}

SurfaceMap one_way_genus2() {
  std::vector<EdgeRec> edges(4, one_way(0, 0));
  return SurfaceMap::from_parts({{0, 2, 1, 3, 4, 6, 5, 7}}, edges);
}

void check_candidate(const SurfaceMap& map,
                     const std::optional<std::pair<Walk, double>>& got) {
  REQUIRE(got.has_value());
  CHECK(got->first.closed);
  CHECK(map.walk_ok(got->first));
  CHECK(is_contractible(map, got->first));
  CHECK(map.walk_weight(got->first) == got->second);
}

}  // namespace

TEST_CASE("free group grammar has the documented size and language") {
  for (int beta = 1; beta <= 5; ++beta) {
    CnfGrammar g = free_group_grammar(beta);
    CHECK(g.nonterminal_count == 2 * beta + 1);
    CHECK(g.terminal.size() == static_cast<size_t>(2 * beta));
    CHECK(g.binary.size() == static_cast<size_t>(6 * beta + 1));
    CHECK(g.start == 0);
  }

  CnfGrammar g2 = free_group_grammar(2);
  CHECK(cyk_accepts(g2, {1, -1}));
  CHECK(cyk_accepts(g2, {-2, 2}));
  CHECK(cyk_accepts(g2, {1, 2, -2, -1}));
  CHECK(cyk_accepts(g2, {2, -2, 1, -1}));
  CHECK(!cyk_accepts(g2, {1, 1}));
  CHECK(!cyk_accepts(g2, {1, -1, 1}));
  CHECK(!cyk_accepts(g2, {1, -2}));
  CHECK(!cyk_accepts(g2, {3, -3}));

  // Exhaustive agreement with free reduction on short words over one letter.
  std::set<std::vector<int>> expected;
  std::vector<int> cur;
  auto walk_all = [&](auto&& self, int len) -> void {
    if (len > 0 && reduces_to_identity(cur)) expected.insert(cur);
    if (len == 4) return;
    for (int x : {1, -1}) {
      cur.push_back(x);
      self(self, len + 1);
      cur.pop_back();
    }
  };
  walk_all(walk_all, 0);
  CHECK(derivable_words(free_group_grammar(1), 4) == expected);

  CHECK_THROWS_AS(free_group_grammar(0), MapError);
}

TEST_CASE("arc labeling spells the same words as the arc system") {
  std::mt19937_64 rng(411);
  RandomMapOptions opt;
  opt.max_vertices = 3;
  opt.min_edges = 2;
  opt.max_edges = 5;
  int done = 0;
  for (int rep = 0; rep < 200 && done < 8; ++rep) {
    SurfaceMap closed = random_maps_of_genus(rng, 0, 1, opt)[0];
    if (closed.face_count() < 2) continue;
    SurfaceMap map = punch_holes(rng, closed, 2);
    ++done;

    ArcSystem arcs = system_of_dual_arcs(map);
    WordLabeling wl = label_edges_free(map, arcs);
    CHECK(wl.chain_len.size() == map.dart_slots());

    for (EdgeId e : map.alive_edge_ids()) {
      for (DartId d : {forward_dart(e), reverse_dart(e)}) {
        if (!map.dart_finite(d)) {
          CHECK(wl.chain_len[d] == 0);
          continue;
        }
        Walk one;
        one.darts = {d};
        one.closed = false;
        std::vector<int> want = arcs.word(one);
        std::vector<int> got;
        double chain_weight = 0.0;
        int seen = 0;
        for (size_t gd = 0; gd < wl.graph.darts.size(); ++gd) {
          if (wl.leg[gd].first != d) continue;
          CHECK(wl.leg[gd].second == seen);
          ++seen;
          chain_weight += wl.graph.darts[gd].w;
          if (wl.graph.darts[gd].label != kEpsilonLabel) {
            got.push_back(wl.graph.darts[gd].label);
          }
        }
        CHECK(seen == wl.chain_len[d]);
        CHECK(seen >= 1);
        CHECK(got == want);
        CHECK(chain_weight == doctest::Approx(map.dart_weight(d)));
      }
    }

    // Word trivial in the free group exactly when the walk contracts.
    for (const Walk& w : enumerate_closed_walks(map, 4)) {
      CHECK(reduces_to_identity(arcs.word(w)) == is_contractible(map, w));
    }
  }
  CHECK(done == 8);
}

TEST_CASE("boundary search matches brute force on fixtures") {
  SurfaceMap theta = theta_annulus();
  REQUIRE(theta.genus() == 0);
  REQUIRE(theta.boundary_circles() == 2);
  auto got = shortest_contractible_boundary(theta);
  check_candidate(theta, got);
  CHECK(got->second == 2.0);

  SurfaceMap loop = loop_annulus_map();
  auto got_loop = shortest_contractible_boundary(loop);
  check_candidate(loop, got_loop);
  CHECK(got_loop->second == brute_force_min(loop, 4)->weight);

  CHECK(!shortest_contractible_boundary(one_way_core_annulus()).has_value());

  // A disk has a trivial fundamental group, so every closed walk counts and
  // the search reduces to the epsilon-only cycle hunt.
  std::mt19937_64 rng(7);
  SurfaceMap disk = punch_holes(rng, triangle_sphere_map(), 1);
  REQUIRE(disk.genus() == 0);
  REQUIRE(disk.boundary_circles() == 1);
  auto got_disk = shortest_contractible_boundary(disk);
  check_candidate(disk, got_disk);
  CHECK(got_disk->second == 3.0);

  CHECK_THROWS_AS(shortest_contractible_boundary(one_vertex_torus_map()),
                  MapError);
}

TEST_CASE("boundary search equals brute force on random maps") {
  std::mt19937_64 rng(8801);
  RandomMapOptions opt;
  opt.max_vertices = 3;
  opt.min_edges = 2;
  opt.max_edges = 5;
  const std::vector<std::pair<int, int>> shapes = {{0, 2}, {0, 3}, {1, 1}};
  int done = 0;
  for (int rep = 0; rep < 500 && done < 36; ++rep) {
    auto [genus, holes] = shapes[rep % shapes.size()];
    SurfaceMap closed = random_maps_of_genus(rng, genus, 1, opt)[0];
    if (closed.face_count() < holes) continue;
    SurfaceMap map = punch_holes(rng, closed, holes);
    ++done;

    auto got = shortest_contractible_boundary(map);
    auto want = brute_force_min(map, map.edge_count());
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      check_candidate(map, got);
      CHECK(got->second == want->weight);
    }
  }
  CHECK(done == 36);
}

TEST_CASE("hyperbolic word labeling splits every dart in two") {
  SurfaceMap map = canonical_system_of_loops(2);
  QuadSystem qs = build_quads(map);
  WordLabeling wl = label_edges_hyperbolic(map, qs);

  CHECK(wl.graph.vertices == map.vertex_count() + map.dart_slots());
  CHECK(wl.graph.darts.size() == 2 * map.dart_slots());

  std::set<int> mids;
  for (DartId d = 0; d < map.dart_slots(); ++d) {
    CHECK(wl.chain_len[d] == 2);
    std::vector<size_t> legs;
    for (size_t gd = 0; gd < wl.graph.darts.size(); ++gd) {
      if (wl.leg[gd].first == d) legs.push_back(gd);
    }
    REQUIRE(legs.size() == 2);
    const auto& first = wl.graph.darts[legs[0]];
    const auto& second = wl.graph.darts[legs[1]];
    CHECK(first.from == map.tail_of(d));
    CHECK(second.to == map.head_of(d));
    CHECK(first.to == second.from);
    CHECK(first.to >= map.vertex_count());
    mids.insert(first.to);
    CHECK(first.label == qs.label[d][0]);
    CHECK(second.label == qs.label[d][1]);
    CHECK(first.w + second.w == doctest::Approx(map.dart_weight(d)));
  }
  // Direction-specific interior vertices: no two chains share one, so a walk
  // can never turn around in the middle of an edge.
  CHECK(mids.size() == map.dart_slots());
}

TEST_CASE("short class grammar generates exactly the closed tile walks") {
  const CnfGrammar& g = build_hyperbolic_grammar(2, 4);
  CHECK(&g == &build_hyperbolic_grammar(2, 2));  // same rho, cached

  GrowthModel gm = growth_model(2);
  REQUIRE(rho(4, 2) == 1);
  CHECK(gm.ball_size(4) == 1969);
  CHECK(g.nonterminal_count == 2 * gm.ball_size(4));
  CHECK(g.start == 0);
  REQUIRE(g.terminal.size() == 16);
  std::set<int> letters;
  for (const auto& t : g.terminal) letters.insert(t.label);
  CHECK(letters.size() == 16);
  CHECK(*letters.begin() == 0);
  CHECK(*letters.rbegin() == 15);

  CHECK(cyk_accepts(g, {0, 1}));
  CHECK(!cyk_accepts(g, {0, 3}));

  // Ground truth: walk words in the tiling that lift closed at the root.
  TilingPatch patch = build_patch(2, 4);
  std::set<std::vector<int>> closed_words;
  std::vector<int> word;
  auto extend = [&](auto&& self, VertexId at) -> void {
    if (!word.empty() && at == patch.a_lift) closed_words.insert(word);
    if (word.size() == 4) return;
    DartId start = patch.cls[at] == 0 ? 0 : 1;
    for (DartId q = start; q < 2 * patch.deg(); q += 2) {
      int slot = patch.slot_by_dart[patch.cls[at]][q];
      VertexId next = patch.neighbor(at, slot);
      if (next < 0) continue;
      word.push_back(static_cast<int>(q));
      self(self, next);
      word.pop_back();
    }
  };
  extend(extend, patch.a_lift);

  CHECK(closed_words.size() > 0);
  CHECK(derivable_words(g, 4) == closed_words);

  QuadSystem qs = build_quads(canonical_system_of_loops(2));
  CHECK_THROWS_AS(short_class_grammar(qs.quads, 0), MapError);
}

TEST_CASE("hyperbolic search matches brute force on fixtures") {
  SurfaceMap canon = canonical_system_of_loops(2);
  auto got = shortest_contractible_hyperbolic(canon, 4);
  check_candidate(canon, got);
  CHECK(got->second == brute_force_min(canon, 3)->weight);
  CHECK(got->second == 2.0);

  SurfaceMap digon = genus2_with_digon();
  REQUIRE(digon.genus() == 2);
  REQUIRE(digon.closed_surface());
  REQUIRE(digon.face_count() == 2);
  auto got_digon = shortest_contractible_hyperbolic(digon, 4);
  check_candidate(digon, got_digon);
  CHECK(got_digon->second == 2.0);

  SurfaceMap directed = one_way_genus2();
  REQUIRE(directed.genus() == 2);
  CHECK(!shortest_contractible_hyperbolic(directed, 4).has_value());
  CHECK(!brute_force_min(directed, 4).has_value());

  CHECK_THROWS_AS(shortest_contractible_hyperbolic(one_vertex_torus_map()),
                  MapError);
  CHECK_THROWS_AS(shortest_contractible_hyperbolic(tetrahedron_map()),
                  MapError);
  CHECK_THROWS_AS(shortest_contractible_hyperbolic(loop_annulus_map()),
                  MapError);
}

TEST_CASE("hyperbolic search with a word budget stays sound on random maps") {
  std::mt19937_64 rng(8802);
  int equality_checked = 0;

  auto run_batch = [&](int max_vertices, int edges, int count) {
    RandomMapOptions opt;
    opt.max_vertices = max_vertices;
    opt.min_edges = edges;
    opt.max_edges = edges;
    for (SurfaceMap& map : random_maps_of_genus(rng, 2, count, opt)) {
      auto got = shortest_contractible_hyperbolic(map, 4);
      auto want = brute_force_min(map, map.edge_count());
      if (!want) {
        CHECK(!got.has_value());
        continue;
      }
      if (got) {
        CHECK(got->second >= want->weight);
        check_candidate(map, got);
      }
      // A walk's word has at most two letters per hop, so any optimum with
      // hops * 2 <= budget must be found.
      if (2 * want->hops <= 4) {
        REQUIRE(got.has_value());
        CHECK(got->second == want->weight);
        ++equality_checked;
      }
    }
  };

  run_batch(1, 4, 8);
  run_batch(2, 5, 5);
  CHECK(equality_checked == 13);
}

TEST_CASE("rho two grammar benchmark" * doctest::skip()) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  const CnfGrammar& g = build_hyperbolic_grammar(2, 6);
  auto t1 = clock::now();
  std::fprintf(stderr,
               "rho=2 grammar: %d nonterminals, %zu terminal, %zu binary, %.1fs\n",
               g.nonterminal_count, g.terminal.size(), g.binary.size(),
               std::chrono::duration<double>(t1 - t0).count());

  SurfaceMap canon = canonical_system_of_loops(2);
  auto t2 = clock::now();
  auto got = shortest_contractible_hyperbolic(canon);
  auto t3 = clock::now();
  REQUIRE(got.has_value());
  std::fprintf(stderr, "canonical g=2 search: weight %.1f, %.1fs\n", got->second,
               std::chrono::duration<double>(t3 - t2).count());
}
