#include "topowalk/oracle.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "topowalk/word_grammars.hpp"

namespace topowalk {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::vector<long long> net_crossings(const SurfaceMap& map, const Walk& walk) {
  std::vector<long long> net(map.edge_slots(), 0);
  for (DartId d : walk.darts) net[edge_of(d)] += is_forward(d) ? 1 : -1;
  return net;
}

cpp_int floor_div(const cpp_int& a, const cpp_int& b) {
  cpp_int q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

cpp_int round_nearest(const cpp_rational& x) {
  return floor_div(2 * numerator(x) + denominator(x), 2 * denominator(x));
}

}  // namespace

bool is_bounding(const SurfaceMap& map, const Walk& walk) {
  require(walk.closed, "is_bounding needs a closed walk");
  require(map.walk_ok(walk), "is_bounding: walk is not on the map");
  std::vector<long long> net = net_crossings(map, walk);

  // One unknown per face; a row per edge (left minus right face label equals
  // the walk's net crossings) and a pinning row per boundary face.
  int F = map.face_count();
  std::vector<std::vector<cpp_rational>> rows;
  for (FaceId f = 0; f < F; ++f)
    if (map.face(f).is_boundary()) {
      std::vector<cpp_rational> row(F + 1, 0);
      row[f] = 1;
      rows.push_back(std::move(row));
    }
  for (EdgeId e : map.alive_edge_ids()) {
    std::vector<cpp_rational> row(F + 1, 0);
    row[map.left_face(forward_dart(e))] += 1;
    row[map.right_face(forward_dart(e))] -= 1;
    row[F] = net[e];
    rows.push_back(std::move(row));
  }

  std::vector<int> pivot_of_col(F, -1);
  int rank = 0;
  for (int col = 0; col < F && rank < static_cast<int>(rows.size()); ++col) {
    int pr = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(rows[rank], rows[pr]);
    cpp_rational inv = rows[rank][col];
    for (int c = col; c <= F; ++c) rows[rank][c] /= inv;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && rows[r][col] != 0) {
        cpp_rational factor = rows[r][col];
        for (int c = col; c <= F; ++c) rows[r][c] -= factor * rows[rank][c];
      }
    pivot_of_col[col] = rank;
    ++rank;
  }
  for (int r = rank; r < static_cast<int>(rows.size()); ++r)
    if (rows[r][F] != 0) return false;

  // Particular solution with free faces at zero, rounded and re-verified:
  // the incidence system is integral, so a consistent system has an integer
  // witness and a failed re-check means the solve itself went wrong.
  std::vector<cpp_int> alpha(F, 0);
  for (int col = 0; col < F; ++col)
    if (pivot_of_col[col] >= 0)
      alpha[col] = round_nearest(rows[pivot_of_col[col]][F]);
  bool ok = true;
  for (FaceId f = 0; f < F; ++f)
    if (map.face(f).is_boundary() && alpha[f] != 0) ok = false;
  for (EdgeId e : map.alive_edge_ids())
    if (alpha[map.left_face(forward_dart(e))] -
            alpha[map.right_face(forward_dart(e))] !=
        net[e])
      ok = false;
  require(ok, "is_bounding: bounding certificate is not integral");
  return true;
}

namespace {

// Patches are shared across calls; a map under enumeration asks for the same
// quad system thousands of times with assorted radii.
const TilingPatch& cached_patch(const SurfaceMap& quads, int radius) {
  static std::mutex mu;
  static std::map<std::string, TilingPatch> cache;
  std::lock_guard<std::mutex> lock(mu);
  TilingPatch& slot = cache[quads.to_text()];
  if (slot.radius < radius) slot = build_patch(quads, radius);
  return slot;
}

}  // namespace

bool is_contractible(const SurfaceMap& map, const Walk& walk) {
  require(walk.closed, "is_contractible needs a closed walk");
  require(map.walk_ok(walk), "is_contractible: walk is not on the map");

  if (map.boundary_circles() > 0) {
    // crossing word with the dual arcs, reduced in the free group
    ArcSystem arcs = system_of_dual_arcs(map);
    std::vector<int> stack;
    for (int letter : arcs.word(walk)) {
      if (!stack.empty() && stack.back() == -letter)
        stack.pop_back();
      else
        stack.push_back(letter);
    }
    return stack.empty();
  }

  int g = map.genus();
  if (g == 0) return true;
  if (g == 1) return is_bounding(map, walk);

  // Lift through the quad tiling of the universal cover. A closed lift never
  // strays past half its length from the start, so a lift that leaves the
  // ball of radius len/2 + 1 cannot come back to close up.
  QuadSystem qs = build_quads(map);
  std::vector<DartId> word;
  for (DartId d : qs.word(walk)) {
    if (!word.empty() && word.back() == rev(d))
      word.pop_back();
    else
      word.push_back(d);
  }
  if (word.empty()) return true;
  int radius = static_cast<int>(word.size() + 1) / 2 + 1;
  const TilingPatch& patch = cached_patch(qs.quads, radius);
  auto end = replay(patch, patch.a_lift, word);
  return end && *end == patch.a_lift;
}

namespace {

bool lex_min_rotation(const std::vector<DartId>& w) {
  size_t n = w.size();
  for (size_t r = 1; r < n; ++r)
    for (size_t i = 0; i < n; ++i) {
      DartId a = w[(r + i) % n], b = w[i];
      if (a != b) {
        if (a < b) return false;
        break;
      }
    }
  return true;
}

void extend(const SurfaceMap& map, int max_hops, std::vector<DartId>& cur,
            const std::function<void(const Walk&)>& visit) {
  VertexId at = map.head_of(cur.back());
  if (at == map.tail_of(cur.front()) && lex_min_rotation(cur))
    visit(Walk{cur});
  if (static_cast<int>(cur.size()) == max_hops) return;
  for (DartId d : map.rotation(at)) {
    if (d < cur.front() || !map.dart_finite(d)) continue;
    cur.push_back(d);
    extend(map, max_hops, cur, visit);
    cur.pop_back();
  }
}

}  // namespace

void enumerate_closed_walks(const SurfaceMap& map, int max_hops,
                            const std::function<void(const Walk&)>& visit) {
  require(max_hops >= 1, "enumerate_closed_walks needs max_hops >= 1");
  std::vector<DartId> cur;
  for (DartId d0 = 0; d0 < map.dart_slots(); ++d0) {
    if (!map.edge(edge_of(d0)).alive || !map.dart_finite(d0)) continue;
    cur.assign(1, d0);
    extend(map, max_hops, cur, visit);
  }
}

std::vector<Walk> enumerate_closed_walks(const SurfaceMap& map, int max_hops) {
  std::vector<Walk> out;
  enumerate_closed_walks(map, max_hops,
                         [&](const Walk& w) { out.push_back(w); });
  return out;
}

}  // namespace topowalk
