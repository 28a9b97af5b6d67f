#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace topowalk {

using VertexId = int;
using EdgeId = int;
using DartId = int;
using FaceId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Edge e owns dart 2e (tail -> head) and dart 2e+1 (head -> tail).
constexpr DartId forward_dart(EdgeId e) { return 2 * e; }
constexpr DartId reverse_dart(EdgeId e) { return 2 * e + 1; }
constexpr DartId rev(DartId d) { return d ^ 1; }
constexpr EdgeId edge_of(DartId d) { return d >> 1; }
constexpr bool is_forward(DartId d) { return (d & 1) == 0; }

// A walk is a dart sequence; consecutive darts must be incident
// (head of darts[i] == tail of darts[i+1], wrapping around when closed).
struct Walk {
  std::vector<DartId> darts;
  bool closed = true;

  int hops() const { return static_cast<int>(darts.size()); }
  bool empty() const { return darts.empty(); }
};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw MapError(msg);
}

}  // namespace topowalk
