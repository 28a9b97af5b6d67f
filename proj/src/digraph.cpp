#include "topowalk/digraph.hpp"

#include <algorithm>
#include <numeric>

namespace topowalk {

namespace {

struct AdjLists {
  std::vector<std::vector<int>> out;
  std::vector<std::vector<int>> in;
};

AdjLists build_adj(int nodes, const std::vector<std::pair<int, int>>& arcs) {
  AdjLists adj;
  adj.out.resize(nodes);
  adj.in.resize(nodes);
  for (auto [a, b] : arcs) {
    adj.out[a].push_back(b);
    adj.in[b].push_back(a);
  }
  return adj;
}

// Ids are assigned in discovery order; remap so the component containing the
// smallest node gets the smallest id. Keeps scans over components canonical.
std::vector<int> renumber_by_smallest_member(std::vector<int> comp) {
  int count = 0;
  for (int c : comp) count = std::max(count, c + 1);
  std::vector<int> first_member(count, -1);
  for (int v = 0; v < (int)comp.size(); ++v) {
    if (first_member[comp[v]] < 0) first_member[comp[v]] = v;
  }
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return first_member[a] < first_member[b]; });
  std::vector<int> new_id(count);
  for (int rank = 0; rank < count; ++rank) new_id[order[rank]] = rank;
  for (int& c : comp) c = new_id[c];
  return comp;
}

}  // namespace

std::vector<int> strong_components(int nodes,
                                   const std::vector<std::pair<int, int>>& arcs) {
  AdjLists adj = build_adj(nodes, arcs);

  // Kosaraju, iterative. First pass: forward DFS, record finish order.
  std::vector<int> finish;
  finish.reserve(nodes);
  std::vector<char> seen(nodes, 0);
  std::vector<std::pair<int, size_t>> stack;  // (node, next out index)
  for (int start = 0; start < nodes; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    stack.emplace_back(start, 0);
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < adj.out[v].size()) {
        int w = adj.out[v][i];
        ++i;  // advance before push: push_back may reallocate the stack
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        finish.push_back(v);
        stack.pop_back();
      }
    }
  }

  // Second pass: reverse DFS in decreasing finish order.
  std::vector<int> comp(nodes, -1);
  int next_id = 0;
  std::vector<int> todo;
  for (int k = nodes - 1; k >= 0; --k) {
    int root = finish[k];
    if (comp[root] >= 0) continue;
    comp[root] = next_id;
    todo.push_back(root);
    while (!todo.empty()) {
      int v = todo.back();
      todo.pop_back();
      for (int w : adj.in[v]) {
        if (comp[w] < 0) {
          comp[w] = next_id;
          todo.push_back(w);
        }
      }
    }
    ++next_id;
  }
  return renumber_by_smallest_member(std::move(comp));
}

std::vector<int> weak_components(int nodes,
                                 const std::vector<std::pair<int, int>>& arcs) {
  std::vector<int> parent(nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (auto [a, b] : arcs) {
    int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<int> comp(nodes, -1);
  int next_id = 0;
  for (int v = 0; v < nodes; ++v) {
    int r = find(v);
    if (comp[r] < 0) comp[r] = next_id++;
    comp[v] = comp[r];
  }
  return comp;
}

}  // namespace topowalk
