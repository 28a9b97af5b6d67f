#include "topowalk/cfl_engine.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace topowalk {

std::string CnfGrammar::name_of(int nt) const {
  if (nt >= 0 && nt < static_cast<int>(names.size()) && !names[nt].empty())
    return names[nt];
  return "N" + std::to_string(nt);
}

std::vector<int> CnfGrammar::alphabet() const {
  std::vector<int> labels;
  for (const TerminalProd& p : terminal) labels.push_back(p.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

std::vector<char> CnfGrammar::productive() const {
  check();
  std::vector<char> good(nonterminal_count, 0);
  for (const TerminalProd& p : terminal) good[p.lhs] = 1;
  bool again = true;
  while (again) {
    again = false;
    for (const BinaryProd& p : binary)
      if (!good[p.lhs] && good[p.left] && good[p.right]) {
        good[p.lhs] = 1;
        again = true;
      }
  }
  return good;
}

std::vector<char> CnfGrammar::reachable() const {
  check();
  std::vector<char> seen(nonterminal_count, 0);
  seen[start] = 1;
  bool again = true;
  while (again) {
    again = false;
    for (const BinaryProd& p : binary) {
      if (!seen[p.lhs]) continue;
      if (!seen[p.left] || !seen[p.right]) {
        seen[p.left] = seen[p.right] = 1;
        again = true;
      }
    }
  }
  return seen;
}

void CnfGrammar::check() const {
  require(nonterminal_count > 0, "grammar: no nonterminals");
  require(start >= 0 && start < nonterminal_count, "grammar: bad start");
  for (const TerminalProd& p : terminal) {
    require(p.lhs >= 0 && p.lhs < nonterminal_count, "grammar: bad lhs");
    require(p.label != kEpsilonLabel, "grammar: epsilon production");
  }
  for (const BinaryProd& p : binary)
    require(p.lhs >= 0 && p.lhs < nonterminal_count && p.left >= 0 &&
                p.left < nonterminal_count && p.right >= 0 &&
                p.right < nonterminal_count,
            "grammar: bad production");
}

CnfGrammar parse_grammar(const std::string& text) {
  CnfGrammar g;
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const std::string& name) {
    auto [it, fresh] = ids.try_emplace(name, g.nonterminal_count);
    if (fresh) {
      ++g.nonterminal_count;
      g.names.push_back(name);
    }
    return it->second;
  };
  std::istringstream in(text);
  std::string line;
  bool saw_start = false;
  while (std::getline(in, line)) {
    if (size_t hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::istringstream row(line);
    std::string head;
    if (!(row >> head)) continue;
    if (head == "start") {
      std::string name;
      require(static_cast<bool>(row >> name), "grammar text: start needs a symbol");
      require(!saw_start, "grammar text: two start lines");
      saw_start = true;
      g.start = intern(name);
    } else if (head == "prod") {
      std::string lhs, arrow, first;
      require(static_cast<bool>(row >> lhs >> arrow >> first) && arrow == "->",
              "grammar text: malformed production");
      if (first.size() >= 2 && first.front() == '\'' && first.back() == '\'') {
        std::string body = first.substr(1, first.size() - 2);
        size_t used = 0;
        int label = 0;
        try {
          label = std::stoi(body, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        require(used == body.size() && !body.empty(),
                "grammar text: label is not an integer");
        g.terminal.push_back({intern(lhs), label});
      } else {
        std::string second;
        require(static_cast<bool>(row >> second),
                "grammar text: binary production needs two symbols");
        g.binary.push_back({intern(lhs), intern(first), intern(second)});
      }
    } else {
      throw MapError("grammar text: unknown directive " + head);
    }
  }
  require(saw_start, "grammar text: missing start line");
  g.check();
  return g;
}

std::string grammar_to_text(const CnfGrammar& g) {
  g.check();
  std::ostringstream out;
  out << "start " << g.name_of(g.start) << "\n";
  for (const CnfGrammar::TerminalProd& p : g.terminal)
    out << "prod " << g.name_of(p.lhs) << " -> '" << p.label << "'\n";
  for (const CnfGrammar::BinaryProd& p : g.binary)
    out << "prod " << g.name_of(p.lhs) << " -> " << g.name_of(p.left) << " "
        << g.name_of(p.right) << "\n";
  return out.str();
}

bool cyk_accepts(const CnfGrammar& g, const std::vector<int>& labels) {
  g.check();
  int n = static_cast<int>(labels.size());
  if (n == 0) return false;
  std::unordered_map<std::uint64_t, std::vector<int>> by_pair;
  for (const CnfGrammar::BinaryProd& p : g.binary)
    by_pair[(static_cast<std::uint64_t>(p.left) << 32) | p.right].push_back(
        p.lhs);
  // cell[i][len-1] holds the sorted nonterminals deriving labels[i, i+len)
  std::vector<std::vector<std::vector<int>>> cell(
      n, std::vector<std::vector<int>>(n));
  for (int i = 0; i < n; ++i) {
    for (const CnfGrammar::TerminalProd& p : g.terminal)
      if (p.label == labels[i]) cell[i][0].push_back(p.lhs);
    std::sort(cell[i][0].begin(), cell[i][0].end());
    cell[i][0].erase(std::unique(cell[i][0].begin(), cell[i][0].end()),
                     cell[i][0].end());
  }
  for (int len = 2; len <= n; ++len)
    for (int i = 0; i + len <= n; ++i) {
      std::vector<int>& here = cell[i][len - 1];
      for (int k = 1; k < len; ++k)
        for (int a : cell[i][k - 1])
          for (int b : cell[i + k][len - k - 1]) {
            auto hit =
                by_pair.find((static_cast<std::uint64_t>(a) << 32) | b);
            if (hit == by_pair.end()) continue;
            here.insert(here.end(), hit->second.begin(), hit->second.end());
          }
      std::sort(here.begin(), here.end());
      here.erase(std::unique(here.begin(), here.end()), here.end());
    }
  const std::vector<int>& full = cell[0][n - 1];
  return std::binary_search(full.begin(), full.end(), g.start);
}

void LabeledGraph::add(int from, int to, double w, int label) {
  require(from >= 0 && from < vertices && to >= 0 && to < vertices,
          "labeled graph: dart endpoint out of range");
  darts.push_back({from, to, w, label});
}

namespace {

struct Parent {
  int kind = -1;  // 0 seed dart, 1 binary, 2 epsilon append, 3 prepend
  std::uint64_t a = 0;
  std::uint64_t b = 0;
};

struct ItemState {
  double w = 0;
  bool done = false;
  Parent parent;
};

// Dijkstra-style fixpoint over (nonterminal, from, to) items, all tables
// sparse so large grammars only pay for items actually discovered. When
// only the cheapest closed walk is wanted, the settle loop stops as soon as
// the frontier weight passes the best start-class self-loop seen, which on
// big grammars skips almost all of the state space.
struct Engine {
  const LabeledGraph& graph;
  const CnfGrammar& grammar;
  std::uint64_t stride;

  std::unordered_map<std::uint64_t, ItemState> state;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> by_from;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> by_to;
  // CSR-shaped production index: productions containing A on that side.
  std::vector<std::size_t> left_off, right_off;
  std::vector<std::pair<int, int>> left_dat;   // A -> (C, B) for C -> A B
  std::vector<std::pair<int, int>> right_dat;  // B -> (C, A) for C -> A B
  std::vector<std::vector<int>> eps_out, eps_in;

  using Item = std::tuple<double, int, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

  Engine(const LabeledGraph& graph, const CnfGrammar& grammar)
      : graph(graph), grammar(grammar),
        stride(static_cast<std::uint64_t>(graph.vertices)) {}

  std::uint64_t key(int nt, int from, int to) const {
    return (static_cast<std::uint64_t>(nt) * stride + from) * stride + to;
  }
  std::uint64_t group(int nt, int vertex) const {
    return static_cast<std::uint64_t>(nt) * stride + vertex;
  }

  void relax(int nt, int from, int to, double w, const Parent& why) {
    std::uint64_t k = key(nt, from, to);
    auto [it, fresh] = state.try_emplace(k);
    if (!fresh && it->second.w <= w) return;
    require(!it->second.done, "cfl engine: settled item improved");
    it->second.w = w;
    it->second.parent = why;
    heap.push({w, nt, from, to});
  }

  void index() {
    grammar.check();
    for (const LabeledGraph::Dart& d : graph.darts)
      require(d.w >= 0, "cfl engine: negative dart weight");

    size_t n = static_cast<size_t>(grammar.nonterminal_count);
    left_off.assign(n + 1, 0);
    right_off.assign(n + 1, 0);
    for (const CnfGrammar::BinaryProd& p : grammar.binary) {
      ++left_off[p.left + 1];
      ++right_off[p.right + 1];
    }
    for (size_t i = 0; i < n; ++i) {
      left_off[i + 1] += left_off[i];
      right_off[i + 1] += right_off[i];
    }
    left_dat.resize(grammar.binary.size());
    right_dat.resize(grammar.binary.size());
    std::vector<std::size_t> lpos(left_off.begin(), left_off.end() - 1);
    std::vector<std::size_t> rpos(right_off.begin(), right_off.end() - 1);
    for (const CnfGrammar::BinaryProd& p : grammar.binary) {
      left_dat[lpos[p.left]++] = {p.lhs, p.right};
      right_dat[rpos[p.right]++] = {p.lhs, p.left};
    }

    eps_out.assign(graph.vertices, {});
    eps_in.assign(graph.vertices, {});
    std::unordered_map<int, std::vector<int>> term_by_label;
    for (const CnfGrammar::TerminalProd& p : grammar.terminal)
      term_by_label[p.label].push_back(p.lhs);
    for (int k = 0; k < static_cast<int>(graph.darts.size()); ++k) {
      const LabeledGraph::Dart& d = graph.darts[k];
      if (d.label == kEpsilonLabel) {
        eps_out[d.from].push_back(k);
        eps_in[d.to].push_back(k);
      } else if (auto hit = term_by_label.find(d.label);
                 hit != term_by_label.end()) {
        for (int nt : hit->second)
          relax(nt, d.from, d.to, d.w, Parent{0, static_cast<std::uint64_t>(k), 0});
      }
    }
  }

  // Settles items cheapest-first. In closed-walk mode the loop returns the
  // best settled (start, u, u) item once nothing on the heap can match it;
  // ties keep the lowest start vertex, exactly like the exhaustive scan.
  std::optional<std::uint64_t> run(bool stop_at_closed_walk) {
    std::optional<std::uint64_t> best_key;
    double best_w = 0;
    int best_u = -1;
    double floor = 0;
    while (!heap.empty()) {
      auto [w, nt, from, to] = heap.top();
      if (stop_at_closed_walk && best_u >= 0 && w > best_w) break;
      heap.pop();
      std::uint64_t k = key(nt, from, to);
      ItemState& st = state[k];
      if (st.done || st.w < w) continue;
      st.done = true;
      require(w >= floor, "cfl engine: extraction order not monotone");
      floor = w;
      if (stop_at_closed_walk && nt == grammar.start && from == to &&
          (best_u < 0 || w < best_w || (w == best_w && from < best_u))) {
        best_key = k;
        best_w = w;
        best_u = from;
      }
      by_from[group(nt, from)].push_back(k);
      by_to[group(nt, to)].push_back(k);

      for (size_t i = left_off[nt]; i < left_off[nt + 1]; ++i) {
        auto [lhs, right] = left_dat[i];
        for (std::uint64_t other : by_from[group(right, to)]) {
          int other_to = static_cast<int>(other % stride);
          relax(lhs, from, other_to, w + state[other].w, Parent{1, k, other});
        }
      }
      for (size_t i = right_off[nt]; i < right_off[nt + 1]; ++i) {
        auto [lhs, left] = right_dat[i];
        for (std::uint64_t other : by_to[group(left, from)]) {
          int other_from = static_cast<int>(other / stride % stride);
          relax(lhs, other_from, to, state[other].w + w, Parent{1, other, k});
        }
      }
      for (int d : eps_out[to])
        relax(nt, from, graph.darts[d].to, w + graph.darts[d].w,
              Parent{2, k, static_cast<std::uint64_t>(d)});
      for (int d : eps_in[from])
        relax(nt, graph.darts[d].from, to, w + graph.darts[d].w,
              Parent{3, static_cast<std::uint64_t>(d), k});
    }
    return best_key;
  }

  void emit(std::uint64_t k, std::vector<DartId>& out) const {
    const Parent& p = state.at(k).parent;
    switch (p.kind) {
      case 0:
        out.push_back(static_cast<DartId>(p.a));
        break;
      case 1:
        emit(p.a, out);
        emit(p.b, out);
        break;
      case 2:
        emit(p.a, out);
        out.push_back(static_cast<DartId>(p.b));
        break;
      default:
        out.push_back(static_cast<DartId>(p.a));
        emit(p.b, out);
    }
  }

  std::optional<std::pair<Walk, double>> answer(std::uint64_t k) const {
    auto it = state.find(k);
    if (it == state.end()) return std::nullopt;
    Walk w;
    int from = static_cast<int>(it->first / stride % stride);
    int to = static_cast<int>(it->first % stride);
    w.closed = from == to;
    emit(k, w.darts);
    return std::make_pair(std::move(w), it->second.w);
  }
};

}  // namespace

std::optional<std::pair<Walk, double>> shortest_generated_path(
    const LabeledGraph& graph, const CnfGrammar& grammar, int u, int v) {
  require(u >= 0 && u < graph.vertices && v >= 0 && v < graph.vertices,
          "shortest_generated_path: endpoint out of range");
  Engine engine(graph, grammar);
  engine.index();
  engine.run(false);
  std::uint64_t k = engine.key(grammar.start, u, v);
  if (auto it = engine.state.find(k); it == engine.state.end())
    return std::nullopt;
  return engine.answer(k);
}

std::optional<std::pair<Walk, double>> shortest_generated_closed_walk(
    const LabeledGraph& graph, const CnfGrammar& grammar) {
  Engine engine(graph, grammar);
  engine.index();
  auto best = engine.run(true);
  if (!best) return std::nullopt;
  return engine.answer(*best);
}

}  // namespace topowalk
