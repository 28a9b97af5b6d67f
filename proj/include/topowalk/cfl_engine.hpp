#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topowalk/types.hpp"

namespace topowalk {

// Labels are plain ints (quad darts, signed arc letters, test alphabets);
// kEpsilonLabel marks a dart that contributes nothing to a walk's label.
inline constexpr int kEpsilonLabel = std::numeric_limits<int>::min();

// Grammar in Chomsky normal form over int labels. The representation has no
// way to spell an epsilon production, so every generated string has at least
// one letter; useless nonterminals are allowed but can be flagged.
struct CnfGrammar {
  struct TerminalProd {
    int lhs = -1;
    int label = 0;
  };
  struct BinaryProd {
    int lhs = -1;
    int left = -1;
    int right = -1;
  };

  int nonterminal_count = 0;
  int start = -1;
  std::vector<TerminalProd> terminal;
  std::vector<BinaryProd> binary;
  std::vector<std::string> names;  // per nonterminal; filled in by the loader

  std::string name_of(int nt) const;
  std::vector<int> alphabet() const;     // sorted distinct terminal labels
  std::vector<char> productive() const;  // derives at least one string
  std::vector<char> reachable() const;   // reachable from the start symbol
  void check() const;                    // throws MapError on malformed ids
};

// One grammar per text: `start <NT>` once, then `prod <NT> -> <NT> <NT>` and
// `prod <NT> -> '<label>'` lines in any order. '#' starts a comment.
CnfGrammar parse_grammar(const std::string& text);
std::string grammar_to_text(const CnfGrammar& g);

// Textbook cubic membership test, kept independent of the walk engine so
// each can vouch for the other.
bool cyk_accepts(const CnfGrammar& g, const std::vector<int>& labels);

// Directed multigraph whose darts carry a weight and a label (or epsilon).
struct LabeledGraph {
  struct Dart {
    int from = -1;
    int to = -1;
    double w = 1.0;
    int label = kEpsilonLabel;
  };

  int vertices = 0;
  std::vector<Dart> darts;

  void add(int from, int to, double w, int label);
};

// Minimum-weight walk from u to v whose label is generated by the grammar's
// start symbol, with its weight. The walk's darts index into graph.darts.
// Computed by a monotone priority-queue fixpoint over (nonterminal, from,
// to) items: terminal productions seed items on matching darts, binary
// productions concatenate settled items, and epsilon darts extend an item on
// either side. Absent when no such walk exists. Weights must be >= 0.
std::optional<std::pair<Walk, double>> shortest_generated_path(
    const LabeledGraph& graph, const CnfGrammar& grammar, int u, int v);

// Minimum over all u of shortest_generated_path(u, u); never the empty walk
// (no epsilon productions). Ties break toward the lowest start vertex.
std::optional<std::pair<Walk, double>> shortest_generated_closed_walk(
    const LabeledGraph& graph, const CnfGrammar& grammar);

}  // namespace topowalk
