#pragma once

#include <vector>

#include <json.hpp>

#include "dstp/graph.hpp"

namespace dstp {

/// Number of root paths a separator may use (two fundamental cycles).
inline constexpr int kMaxSeparatorPaths = 4;

struct Triangulation {
  /// Arcs 0..original_arcs-1 are the input arcs; the rest are auxiliary
  /// zero-cost chords with id -1.
  EmbeddedDigraph graph;
  int original_arcs = 0;
  bool auxiliary(int a) const { return a >= original_arcs; }
};

Triangulation triangulate(const EmbeddedDigraph& g);

struct FundamentalCycle {
  int edge = -1;  // non-tree arc of the triangulated graph; -1 when degenerate
  int u = -1;
  int v = -1;
  double inside = 0.0;
  double outside = 0.0;
  double on_cycle = 0.0;
  bool degenerate = false;
  int degenerate_vertex = -1;  // endpoint of the root path used when degenerate
};

/// `parent_arc[v]` is the tree arc entering v (-1 at the root); the tree must
/// span every vertex. Picks the non-tree edge minimising the heavier side.
FundamentalCycle fundamental_cycle_separator(const Triangulation& tri,
                                             const std::vector<int>& parent_arc, int root,
                                             const std::vector<double>& w);

/// Weight strictly inside the fundamental cycle of `edge`, and on the cycle.
std::pair<double, double> cycle_inside_weight(const Triangulation& tri,
                                              const std::vector<int>& parent_arc, int root,
                                              int edge, const std::vector<double>& w);

struct SeparatorResult {
  std::vector<std::vector<int>> paths;  // arc indices, each from the root
  std::vector<int> path_ends;
  std::vector<char> in_separator;       // vertex mask of P (includes the root)
  std::vector<std::vector<int>> components;
  std::vector<double> component_weight;
  double total_weight = 0.0;
  double beta = 0.0;
  int rounds = 0;
};

/// Shortest-path separator: at most kMaxSeparatorPaths root paths of the
/// shortest-path tree from r whose removal leaves weakly connected
/// components of weight at most half the total.
SeparatorResult shortest_path_separator(const EmbeddedDigraph& g, int r, const std::vector<double>& w);

struct SubInstance {
  DerivedGraph sub;                 // relative to the graph given to prune_and_separate
  std::vector<int> terminals;       // vertices of sub.graph
};

struct PruneSeparateResult {
  std::vector<std::vector<int>> paths;  // arc indices of the input graph
  std::vector<int> separator_arcs;      // union of the paths, sorted
  std::vector<int> separator_vertices;  // vertices of P, sorted (includes r)
  double separator_cost = 0.0;          // cost of the union
  double path_cost_sum = 0.0;
  std::vector<SubInstance> components;  // only those containing terminals
  std::vector<int> terminals_on_separator;
  std::vector<int> pruned_terminals;    // farther than gamma from r
  double beta = 0.0;
  int kept_vertices = 0;
};

PruneSeparateResult prune_and_separate(const EmbeddedDigraph& g, int r,
                                       const std::vector<int>& terminals, double gamma);

nlohmann::json separator_to_json(const EmbeddedDigraph& g, const PruneSeparateResult& res);

}  // namespace dstp
