#pragma once

// Embedded directed planar multigraphs and the shared graph primitives used
// by every solver: shortest paths, contraction into the root, weak
// components and out-tree certification.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dstp/error.hpp"

namespace dstp {

inline constexpr double kTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  int tail = 0;
  int head = 0;
  double cost = 0.0;
  /// Identifier of the arc in the input instance. Derived graphs keep the id
  /// of the input arc they stand for; auxiliary arcs use -1.
  int id = 0;
};

/// A dart is one side of an arc: 2*arc for the tail side, 2*arc+1 for the
/// head side.
using Dart = int;

inline int dart_arc(Dart d) { return d >> 1; }
inline Dart dart_twin(Dart d) { return d ^ 1; }
inline Dart tail_dart(int arc) { return 2 * arc; }
inline Dart head_dart(int arc) { return 2 * arc + 1; }

/// Arc-weighted digraph with a rotation system. rotation[v] lists the darts
/// at v in clockwise order; orientation of the arcs is ignored by the
/// embedding. vertex_origin maps every vertex to the input vertex it stands
/// for (a contracted root maps to the input root).
class EmbeddedDigraph {
 public:
  EmbeddedDigraph() = default;
  EmbeddedDigraph(int n, std::vector<Arc> arcs, std::vector<std::vector<Dart>> rotation,
                  std::vector<int> vertex_origin = {});

  int num_vertices() const { return n_; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int a) const { return arcs_[a]; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<Dart>& rotation(int v) const { return rotation_[v]; }
  const std::vector<std::vector<Dart>>& rotations() const { return rotation_; }
  int vertex_origin(int v) const { return vertex_origin_[v]; }
  const std::vector<int>& vertex_origins() const { return vertex_origin_; }
  const std::vector<int>& out_arcs(int v) const { return out_[v]; }
  const std::vector<int>& in_arcs(int v) const { return in_[v]; }

  int dart_vertex(Dart d) const {
    const Arc& a = arcs_[dart_arc(d)];
    return (d & 1) ? a.head : a.tail;
  }

  double total_cost() const;
  /// Local index of the vertex whose origin is `origin`, or -1.
  int find_origin(int origin) const;

 private:
  int n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<Dart>> rotation_;
  std::vector<int> vertex_origin_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

/// Face count of the embedding. Throws InconsistentRotation when some arc
/// is missing from (or repeated in) the rotation of an endpoint and
/// EulerViolation when n - m + F != 2 for some weakly connected component.
int validate_planar_embedding(const EmbeddedDigraph& g);

/// Faces as dart cycles, following next(d) = clockwise successor of twin(d).
std::vector<std::vector<Dart>> trace_faces(const EmbeddedDigraph& g);

struct NormalizedCosts {
  EmbeddedDigraph graph;
  double scale = 1.0;
  int raised_zero_arcs = 0;
};

/// Scales costs so the minimum positive cost is 1. In strict mode zero-cost
/// arcs are first raised to 1 (counted in raised_zero_arcs).
NormalizedCosts normalize_costs(const EmbeddedDigraph& g, bool strict = false);

struct ShortestPathTree {
  int root = 0;
  std::vector<double> dist;
  std::vector<int> parent_arc;  // -1 for the root and unreachable vertices
  std::vector<int> arc_tail;

  bool reachable(int v) const { return dist[v] < kInf; }
  /// Arcs of the tree path root -> v, in order from the root.
  std::vector<int> path_arcs(int v) const;
  std::vector<int> path_vertices(int v, const EmbeddedDigraph& g) const;
};

/// Dijkstra from r. Ties are broken towards the smaller input arc id.
ShortestPathTree shortest_path_tree(const EmbeddedDigraph& g, int r);

/// A derived graph together with its provenance in the graph it was
/// derived from: for every new vertex the old vertex it came from (the
/// contracted root maps to the old root) and for every new arc the old arcs
/// merged into it (the cheapest first).
struct DerivedGraph {
  EmbeddedDigraph graph;
  int root = -1;
  std::vector<int> vertex_parent;
  std::vector<std::vector<int>> arc_parents;
};

/// Subgraph induced by the vertices with keep[v] set, rotation restricted.
DerivedGraph induced_subgraph(const EmbeddedDigraph& g, const std::vector<char>& keep,
                              int root = -1);

/// Contracts `merge` (which must contain r and be weakly connected through
/// arcs inside it) into r. Self-loops are deleted and parallel arcs between
/// the same ordered pair keep only the cheapest one.
DerivedGraph contract_into_root(const EmbeddedDigraph& g, int r, std::span<const int> merge);

/// Weakly connected components of V \ removed, each sorted, ordered by
/// smallest vertex.
std::vector<std::vector<int>> weak_components(const EmbeddedDigraph& g,
                                              const std::vector<char>& removed);

struct OutTreeCheck {
  bool ok = true;
  int violating_vertex = -1;
};

/// True iff every non-root vertex touched by `arcs` has in-degree exactly one
/// in `arcs` and is reachable from r through them.
OutTreeCheck check_out_tree(const EmbeddedDigraph& g, std::span<const int> arcs, int r);

/// Shortest-path out-branching from `roots` inside the arc subset `arcs`.
/// With prune set, branches not leading to one of `targets` are cut.
std::vector<int> extract_branching(const EmbeddedDigraph& g, std::span<const int> arcs,
                                   std::span<const int> roots, std::span<const int> targets = {},
                                   bool prune = false);

/// Vertices reachable from `roots` using only `arcs`.
std::vector<char> reachable_through(const EmbeddedDigraph& g, std::span<const int> arcs,
                                    std::span<const int> roots);

double arc_set_cost(const EmbeddedDigraph& g, std::span<const int> arcs);

}  // namespace dstp
