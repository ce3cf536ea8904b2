#pragma once

#include <deque>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "dstp/graph.hpp"
#include "dstp/instance.hpp"

namespace dstp {

enum class NodeKind { Instance, Aux, Copy };

struct EmbedNode {
  NodeKind kind = NodeKind::Instance;
  int parent = -1;
  double cost = 0.0;  // cost of the edge from the parent
  int carried = -1;   // path carried by the edge from the parent, or -1
  std::vector<int> children;
  int instance = -1;  // Instance: sub-instance id
  double phi = 0.0;   // Instance: guess; Aux: guess used for the separator
  int k = 0;          // Instance: terminal count of the sub-instance
  bool exclusive = false;
  int terminal = -1;     // Copy: original terminal
  int source_path = -1;  // Copy: separator or base path containing the terminal
};

/// A sub-instance H of the recursion, kept so graph solutions can be
/// traced through it.
struct InstanceContext {
  EmbeddedDigraph graph;  // Arc::id and vertex_origin refer to the input graph
  int root = 0;
  std::vector<int> terminals;                 // local vertex ids
  std::vector<std::vector<int>> arc_sources;  // input arcs each local arc stands for
};

struct EmbedTree {
  std::vector<EmbedNode> nodes;
  int root = -1;  // -1 for the empty tree
  std::vector<std::vector<int>> paths;  // input arc ids
  std::vector<double> path_cost;
  std::map<int, std::vector<int>> copies;  // M
  std::deque<InstanceContext> contexts;
  std::vector<int> dropped_terminals;      // farther than gamma from the root
  double gamma = 0.0;
  int k = 0;
  bool height_reduced = false;
  int separator_calls = 0;

  bool empty() const { return root < 0; }
  int height() const;
  int non_copy_count() const;
  std::vector<int> copy_nodes() const;
};

/// The input graph's arc ids must equal arc indices (as for parsed instances).
EmbedTree tree_emb(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals, double gamma);
EmbedTree tree_emb_height_reduced(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                                  double gamma);

/// Tree nodes forming a subtree rooted at the tree root.
ArcSetSolution project_to_graph(const EmbedTree& tree, const EmbeddedDigraph& g,
                                std::span<const int> subtree, int r);

struct TreeProjection {
  std::vector<int> nodes;  // sorted
  double cost = 0.0;
};

/// Subtree of the embedding covering a copy of every terminal of the r-tree
/// `arcs` (input arc indices).
TreeProjection project_from_graph(const EmbedTree& tree, const EmbeddedDigraph& g,
                                  std::span<const int> arcs, int r);

double subtree_cost(const EmbedTree& tree, std::span<const int> subtree);

/// g'_i = union of M(u) over u in g_i.
std::vector<std::vector<int>> expand_groups(const EmbedTree& tree,
                                            const std::vector<std::vector<int>>& groups);

class LiftedPolymatroid {
 public:
  LiftedPolymatroid(const EmbedTree& tree, PolymatroidHandle f);
  /// f_T(Z) = f({t : M(t) meets Z}) for a set of tree nodes.
  long value(std::span<const int> nodes) const;
  const PolymatroidHandle& base() const { return f_; }

 private:
  std::vector<int> terminal_of_;
  PolymatroidHandle f_;
};

LiftedPolymatroid lift_polymatroid(const EmbedTree& tree, const PolymatroidHandle& f);

nlohmann::json embed_tree_to_json(const EmbedTree& tree);

}  // namespace dstp
