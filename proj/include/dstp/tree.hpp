#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dstp/embed.hpp"

namespace dstp {

/// Rooted out-tree; cost[v] is the cost of the edge entering v.
struct TreeInstance {
  int root = 0;
  std::vector<int> parent;
  std::vector<double> cost;
  std::vector<std::vector<int>> children;
  std::vector<char> exclusive;  // at most one child subtree may be used
  std::vector<int> label;       // terminal carried by the node, -1 if none
  std::vector<double> prize;    // per node; empty when there are no prizes
  std::vector<int> origin;      // node of the source tree, -1 for binarization nodes

  int size() const { return static_cast<int>(parent.size()); }
  int add_node(int par, double c, int lab = -1);
  int height() const;
  /// Parents before children.
  std::vector<int> preorder() const;
  /// Distinct labels in the tree.
  int num_labels() const;
};

TreeInstance tree_from_parents(const std::vector<int>& parent, const std::vector<double>& cost);
TreeInstance tree_from_embedding(const EmbedTree& tree);

/// Out-degree at most two via zero-cost chains; exclusive nodes spread their
/// flag along the chain.
TreeInstance binarize(const TreeInstance& t);

struct TreeSolution {
  std::vector<int> nodes;  // sorted, closed under parents, contains the root
  double cost = 0.0;       // edge cost
  double objective = 0.0;  // cost plus foregone prizes for prize-collecting, else cost
  int covered = 0;         // distinct labels
};

TreeSolution make_tree_solution(const TreeInstance& t, std::vector<int> nodes);
/// Nodes of the source tree for a solution of binarize(t).
std::vector<int> unbinarize(const TreeInstance& bin, const TreeSolution& sol);

struct GstLp {
  std::vector<double> x;  // per node (edge into it), monotone and at most 1
  double objective = 0.0;
  int rounds = 0;
};

GstLp gst_lp_solve(const TreeInstance& t, const std::vector<std::vector<int>>& groups);

TreeSolution gkr_round(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                       const std::vector<double>& x, std::uint64_t seed, int* rounds_used = nullptr);

/// Exact group Steiner tree by a subset DP over groups (at most 16 groups).
TreeSolution gst_exact(const TreeInstance& t, const std::vector<std::vector<int>>& groups);

struct DensityResult {
  TreeSolution solution;
  int groups_covered = 0;
  double density = 0.0;
  double lp_density = 0.0;
};

/// With `x` given it is used as the fractional solution instead of solving the LP.
DensityResult min_density_dgst(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                               std::uint64_t seed, const std::vector<double>* x = nullptr);

struct DcstLpSolution {
  std::vector<double> x;  // per node
  std::vector<double> f;  // per node, absorbed flow
  double objective = 0.0;
  int rounds = 0;
};

DcstLpSolution dcst_lp_solve(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                             const std::vector<int>& h);

TreeSolution dcst_iterative_round(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                                  const std::vector<int>& h, const DcstLpSolution& lp,
                                  std::uint64_t seed, int* iterations = nullptr);

using TreeSetFunction = std::function<long(std::span<const int>)>;

struct GreedyResult {
  TreeSolution solution;
  std::vector<double> phase_density;
};

/// Stops after `max_phases` augmentations when positive.
GreedyResult recursive_greedy_polymatroid(const TreeInstance& t, const TreeSetFunction& f,
                                          int max_phases = 0);

/// Cheapest subtree covering at least ell labelled nodes.
TreeSolution ldst_dp(const TreeInstance& t, int ell);
/// Minimises edge cost plus the prizes of labels left uncovered.
TreeSolution pc_dst_dp(const TreeInstance& t);

struct MinDensityTree {
  TreeSolution solution;
  int ell = 0;
  double density = 0.0;
};

MinDensityTree min_density_tree(const TreeInstance& t);

}  // namespace dstp
