#pragma once

#include <vector>

#include "dstp/graph.hpp"
#include "dstp/instance.hpp"

namespace dstp {

inline constexpr int kOracleMaxTerminals = 14;

/// table[X][v]: cheapest out-tree rooted at v reaching every terminal of X.
class SteinerTable {
 public:
  SteinerTable(const EmbeddedDigraph& g, std::vector<int> terminals);

  int num_terminals() const { return static_cast<int>(terminals_.size()); }
  const std::vector<int>& terminals() const { return terminals_; }
  unsigned full() const { return (1u << terminals_.size()) - 1; }
  double cost(unsigned mask, int v) const { return dp_[mask * n_ + v]; }
  /// Arc indices of an optimal tree for (mask, v), deduplicated.
  std::vector<int> arcs(unsigned mask, int v) const;
  /// Terminals of a mask as vertex ids.
  std::vector<int> members(unsigned mask) const;
  /// Adding terminals never makes a tree cheaper.
  bool monotone() const;

 private:
  const EmbeddedDigraph* g_;
  std::vector<int> terminals_;
  int n_ = 0;
  std::vector<double> dp_;
  std::vector<int> choice_;  // > 0 split mask, < 0 arc -(a+1), 0 leaf
};

struct OracleSolution {
  double cost = kInf;       // arc cost
  double objective = kInf;  // cost plus foregone prizes for prize-collecting, else cost
  std::vector<int> arcs;
  std::vector<int> terminals;  // the terminal subset the tree was built for
  double density = kInf;
};

/// Objective value k(X) of a covered terminal set: terminals, groups hit,
/// truncated requirement sum or f(X), matching ProblemInstance::k().
long coverage_value(const ProblemInstance& inst, const std::vector<int>& covered);
/// Whether `covered` satisfies the variant's constraints.
bool satisfies(const ProblemInstance& inst, const std::vector<int>& covered);

OracleSolution exact_dst(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals);
/// Single root (the first one) for every variant.
OracleSolution exact_variant(const ProblemInstance& inst);
/// All roots, as if a super-root had zero-cost arcs to each of them.
OracleSolution exact_multiroot(const ProblemInstance& inst);
/// Minimum of cost / coverage_value over nonempty covered sets, all roots.
OracleSolution exact_min_density(const ProblemInstance& inst);
/// Cheapest tree from the first root covering at least ell terminals.
OracleSolution exact_ell(const ProblemInstance& inst, int ell);
/// Cost plus prizes of the terminals left out, first root.
OracleSolution exact_prize_collecting(const ProblemInstance& inst);

}  // namespace dstp
