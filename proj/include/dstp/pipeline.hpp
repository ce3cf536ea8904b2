#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dstp/instance.hpp"
#include "dstp/separator.hpp"

namespace dstp {

struct SolveOptions {
  double gamma = 0.0;  // in input cost units; <= 0 means c(E)
  std::uint64_t seed = 1;
  int exact_tree_max_k = 12;  // embedding route solves the tree exactly up to this many terminals
  double greedy_epsilon = 0.5;  // accepted for the polymatroid route; the greedy has no budget schedule
};

struct SolutionReport {
  ArcSetSolution solution;
  long value = 0;  // k(F): terminals, groups, truncated requirements or f
  double density = std::numeric_limits<double>::infinity();
  double lp_value = std::numeric_limits<double>::quiet_NaN();
  double oracle_opt = std::numeric_limits<double>::quiet_NaN();
  nlohmann::json stats = nlohmann::json::object();

  double cost() const { return solution.cost; }
  double ratio() const { return solution.cost / oracle_opt; }
  nlohmann::json to_json(const ProblemInstance& inst) const;
};

struct FeasibilityCheck {
  bool feasible = false;
  long value = 0;
  std::vector<int> covered;
};

/// Reachability from the roots through `arcs` plus coverage counting on the
/// original terminals.
FeasibilityCheck check_feasibility(const ProblemInstance& inst, const std::vector<int>& arcs);

/// 2 * paths * (log2 k + 1).
inline double dst_ratio_bound(double k, int paths = kMaxSeparatorPaths) {
  return 2.0 * paths * (std::log2(std::max(k, 1.0)) + 1.0);
}

SolutionReport solve_dst_direct(const ProblemInstance& inst, const SolveOptions& opt = {});
SolutionReport solve_dst_via_embedding(const ProblemInstance& inst, const SolveOptions& opt = {});
SolutionReport solve_dst_lp_round(const ProblemInstance& inst, const SolveOptions& opt = {});
SolutionReport solve_dgst(const ProblemInstance& inst, const SolveOptions& opt = {});
SolutionReport solve_dcst(const ProblemInstance& inst, const SolveOptions& opt = {});
SolutionReport solve_dpst(const ProblemInstance& inst, const SolveOptions& opt = {});

/// Minimum-density tree from the first root over the instance's terminals.
SolutionReport min_density_planar(const ProblemInstance& inst, const SolveOptions& opt = {});
SolutionReport ell_dst_planar(const ProblemInstance& inst, int ell, const SolveOptions& opt = {});
/// The report's density field holds the objective: cost plus prizes of uncovered terminals.
SolutionReport pc_dst_planar(const ProblemInstance& inst, const SolveOptions& opt = {});

/// Greedy density loop over all roots; stats["iterations"] counts the phases.
SolutionReport solve_multiroot(const ProblemInstance& inst, const SolveOptions& opt = {});

/// direct | embed | lp-round | dgst | dcst | dpst | multiroot | min-density
SolutionReport solve(const ProblemInstance& inst, const std::string& algo, const SolveOptions& opt = {});

}  // namespace dstp
