#pragma once

#include <utility>
#include <vector>

#include "dstp/graph.hpp"
#include "dstp/instance.hpp"

namespace dstp {

/// min cost.x subject to every row coef.x >= rhs and x >= 0.
struct LpRow {
  std::vector<std::pair<int, double>> coef;
  double rhs = 0.0;
};

struct LpProblem {
  int num_vars = 0;
  std::vector<double> cost;
  std::vector<LpRow> rows;

  int add_var(double c) {
    cost.push_back(c);
    return num_vars++;
  }
  void add_row(std::vector<std::pair<int, double>> coef, double rhs) {
    rows.push_back({std::move(coef), rhs});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

LpSolution simplex_solve(const LpProblem& p);

/// Row generation for programs with nonnegative costs: rows are appended to
/// the optimal tableau and the dual simplex continues from the old basis.
class CuttingPlaneLp {
 public:
  explicit CuttingPlaneLp(std::vector<double> cost);

  void add_row(std::vector<std::pair<int, double>> coef, double rhs);
  /// Without `exact` the optimum is for slightly perturbed costs, which is
  /// enough to drive separation; the exact solve restores the true costs.
  LpSolution solve(bool exact);
  const LpProblem& problem() const { return p_; }

 private:
  void rebuild();
  void append(const LpRow& row);
  void pivot(int pr, int pc);
  bool dual(int& iterations);
  void primal(int& iterations);
  LpSolution extract(int iterations) const;

  LpProblem p_;
  std::vector<double> perturbed_cost_;
  bool perturbed_ = true;
  int cols_ = 0;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<double> d_;
  std::vector<int> basis_;
};

/// Largest amount by which x violates a row or a sign constraint.
double max_violation(const LpProblem& p, const std::vector<double>& x);

/// Max flow from s to t with arc capacities `cap`. When `source_side` is
/// given it receives the vertices reachable from s in the final residual graph.
double max_flow(const EmbeddedDigraph& g, int s, int t, const std::vector<double>& cap,
                std::vector<char>* source_side = nullptr);

/// Compact flow form of the cut relaxation: variables 0..m-1 are x_e, then
/// one flow variable per (terminal, arc).
LpProblem build_dst_lp(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals);

enum class DstLpMode { Compact, CuttingPlane };

struct DstLpResult {
  std::vector<double> x;  // per arc
  double objective = 0.0;
  int rounds = 0;
  int cuts = 0;
};

DstLpResult solve_dst_lp(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                         DstLpMode mode = DstLpMode::Compact);

inline constexpr double kCutTol = 1e-7;

struct CutCheck {
  bool feasible = true;
  int terminal = -1;       // first violated terminal
  std::vector<int> side;   // U: contains r, misses the terminal
  double value = 0.0;      // capacity of the violated cut
};

CutCheck verify_cut_feasibility(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                                const std::vector<double>& x);

struct ScaledLp {
  DerivedGraph pruned;            // g without the far vertices
  std::vector<double> x_bar;      // per arc of pruned.graph
  std::vector<double> x_bar_full; // per arc of g, zero on removed arcs
  std::vector<int> removed;       // far vertices of g
  double radius = 0.0;
  double factor = 1.0;
};

ScaledLp scale_and_prune(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                         const std::vector<double>& x);

inline constexpr int kRoundLpBaseCase = 6;

struct RoundLpResult {
  std::vector<int> arcs;  // arc indices of g, an out-tree from r
  double cost = 0.0;
  int depth = 0;
  int separator_calls = 0;
};

RoundLpResult round_lp(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                       const std::vector<double>& x);

}  // namespace dstp
