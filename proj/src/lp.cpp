#include "dstp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "dstp/separator.hpp"

namespace dstp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr int kDegenerateSwitch = 50;

// Dense tableau; row `rows` holds the reduced costs, column `cols` the
// right-hand side (the objective cell holds minus the objective value).
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(int i, int j) { return t_[i * (cols_ + 1) + j]; }
  double at(int i, int j) const { return t_[i * (cols_ + 1) + j]; }
  double& rhs(int i) { return at(i, cols_); }
  double& cost(int j) { return at(rows_, j); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int pr, int pc) {
    double* prow = &t_[pr * (cols_ + 1)];
    const double inv = 1.0 / prow[pc];
    nz_.clear();
    for (int j = 0; j <= cols_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        nz_.push_back(j);
      }
    }
    prow[pc] = 1.0;
    for (int i = 0; i <= rows_; ++i) {
      if (i == pr) continue;
      double* row = &t_[i * (cols_ + 1)];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (int j : nz_) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

 private:
  int rows_, cols_;
  std::vector<double> t_;
  std::vector<int> basis_;
  std::vector<int> nz_;
};

int iteration_cap(int rows, int cols) { return 50000 + 50 * (rows + cols); }

// Primal simplex on a tableau with a feasible basis. Returns false when unbounded.
bool primal(Tableau& T, const std::vector<char>& blocked, int& iterations) {
  int degenerate = 0;
  bool bland = false;
  const int cap = iteration_cap(T.rows(), T.cols());
  for (;;) {
    int pc = -1;
    double best = -kPivotTol;
    for (int j = 0; j < T.cols(); ++j) {
      if (blocked[j]) continue;
      const double d = T.cost(j);
      if (d < -kPivotTol && (bland ? pc < 0 : d < best)) {
        pc = j;
        best = d;
      }
    }
    if (pc < 0) return true;
    int pr = -1;
    double ratio = kInf;
    for (int i = 0; i < T.rows(); ++i) {
      const double a = T.at(i, pc);
      if (a <= kPivotTol) continue;
      const double q = std::max(0.0, T.rhs(i)) / a;
      if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && pr >= 0 && T.basis()[i] < T.basis()[pr])) {
        ratio = q;
        pr = i;
      }
    }
    if (pr < 0) return false;
    degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
    if (degenerate > kDegenerateSwitch) bland = true;
    T.pivot(pr, pc);
    if (++iterations > cap) throw Error(ErrorKind::Infeasible, "simplex iteration limit reached");
  }
}

// Dual simplex from a dual feasible basis. Returns false when primal infeasible.
bool dual(Tableau& T, int& iterations) {
  int degenerate = 0;
  bool bland = false;
  const int cap = iteration_cap(T.rows(), T.cols());
  for (;;) {
    int pr = -1;
    double worst = -kFeasTol;
    for (int i = 0; i < T.rows(); ++i) {
      const double b = T.rhs(i);
      if (b >= -kFeasTol) continue;
      if (bland ? (pr < 0 || T.basis()[i] < T.basis()[pr]) : b < worst) {
        pr = i;
        worst = b;
      }
    }
    if (pr < 0) return true;
    int pc = -1;
    double ratio = kInf;
    for (int j = 0; j < T.cols(); ++j) {
      const double a = T.at(pr, j);
      if (a >= -kPivotTol) continue;
      const double q = std::max(0.0, T.cost(j)) / -a;
      if (q < ratio - 1e-12) {
        ratio = q;
        pc = j;
      }
    }
    if (pc < 0) return false;
    degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
    if (degenerate > kDegenerateSwitch) bland = true;
    T.pivot(pr, pc);
    if (++iterations > cap) throw Error(ErrorKind::Infeasible, "simplex iteration limit reached");
  }
}

LpSolution extract(Tableau& T, const LpProblem& p, int iterations) {
  LpSolution s;
  s.iterations = iterations;
  s.x.assign(p.num_vars, 0.0);
  for (int i = 0; i < T.rows(); ++i) {
    const int b = T.basis()[i];
    if (b < p.num_vars) s.x[b] = std::max(0.0, T.rhs(i));
  }
  for (int j = 0; j < p.num_vars; ++j) s.objective += p.cost[j] * s.x[j];
  return s;
}

LpSolution solve_dual(const LpProblem& p) {
  const int n = p.num_vars, m = static_cast<int>(p.rows.size());
  Tableau T(m, n + m);
  for (int i = 0; i < m; ++i) {
    for (auto [j, a] : p.rows[i].coef) T.at(i, j) -= a;
    T.at(i, n + i) = 1.0;
    T.rhs(i) = -p.rows[i].rhs;
    T.basis()[i] = n + i;
  }
  // Perturbed costs keep the dual from stalling on ties; the true costs are
  // restored afterwards and the primal simplex finishes from that basis.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(1.0, 2.0);
  for (int j = 0; j < n; ++j) T.cost(j) = p.cost[j] + 1e-7 * (1.0 + p.cost[j]) * jitter(rng);
  int iterations = 0;
  if (!dual(T, iterations)) {
    LpSolution s;
    s.status = LpStatus::Infeasible;
    s.iterations = iterations;
    return s;
  }
  for (int j = 0; j <= n + m; ++j) T.cost(j) = j < n ? p.cost[j] : 0.0;
  for (int i = 0; i < m; ++i) {
    const int b = T.basis()[i];
    const double cb = b < n ? p.cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j <= n + m; ++j) T.cost(j) -= cb * T.at(i, j);
  }
  std::vector<char> none(n + m + 1, 0);
  primal(T, none, iterations);
  return extract(T, p, iterations);
}

LpSolution solve_two_phase(const LpProblem& p) {
  const int n = p.num_vars, m = static_cast<int>(p.rows.size());
  std::vector<int> art_row;
  for (int i = 0; i < m; ++i) {
    if (p.rows[i].rhs > 0) art_row.push_back(i);
  }
  const int na = static_cast<int>(art_row.size());
  const int cols = n + m + na;
  Tableau T(m, cols);
  std::vector<char> artificial(cols + 1, 0);
  for (int i = 0; i < m; ++i) {
    const double sign = p.rows[i].rhs > 0 ? 1.0 : -1.0;
    for (auto [j, a] : p.rows[i].coef) T.at(i, j) += sign * a;
    T.at(i, n + i) = -sign;
    T.rhs(i) = sign * p.rows[i].rhs;
    T.basis()[i] = n + i;
  }
  for (int a = 0; a < na; ++a) {
    const int i = art_row[a], col = n + m + a;
    T.at(i, col) = 1.0;
    T.basis()[i] = col;
    artificial[col] = 1;
  }
  int iterations = 0;
  std::vector<char> none(cols + 1, 0);
  if (na > 0) {
    for (int i : art_row) {
      for (int j = 0; j <= cols; ++j) {
        if (!artificial[j]) T.at(m, j) -= T.at(i, j);
      }
    }
    primal(T, none, iterations);
    if (-T.rhs(m) > 1e-7) {
      LpSolution s;
      s.status = LpStatus::Infeasible;
      s.iterations = iterations;
      return s;
    }
    for (int i = 0; i < m; ++i) {
      if (!artificial[T.basis()[i]]) continue;
      for (int j = 0; j < n + m; ++j) {
        if (std::abs(T.at(i, j)) > kPivotTol) {
          T.pivot(i, j);
          break;
        }
      }
    }
  }
  for (int j = 0; j <= cols; ++j) T.at(m, j) = j < n ? p.cost[j] : 0.0;
  for (int i = 0; i < m; ++i) {
    const int b = T.basis()[i];
    const double cb = b < n ? p.cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j <= cols; ++j) T.at(m, j) -= cb * T.at(i, j);
  }
  if (!primal(T, artificial, iterations)) {
    LpSolution s;
    s.status = LpStatus::Unbounded;
    s.iterations = iterations;
    return s;
  }
  return extract(T, p, iterations);
}

}  // namespace

LpSolution simplex_solve(const LpProblem& p) {
  const bool nonnegative = std::all_of(p.cost.begin(), p.cost.end(), [](double c) { return c >= 0; });
  if (!nonnegative) return solve_two_phase(p);
  auto s = solve_dual(p);
  if (s.status == LpStatus::Optimal && max_violation(p, s.x) > 1e-6) s = solve_two_phase(p);
  return s;
}

CuttingPlaneLp::CuttingPlaneLp(std::vector<double> cost) {
  for (double c : cost) p_.add_var(c);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(1.0, 2.0);
  for (double c : p_.cost) perturbed_cost_.push_back(c + 1e-7 * (1.0 + c) * jitter(rng));
  rebuild();
}

void CuttingPlaneLp::rebuild() {
  cols_ = p_.num_vars;
  a_.clear();
  b_.clear();
  basis_.clear();
  d_ = perturbed_ ? perturbed_cost_ : p_.cost;
  for (const auto& row : p_.rows) append(row);
}

void CuttingPlaneLp::add_row(std::vector<std::pair<int, double>> coef, double rhs) {
  p_.add_row(std::move(coef), rhs);
  append(p_.rows.back());
}

// The row coef.x >= rhs enters as -coef.x + s = -rhs with s basic, then the
// current basic columns are eliminated from it.
void CuttingPlaneLp::append(const LpRow& row) {
  const int s = cols_++;
  for (auto& r : a_) r.push_back(0.0);
  d_.push_back(0.0);
  std::vector<double> nr(cols_, 0.0);
  for (auto [j, v] : row.coef) nr[j] -= v;
  nr[s] = 1.0;
  double nb = -row.rhs;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double f = nr[basis_[i]];
    if (f == 0.0) continue;
    const auto& ri = a_[i];
    for (int j = 0; j < cols_; ++j) {
      if (ri[j] != 0.0) nr[j] -= f * ri[j];
    }
    nr[basis_[i]] = 0.0;
    nb -= f * b_[i];
  }
  a_.push_back(std::move(nr));
  b_.push_back(nb);
  basis_.push_back(s);
}

void CuttingPlaneLp::pivot(int pr, int pc) {
  auto& prow = a_[pr];
  const double inv = 1.0 / prow[pc];
  std::vector<int> nz;
  for (int j = 0; j < cols_; ++j) {
    if (prow[j] != 0.0) {
      prow[j] *= inv;
      nz.push_back(j);
    }
  }
  prow[pc] = 1.0;
  b_[pr] *= inv;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (static_cast<int>(i) == pr) continue;
    auto& row = a_[i];
    const double f = row[pc];
    if (f == 0.0) continue;
    for (int j : nz) row[j] -= f * prow[j];
    row[pc] = 0.0;
    b_[i] -= f * b_[pr];
  }
  const double f = d_[pc];
  if (f != 0.0) {
    for (int j : nz) d_[j] -= f * prow[j];
    d_[pc] = 0.0;
  }
  basis_[pr] = pc;
}

bool CuttingPlaneLp::dual(int& iterations) {
  int degenerate = 0;
  bool bland = false;
  const int rows = static_cast<int>(a_.size());
  const int cap = iteration_cap(rows, cols_);
  for (;;) {
    int pr = -1;
    double worst = -kFeasTol;
    for (int i = 0; i < rows; ++i) {
      if (b_[i] >= -kFeasTol) continue;
      if (bland ? (pr < 0 || basis_[i] < basis_[pr]) : b_[i] < worst) {
        pr = i;
        worst = b_[i];
      }
    }
    if (pr < 0) return true;
    int pc = -1;
    double ratio = kInf;
    for (int j = 0; j < cols_; ++j) {
      const double v = a_[pr][j];
      if (v >= -kPivotTol) continue;
      const double q = std::max(0.0, d_[j]) / -v;
      if (q < ratio - 1e-12) {
        ratio = q;
        pc = j;
      }
    }
    if (pc < 0) return false;
    degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
    if (degenerate > kDegenerateSwitch) bland = true;
    pivot(pr, pc);
    if (++iterations > cap) throw Error(ErrorKind::Infeasible, "simplex iteration limit reached");
  }
}

void CuttingPlaneLp::primal(int& iterations) {
  int degenerate = 0;
  bool bland = false;
  const int rows = static_cast<int>(a_.size());
  const int cap = iterations + iteration_cap(rows, cols_);
  for (;;) {
    int pc = -1;
    double best = -kPivotTol;
    for (int j = 0; j < cols_; ++j) {
      if (d_[j] < -kPivotTol && (bland ? pc < 0 : d_[j] < best)) {
        pc = j;
        best = d_[j];
      }
    }
    if (pc < 0) return;
    int pr = -1;
    double ratio = kInf;
    for (int i = 0; i < rows; ++i) {
      const double v = a_[i][pc];
      if (v <= kPivotTol) continue;
      const double q = std::max(0.0, b_[i]) / v;
      if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && pr >= 0 && basis_[i] < basis_[pr])) {
        ratio = q;
        pr = i;
      }
    }
    if (pr < 0) return;
    degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
    if (degenerate > kDegenerateSwitch) bland = true;
    pivot(pr, pc);
    if (++iterations > cap) throw Error(ErrorKind::Infeasible, "simplex iteration limit reached");
  }
}

LpSolution CuttingPlaneLp::extract(int iterations) const {
  LpSolution s;
  s.iterations = iterations;
  s.x.assign(p_.num_vars, 0.0);
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (basis_[i] < p_.num_vars) s.x[basis_[i]] = std::max(0.0, b_[i]);
  }
  for (int j = 0; j < p_.num_vars; ++j) s.objective += p_.cost[j] * s.x[j];
  return s;
}

LpSolution CuttingPlaneLp::solve(bool exact) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    int iterations = 0;
    try {
      if (!dual(iterations)) {
        LpSolution s;
        s.status = LpStatus::Infeasible;
        s.iterations = iterations;
        return s;
      }
      if (exact && perturbed_) {
        perturbed_ = false;
        for (int j = 0; j < cols_; ++j) d_[j] = j < p_.num_vars ? p_.cost[j] : 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) {
          const int bi = basis_[i];
          const double cb = bi < p_.num_vars ? p_.cost[bi] : 0.0;
          if (cb == 0.0) continue;
          for (int j = 0; j < cols_; ++j) d_[j] -= cb * a_[i][j];
        }
        primal(iterations);
      }
      auto s = extract(iterations);
      if (max_violation(p_, s.x) <= 1e-6) return s;
    } catch (const Error&) {
    }
    // Accumulated round-off: start again from the slack basis.
    rebuild();
  }
  return simplex_solve(p_);
}

double max_violation(const LpProblem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const auto& row : p.rows) {
    double s = 0.0;
    for (auto [j, a] : row.coef) s += a * x[j];
    worst = std::max(worst, row.rhs - s);
  }
  return worst;
}

double max_flow(const EmbeddedDigraph& g, int s, int t, const std::vector<double>& cap,
                std::vector<char>* source_side) {
  struct E {
    int to;
    double cap;
  };
  const int n = g.num_vertices();
  std::vector<E> edges;
  std::vector<std::vector<int>> adj(n);
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc& arc = g.arc(a);
    if (arc.tail == arc.head || cap[a] <= 0) continue;
    adj[arc.tail].push_back(static_cast<int>(edges.size()));
    edges.push_back({arc.head, cap[a]});
    adj[arc.head].push_back(static_cast<int>(edges.size()));
    edges.push_back({arc.tail, 0.0});
  }
  constexpr double eps = 1e-12;
  std::vector<int> level(n), it(n);
  auto bfs = [&] {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int e : adj[v]) {
        if (edges[e].cap > eps && level[edges[e].to] < 0) {
          level[edges[e].to] = level[v] + 1;
          q.push(edges[e].to);
        }
      }
    }
    return level[t] >= 0;
  };
  auto dfs = [&](auto&& self, int v, double pushed) -> double {
    if (v == t) return pushed;
    for (int& i = it[v]; i < static_cast<int>(adj[v].size()); ++i) {
      const int e = adj[v][i];
      E& ed = edges[e];
      if (ed.cap <= eps || level[ed.to] != level[v] + 1) continue;
      const double got = self(self, ed.to, std::min(pushed, ed.cap));
      if (got > eps) {
        ed.cap -= got;
        edges[e ^ 1].cap += got;
        return got;
      }
    }
    return 0.0;
  };
  double flow = 0.0;
  if (s != t) {
    while (bfs()) {
      std::fill(it.begin(), it.end(), 0);
      while (const double f = dfs(dfs, s, kInf)) flow += f;
    }
  } else {
    flow = kInf;
  }
  if (source_side) {
    bfs();
    source_side->assign(n, 0);
    for (int v = 0; v < n; ++v) (*source_side)[v] = level[v] >= 0;
  }
  return flow;
}

namespace {

void require_reachable(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals) {
  const auto spt = shortest_path_tree(g, r);
  for (int t : terminals) {
    if (!spt.reachable(t)) {
      throw Error(ErrorKind::UnreachableTerminal, "terminal " + std::to_string(t) + " is unreachable");
    }
  }
}

std::vector<int> distinct_terminals(const std::vector<int>& terminals, int r) {
  std::set<int> s(terminals.begin(), terminals.end());
  s.erase(r);
  return {s.begin(), s.end()};
}

}  // namespace

LpProblem build_dst_lp(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals) {
  require_reachable(g, r, terminals);
  const auto ts = distinct_terminals(terminals, r);
  const int m = g.num_arcs(), n = g.num_vertices();
  LpProblem p;
  for (int a = 0; a < m; ++a) p.add_var(g.arc(a).cost);
  for (int t : ts) {
    const int base = p.num_vars;
    for (int a = 0; a < m; ++a) p.add_var(0.0);
    // Net inflow: at least one at t, nonnegative elsewhere.
    for (int v = 0; v < n; ++v) {
      if (v == r) continue;
      std::vector<std::pair<int, double>> row;
      for (int a : g.in_arcs(v)) {
        if (g.arc(a).tail != v) row.push_back({base + a, 1.0});
      }
      for (int a : g.out_arcs(v)) {
        if (g.arc(a).head != v) row.push_back({base + a, -1.0});
      }
      if (!row.empty() || v == t) p.add_row(std::move(row), v == t ? 1.0 : 0.0);
    }
    for (int a = 0; a < m; ++a) p.add_row({{a, 1.0}, {base + a, -1.0}}, 0.0);
  }
  return p;
}

CutCheck verify_cut_feasibility(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                                const std::vector<double>& x) {
  CutCheck out;
  for (int t : distinct_terminals(terminals, r)) {
    std::vector<char> side;
    const double f = max_flow(g, r, t, x, &side);
    if (f >= 1.0 - kCutTol) continue;
    out.feasible = false;
    out.terminal = t;
    out.value = f;
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (side[v]) out.side.push_back(v);
    }
    return out;
  }
  return out;
}

DstLpResult solve_dst_lp(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                         DstLpMode mode) {
  require_reachable(g, r, terminals);
  const int m = g.num_arcs();
  DstLpResult out;
  auto finish = [&](const std::vector<double>& x) {
    out.x.assign(x.begin(), x.begin() + m);
    out.objective = 0.0;
    for (int a = 0; a < m; ++a) out.objective += g.arc(a).cost * out.x[a];
  };
  if (mode == DstLpMode::Compact) {
    const auto sol = simplex_solve(build_dst_lp(g, r, terminals));
    if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::Infeasible, "DST LP has no optimum");
    out.rounds = 1;
    finish(sol.x);
    return out;
  }
  LpProblem p;
  for (int a = 0; a < m; ++a) p.add_var(g.arc(a).cost);
  const auto ts = distinct_terminals(terminals, r);
  for (int t : ts) {
    std::vector<std::pair<int, double>> row;
    for (int a : g.in_arcs(t)) {
      if (g.arc(a).tail != t) row.push_back({a, 1.0});
    }
    p.add_row(std::move(row), 1.0);
  }
  for (;;) {
    ++out.rounds;
    const auto sol = simplex_solve(p);
    if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::Infeasible, "DST LP has no optimum");
    int added = 0;
    for (int t : ts) {
      std::vector<char> side;
      if (max_flow(g, r, t, sol.x, &side) >= 1.0 - kCutTol) continue;
      std::vector<std::pair<int, double>> row;
      for (int a = 0; a < m; ++a) {
        if (side[g.arc(a).tail] && !side[g.arc(a).head]) row.push_back({a, 1.0});
      }
      p.add_row(std::move(row), 1.0);
      ++added;
    }
    if (added == 0) {
      finish(sol.x);
      return out;
    }
    out.cuts += added;
  }
}

ScaledLp scale_and_prune(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                         const std::vector<double>& x) {
  const auto ts = distinct_terminals(terminals, r);
  if (ts.size() < 2) throw Error(ErrorKind::KTooSmall, "scale_and_prune needs at least two terminals");
  ScaledLp out;
  const double lg = std::log2(static_cast<double>(ts.size()));
  double lp = 0.0;
  for (int a = 0; a < g.num_arcs(); ++a) lp += g.arc(a).cost * x[a];
  out.radius = 2.0 * lg * lp;
  out.factor = 1.0 + 1.0 / lg;
  const auto spt = shortest_path_tree(g, r);
  std::vector<char> keep(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    keep[v] = spt.dist[v] <= out.radius + kTol;
    if (!keep[v]) out.removed.push_back(v);
  }
  out.pruned = induced_subgraph(g, keep, r);
  out.x_bar_full.assign(g.num_arcs(), 0.0);
  for (int a = 0; a < g.num_arcs(); ++a) {
    if (keep[g.arc(a).tail] && keep[g.arc(a).head]) out.x_bar_full[a] = out.factor * x[a];
  }
  out.x_bar.assign(out.pruned.graph.num_arcs(), 0.0);
  for (int a = 0; a < out.pruned.graph.num_arcs(); ++a) {
    for (int pa : out.pruned.arc_parents[a]) out.x_bar[a] += out.x_bar_full[pa];
  }
  return out;
}

namespace {

struct Rounder {
  std::vector<char> chosen;  // over arcs of the input graph
  int depth = 0;
  int separator_calls = 0;

  void take(const std::vector<int>& top, int a) { chosen[top[a]] = 1; }

  void run(const EmbeddedDigraph& h, const std::vector<int>& top, int r, const std::vector<int>& ts,
           const std::vector<double>& x, int level) {
    depth = std::max(depth, level);
    if (ts.empty()) return;
    double lp = 0.0;
    for (int a = 0; a < h.num_arcs(); ++a) lp += h.arc(a).cost * x[a];
    if (static_cast<int>(ts.size()) <= kRoundLpBaseCase || lp <= 0) {
      const auto spt = shortest_path_tree(h, r);
      for (int t : ts) {
        for (int a : spt.path_arcs(t)) take(top, a);
      }
      return;
    }
    const double lg = std::log2(static_cast<double>(ts.size()));
    std::vector<double> xb(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) xb[a] = (1.0 + 1.0 / lg) * x[a];
    ++separator_calls;
    const auto res = prune_and_separate(h, r, ts, 2.0 * lg * lp);
    for (int a : res.separator_arcs) take(top, a);
    for (const auto& comp : res.components) {
      const auto& c = comp.sub;
      std::vector<int> ctop(c.graph.num_arcs());
      std::vector<double> cx(c.graph.num_arcs(), 0.0);
      for (int a = 0; a < c.graph.num_arcs(); ++a) {
        ctop[a] = top[c.arc_parents[a][0]];
        for (int pa : c.arc_parents[a]) cx[a] += xb[pa];
      }
      run(c.graph, ctop, c.root, comp.terminals, cx, level + 1);
    }
  }
};

}  // namespace

RoundLpResult round_lp(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                       const std::vector<double>& x) {
  const auto check = verify_cut_feasibility(g, r, terminals, x);
  if (!check.feasible) {
    throw Error(ErrorKind::InfeasibleX,
                "cut of capacity " + std::to_string(check.value) + " separates terminal " +
                    std::to_string(check.terminal));
  }
  const auto ts = distinct_terminals(terminals, r);
  Rounder rd;
  rd.chosen.assign(g.num_arcs(), 0);
  std::vector<int> top(g.num_arcs());
  for (int a = 0; a < g.num_arcs(); ++a) top[a] = a;
  rd.run(g, top, r, ts, x, 0);
  std::vector<int> arcs;
  for (int a = 0; a < g.num_arcs(); ++a) {
    if (rd.chosen[a]) arcs.push_back(a);
  }
  RoundLpResult out;
  const int roots[] = {r};
  out.arcs = extract_branching(g, arcs, roots, ts, true);
  std::sort(out.arcs.begin(), out.arcs.end());
  out.cost = arc_set_cost(g, out.arcs);
  out.depth = rd.depth;
  out.separator_calls = rd.separator_calls;
  return out;
}

}  // namespace dstp
