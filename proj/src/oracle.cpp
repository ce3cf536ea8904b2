#include "dstp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <queue>
#include <set>

namespace dstp {

SteinerTable::SteinerTable(const EmbeddedDigraph& g, std::vector<int> terminals)
    : g_(&g), terminals_(std::move(terminals)), n_(g.num_vertices()) {
  std::sort(terminals_.begin(), terminals_.end());
  terminals_.erase(std::unique(terminals_.begin(), terminals_.end()), terminals_.end());
  if (num_terminals() > kOracleMaxTerminals) {
    throw Error(ErrorKind::TooManyTerminals, "the exact solver handles at most " +
                                                 std::to_string(kOracleMaxTerminals) + " terminals");
  }
  const unsigned states = full() + 1;
  dp_.assign(static_cast<std::size_t>(states) * n_, kInf);
  choice_.assign(dp_.size(), 0);
  for (int v = 0; v < n_; ++v) dp_[v] = 0.0;
  using Item = std::pair<double, int>;
  for (unsigned x = 1; x < states; ++x) {
    double* d = &dp_[static_cast<std::size_t>(x) * n_];
    int* ch = &choice_[static_cast<std::size_t>(x) * n_];
    if ((x & (x - 1)) == 0) {
      d[terminals_[std::countr_zero(x)]] = 0.0;
    } else {
      const unsigned low = x & -x;
      for (unsigned y = (x - 1) & x; y > 0; y = (y - 1) & x) {
        if (!(y & low)) continue;
        const double* a = &dp_[static_cast<std::size_t>(y) * n_];
        const double* b = &dp_[static_cast<std::size_t>(x ^ y) * n_];
        for (int v = 0; v < n_; ++v) {
          const double val = a[v] + b[v];
          if (val < d[v]) {
            d[v] = val;
            ch[v] = static_cast<int>(y);
          }
        }
      }
    }
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int v = 0; v < n_; ++v) {
      if (d[v] < kInf) pq.push({d[v], v});
    }
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > d[v]) continue;
      for (int a : g.in_arcs(v)) {
        const int u = g.arc(a).tail;
        const double val = dv + g.arc(a).cost;
        if (val < d[u]) {
          d[u] = val;
          ch[u] = -(a + 1);
          pq.push({val, u});
        }
      }
    }
  }
}

std::vector<int> SteinerTable::arcs(unsigned mask, int v) const {
  std::set<int> out;
  std::vector<std::pair<unsigned, int>> stack{{mask, v}};
  while (!stack.empty()) {
    auto [x, u] = stack.back();
    stack.pop_back();
    if (x == 0) continue;
    const int c = choice_[static_cast<std::size_t>(x) * n_ + u];
    if (c > 0) {
      stack.push_back({static_cast<unsigned>(c), u});
      stack.push_back({x ^ static_cast<unsigned>(c), u});
    } else if (c < 0) {
      const int a = -c - 1;
      out.insert(a);
      stack.push_back({x, g_->arc(a).head});
    }
  }
  return {out.begin(), out.end()};
}

std::vector<int> SteinerTable::members(unsigned mask) const {
  std::vector<int> out;
  for (int i = 0; i < num_terminals(); ++i) {
    if (mask >> i & 1) out.push_back(terminals_[i]);
  }
  return out;
}

bool SteinerTable::monotone() const {
  for (unsigned x = 1; x <= full(); ++x) {
    for (int i = 0; i < num_terminals(); ++i) {
      if (!(x >> i & 1)) continue;
      for (int v = 0; v < n_; ++v) {
        if (cost(x ^ (1u << i), v) > cost(x, v) + kTol) return false;
      }
    }
  }
  return true;
}

long coverage_value(const ProblemInstance& inst, const std::vector<int>& covered) {
  std::set<int> in(covered.begin(), covered.end());
  switch (inst.variant) {
    case Variant::DST: {
      long c = 0;
      for (int t : inst.terminals) c += in.count(t);
      return c;
    }
    case Variant::DGST: {
      long c = 0;
      for (const auto& g : inst.groups) {
        c += std::any_of(g.begin(), g.end(), [&](int v) { return in.count(v) > 0; });
      }
      return c;
    }
    case Variant::DCST: {
      long c = 0;
      for (std::size_t i = 0; i < inst.groups.size(); ++i) {
        long hit = 0;
        for (int v : inst.groups[i]) hit += in.count(v);
        c += std::min<long>(hit, inst.requirements[i]);
      }
      return c;
    }
    case Variant::DPST: return inst.polymatroid ? inst.polymatroid->value(covered) : 0;
  }
  return 0;
}

bool satisfies(const ProblemInstance& inst, const std::vector<int>& covered) {
  return coverage_value(inst, covered) >= inst.k();
}

namespace {

// Best tree per terminal subset when each part may hang off any root.
class RootedSubsets {
 public:
  RootedSubsets(const SteinerTable& t, const std::vector<int>& roots) : t_(t) {
    const unsigned states = t.full() + 1;
    single_.assign(states, kInf);
    root_of_.assign(states, -1);
    for (unsigned x = 0; x < states; ++x) {
      for (int r : roots) {
        if (t.cost(x, r) < single_[x]) {
          single_[x] = t.cost(x, r);
          root_of_[x] = r;
        }
      }
    }
    best_ = single_;
    split_.assign(states, 0);
    if (roots.size() > 1) {
      for (unsigned x = 1; x < states; ++x) {
        const unsigned low = x & -x;
        for (unsigned y = (x - 1) & x; y > 0; y = (y - 1) & x) {
          if (!(y & low)) continue;
          const double val = single_[y] + best_[x ^ y];
          if (val < best_[x] - 1e-12) {
            best_[x] = val;
            split_[x] = y;
          }
        }
      }
    }
  }

  double cost(unsigned x) const { return best_[x]; }

  std::vector<int> arcs(unsigned x) const {
    std::set<int> out;
    while (x) {
      const unsigned y = split_[x] ? split_[x] : x;
      for (int a : t_.arcs(y, root_of_[y])) out.insert(a);
      x ^= y;
    }
    return {out.begin(), out.end()};
  }

 private:
  const SteinerTable& t_;
  std::vector<double> single_, best_;
  std::vector<int> root_of_;
  std::vector<unsigned> split_;
};

OracleSolution finish(const EmbeddedDigraph& g, const std::vector<int>& roots, const SteinerTable& t,
                      const RootedSubsets& rs, unsigned x) {
  OracleSolution s;
  s.terminals = t.members(x);
  s.arcs = extract_branching(g, rs.arcs(x), roots, s.terminals, true);
  s.cost = arc_set_cost(g, s.arcs);
  s.objective = s.cost;
  return s;
}

OracleSolution best_feasible(const ProblemInstance& inst, const std::vector<int>& roots) {
  SteinerTable table(inst.graph, inst.terminal_set());
  RootedSubsets rs(table, roots);
  unsigned best = 0;
  double best_cost = kInf;
  for (unsigned x = 0; x <= table.full(); ++x) {
    if (rs.cost(x) < best_cost - 1e-12 && satisfies(inst, table.members(x))) {
      best_cost = rs.cost(x);
      best = x;
    }
  }
  if (best_cost == kInf) throw Error(ErrorKind::Infeasible, "no tree satisfies the requirements");
  auto s = finish(inst.graph, roots, table, rs, best);
  const long k = coverage_value(inst, s.terminals);
  s.density = k > 0 ? s.cost / k : kInf;
  return s;
}

}  // namespace

OracleSolution exact_dst(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals) {
  SteinerTable table(g, terminals);
  for (int i = 0; i < table.num_terminals(); ++i) {
    if (table.cost(1u << i, r) == kInf) {
      throw Error(ErrorKind::UnreachableTerminal,
                  "terminal " + std::to_string(table.terminals()[i]) + " is unreachable");
    }
  }
  const std::vector<int> roots{r};
  RootedSubsets rs(table, roots);
  auto s = finish(g, roots, table, rs, table.full());
  if (!s.terminals.empty()) s.density = s.cost / static_cast<double>(s.terminals.size());
  return s;
}

OracleSolution exact_variant(const ProblemInstance& inst) { return best_feasible(inst, {inst.root()}); }

OracleSolution exact_multiroot(const ProblemInstance& inst) { return best_feasible(inst, inst.roots); }

OracleSolution exact_min_density(const ProblemInstance& inst) {
  SteinerTable table(inst.graph, inst.terminal_set());
  RootedSubsets rs(table, inst.roots);
  unsigned best = 0;
  double best_density = kInf;
  for (unsigned x = 1; x <= table.full(); ++x) {
    if (rs.cost(x) == kInf) continue;
    const long k = coverage_value(inst, table.members(x));
    if (k <= 0) continue;
    const double d = rs.cost(x) / static_cast<double>(k);
    if (d < best_density - 1e-12) {
      best_density = d;
      best = x;
    }
  }
  if (best_density == kInf) throw Error(ErrorKind::NoReachableGroup, "no terminal is reachable");
  auto s = finish(inst.graph, inst.roots, table, rs, best);
  s.density = best_density;
  return s;
}

OracleSolution exact_ell(const ProblemInstance& inst, int ell) {
  SteinerTable table(inst.graph, inst.terminal_set());
  if (ell < 1 || ell > table.num_terminals()) {
    throw Error(ErrorKind::EllOutOfRange, "ell must lie in [1, " + std::to_string(table.num_terminals()) + "]");
  }
  const std::vector<int> roots{inst.root()};
  RootedSubsets rs(table, roots);
  unsigned best = 0;
  double best_cost = kInf;
  for (unsigned x = 1; x <= table.full(); ++x) {
    if (std::popcount(x) >= ell && rs.cost(x) < best_cost - 1e-12) {
      best_cost = rs.cost(x);
      best = x;
    }
  }
  if (best_cost == kInf) throw Error(ErrorKind::Infeasible, "fewer than ell terminals are reachable");
  auto s = finish(inst.graph, roots, table, rs, best);
  s.density = s.cost / std::popcount(best);
  return s;
}

OracleSolution exact_prize_collecting(const ProblemInstance& inst) {
  SteinerTable table(inst.graph, inst.terminal_set());
  const std::vector<int> roots{inst.root()};
  RootedSubsets rs(table, roots);
  auto prize = [&](int v) {
    auto it = inst.prizes.find(v);
    return it == inst.prizes.end() ? 0.0 : it->second;
  };
  unsigned best = 0;
  double best_obj = kInf;
  for (unsigned x = 0; x <= table.full(); ++x) {
    if (rs.cost(x) == kInf) continue;
    double obj = rs.cost(x);
    for (int i = 0; i < table.num_terminals(); ++i) {
      if (!(x >> i & 1)) obj += prize(table.terminals()[i]);
    }
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best = x;
    }
  }
  auto s = finish(inst.graph, roots, table, rs, best);
  s.objective = best_obj;
  return s;
}

}  // namespace dstp
