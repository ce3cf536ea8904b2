// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "dstp/embed.hpp"
#include "dstp/gen.hpp"
#include "dstp/lp.hpp"
#include "dstp/oracle.hpp"
#include "dstp/pipeline.hpp"
#include "dstp/separator.hpp"
#include "dstp/tree.hpp"

using namespace dstp;

namespace {

class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (fails_++ == 0) first_ = what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool pass() const { return fails_ == 0 && checks_ > 0; }
  std::string summary() const {
    std::ostringstream os;
    os << checks_ << " checks";
    if (fails_ > 0) os << ", " << fails_ << " failed, first: " << first_;
    if (!notes_.empty()) os << "; " << notes_;
    return os.str();
  }

 private:
  long checks_ = 0, fails_ = 0;
  std::string first_, notes_;
};

bool le(double a, double b) { return a <= b + 1e-9 * std::max(1.0, std::abs(b)); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double log_factor(double k) { return std::log2(std::max(k, 1.0)) + 1.0; }

ProblemInstance planar(std::uint64_t seed, int k, Variant v = Variant::DST, int roots = 1, int max_cost = 10) {
  GenSpec s;
  s.kind = seed % 3 == 0 ? "triangulated-disk" : seed % 3 == 1 ? "grid" : "series-parallel";
  s.rows = 4 + seed % 3;
  s.cols = 4 + seed % 2;
  s.n = 14 + seed % 8;
  s.k = k;
  s.variant = v;
  s.roots = roots;
  s.groups = 2 + seed % 3;
  s.group_size = 3;
  s.max_requirement = 2;
  s.polymatroid = seed % 3 == 0 ? "modular" : seed % 3 == 1 ? "coverage" : "truncated_partition";
  s.max_cost = max_cost;
  s.seed = seed;
  return generate(s);
}

std::string tag(const char* what, std::uint64_t seed) { return std::string(what) + " seed " + std::to_string(seed); }

Tally separator_balance() {
  Tally t;
  int over_three = 0, three_path_cost = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    GenSpec s;
    s.kind = seed % 3 == 0 ? "triangulated-disk" : seed % 3 == 1 ? "grid" : "series-parallel";
    s.rows = 6 + seed % 15;
    s.cols = 6 + (seed / 3) % 15;
    s.n = 40 + (seed * 7) % 361;
    s.k = 1 + seed % 16;
    s.seed = 10'000 + seed;
    const auto inst = generate(s);
    const auto& g = inst.graph;
    t.check(g.num_vertices() <= 400, tag("size", seed));
    const auto spt = shortest_path_tree(g, inst.root());
    double gamma = 1;
    for (int v : inst.terminals) gamma = std::max(gamma, spt.dist[v]);
    const auto res = prune_and_separate(g, inst.root(), inst.terminals, gamma);
    const double k = static_cast<double>(inst.terminals.size());
    t.check(res.pruned_terminals.empty(), tag("pruned", seed));
    for (const auto& c : res.components) t.check(2.0 * c.terminals.size() <= k, tag("component weight", seed));
    t.check(res.paths.size() <= static_cast<std::size_t>(kMaxSeparatorPaths), tag("path count", seed));
    double sum = 0;
    for (const auto& p : res.paths) {
      const double c = arc_set_cost(g, p);
      sum += c;
      t.check(!p.empty() && g.arc(p.front()).tail == inst.root(), tag("path starts at root", seed));
      for (std::size_t i = 1; i < p.size(); ++i) t.check(g.arc(p[i - 1]).head == g.arc(p[i]).tail, tag("path chain", seed));
      t.check(!p.empty() && c == spt.dist[g.arc(p.back()).head], tag("shortest dipath", seed));
    }
    t.check(sum == res.path_cost_sum, tag("path cost sum", seed));
    t.check(sum <= kMaxSeparatorPaths * gamma, tag("sum of path costs <= 4 gamma", seed));
    over_three += res.paths.size() > 3;
    three_path_cost += sum <= 3 * gamma;
  }
  t.note(std::to_string(over_three) + "/200 used more than 3 paths");
  t.note(std::to_string(three_path_cost) + "/200 within 3 gamma");
  return t;
}

void embed_invariants(Tally& t, const EmbedTree& e, std::uint64_t seed) {
  std::set<int> seen;
  const double k = e.k, gamma = e.gamma;
  for (const auto& [term, cs] : e.copies) {
    t.check(cs.size() <= k * gamma, tag("|M(t)| <= k gamma", seed));
    for (int c : cs) {
      t.check(seen.insert(c).second, tag("M disjoint", seed));
      t.check(e.nodes[c].kind == NodeKind::Copy && e.nodes[c].terminal == term, tag("copy node", seed));
    }
  }
  t.check(seen.size() == e.copy_nodes().size(), tag("copies accounted", seed));
  t.check(e.non_copy_count() <= k * k * k * gamma, tag("non-copy nodes <= k^3 gamma", seed));
}

struct EmbedCase {
  ProblemInstance inst;
  double gamma;
};

EmbedCase embed_case(std::uint64_t seed) {
  const double gammas[] = {8, 16, 64};
  GenSpec s;
  s.kind = seed % 3 == 0 ? "triangulated-disk" : "grid";
  s.rows = 5 + seed % 3;
  s.cols = 5 + seed % 2;
  s.k = 1 + seed % 8;
  s.max_cost = 3;
  s.seed = 20'000 + seed;
  return {generate(s), gammas[seed % 3]};
}

Tally embedding() {
  Tally t;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto [inst, gamma] = embed_case(seed);
    const auto u = tree_emb(inst.graph, inst.root(), inst.terminals, gamma);
    embed_invariants(t, u, seed);
    if (u.k > 0) t.check(u.height() <= 2 * std::log2(u.k * gamma) + 2, tag("unreduced height", seed));
    const auto h = tree_emb_height_reduced(inst.graph, inst.root(), inst.terminals, gamma);
    embed_invariants(t, h, seed);
    t.check(h.height() <= 2 * (std::ceil(std::log2(std::max(1, h.k))) + 1) + 2, tag("reduced height", seed));
  }
  return t;
}

Tally projection_to_graph() {
  Tally t;
  std::mt19937 rng(31);
  int instances = 0;
  for (std::uint64_t seed = 1; instances < 20; ++seed) {
    const auto [inst, gamma] = embed_case(seed);
    const auto e = tree_emb(inst.graph, inst.root(), inst.terminals, gamma);
    if (e.empty()) continue;
    ++instances;
    for (int rep = 0; rep < 200; ++rep) {
      std::bernoulli_distribution coin(0.4 + 0.5 * rep / 200.0);
      std::vector<int> sub{e.root};
      for (std::size_t i = 0; i < sub.size(); ++i) {
        for (int c : e.nodes[sub[i]].children) {
          if (coin(rng)) sub.push_back(c);
        }
      }
      const auto sol = project_to_graph(e, inst.graph, sub, inst.root());
      t.check(sol.cost <= subtree_cost(e, sub), tag("c(G') <= c_T(T')", seed));
      t.check(check_out_tree(inst.graph, sol.arcs, inst.root()).ok, tag("out-tree", seed));
      std::set<int> copied;
      for (int v : sub) {
        if (e.nodes[v].kind == NodeKind::Copy) copied.insert(e.nodes[v].terminal);
      }
      t.check(std::vector<int>(copied.begin(), copied.end()) == sol.covered, tag("terminal preservation", seed));
    }
  }
  return t;
}

Tally projection_from_graph() {
  Tally t;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = planar(30'000 + seed, 1 + seed % 6);
    const auto opt = exact_dst(inst.graph, inst.root(), inst.terminals);
    const double k = static_cast<double>(inst.terminals.size());
    const double gamma = std::max(1.0, opt.cost);
    for (bool reduced : {false, true}) {
      const auto e = reduced ? tree_emb_height_reduced(inst.graph, inst.root(), inst.terminals, gamma)
                             : tree_emb(inst.graph, inst.root(), inst.terminals, gamma);
      const auto proj = project_from_graph(e, inst.graph, opt.arcs, inst.root());
      t.check(le(proj.cost, 2 * kMaxSeparatorPaths * log_factor(k) * opt.cost), tag("c_T(T') bound", seed));
      if (opt.cost > 0) worst = std::max(worst, proj.cost / opt.cost);
      std::set<int> copied;
      for (int v : proj.nodes) {
        if (e.nodes[v].kind == NodeKind::Copy) copied.insert(e.nodes[v].terminal);
      }
      for (int v : inst.terminals) t.check(copied.count(v) == 1, tag("covers OPT terminals", seed));
    }
  }
  t.note("max c_T(T')/OPT = " + fmt("%.3f", worst) + " against 8(log2 k+1); three-path constant 6");
  return t;
}

Tally round_lp_criterion() {
  Tally t;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GenSpec s;
    s.kind = seed % 2 ? "grid" : "triangulated-disk";
    s.rows = 5;
    s.cols = 5 + seed % 2;
    s.k = 7 + seed % 6;
    s.seed = 40'000 + seed;
    const auto inst = generate(s);
    const auto& g = inst.graph;
    const double k = static_cast<double>(inst.terminals.size());
    const auto lp = solve_dst_lp(g, inst.root(), inst.terminals, DstLpMode::CuttingPlane);
    const auto sp = scale_and_prune(g, inst.root(), inst.terminals, lp.x);
    t.check(verify_cut_feasibility(g, inst.root(), inst.terminals, sp.x_bar_full).feasible,
            tag("scale_and_prune cut-feasible", seed));
    const auto r = round_lp(g, inst.root(), inst.terminals, lp.x);
    t.check(check_out_tree(g, r.arcs, inst.root()).ok, tag("RoundLP out-tree", seed));
    t.check(evaluate_solution(inst, r.arcs).covered.size() == inst.terminals.size(), tag("RoundLP covers", seed));
    t.check(le(r.cost, 2 * kMaxSeparatorPaths * std::pow(log_factor(k), 2) * lp.objective), tag("RoundLP cost", seed));
    if (lp.objective > 0) worst = std::max(worst, r.cost / lp.objective);
    const double opt = exact_dst(g, inst.root(), inst.terminals).cost;
    t.check(lp.objective <= opt + 1e-6, tag("LP <= OPT", seed));
  }
  t.note("max RoundLP/LP = " + fmt("%.3f", worst));
  return t;
}

Tally end_to_end() {
  Tally t;
  double worst_d = 0, worst_e = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = planar(50'000 + seed, 1 + seed % 6);
    const double k = static_cast<double>(inst.terminals.size());
    const double opt = exact_dst(inst.graph, inst.root(), inst.terminals).cost;
    SolveOptions at_opt;
    at_opt.gamma = opt;
    const auto d = solve_dst_direct(inst, at_opt);
    const auto e = solve_dst_via_embedding(inst, at_opt);
    const double bound = dst_ratio_bound(k);
    t.check(check_feasibility(inst, d.solution.arcs).feasible, tag("direct feasible at OPT", seed));
    t.check(check_feasibility(inst, e.solution.arcs).feasible, tag("embed feasible at OPT", seed));
    t.check(le(d.cost(), bound * opt), tag("direct ratio", seed));
    t.check(le(e.cost(), bound * opt), tag("embed ratio", seed));
    if (opt > 0) {
      worst_d = std::max(worst_d, d.cost() / opt);
      worst_e = std::max(worst_e, e.cost() / opt);
    }
    t.check(check_feasibility(inst, solve_dst_direct(inst).solution.arcs).feasible, tag("direct feasible at c(E)", seed));
    t.check(check_feasibility(inst, solve_dst_via_embedding(inst).solution.arcs).feasible,
            tag("embed feasible at c(E)", seed));
  }
  t.note("max ratio: direct " + fmt("%.3f", worst_d) + ", embed " + fmt("%.3f", worst_e) +
         " against 8(log2 k+1); three-path constant 6");
  return t;
}

TreeInstance random_tree(std::mt19937& rng, int n, bool exclusive) {
  std::uniform_int_distribution<int> cost(0, 6);
  std::bernoulli_distribution coin(0.5);
  TreeInstance t = tree_from_parents({-1}, {0.0});
  t.prize.assign(1, 0.0);
  int next_label = 0;
  for (int v = 1; v < n; ++v) {
    const int p = std::uniform_int_distribution<int>(0, v - 1)(rng);
    t.add_node(p, cost(rng), coin(rng) ? next_label++ : -1);
    t.prize[v] = t.label[v] >= 0 ? cost(rng) + 0.5 : 0.0;
  }
  if (exclusive) {
    for (int v = 0; v < n; ++v) t.exclusive[v] = coin(rng) && coin(rng);
  }
  return t;
}

// Every root-containing subtree that uses at most one child below an exclusive node.
template <class Visit>
void for_each_subtree(const TreeInstance& t, Visit visit) {
  const int n = t.size();
  for (long mask = 0; mask < (1L << n); ++mask) {
    if (!(mask >> t.root & 1)) continue;
    bool ok = true;
    std::vector<int> used(n, 0);
    for (int v = 0; v < n && ok; ++v) {
      if (!(mask >> v & 1) || v == t.root) continue;
      if (!(mask >> t.parent[v] & 1)) ok = false;
      ++used[t.parent[v]];
    }
    for (int v = 0; v < n && ok; ++v) ok = !(t.exclusive[v] && used[v] > 1);
    if (ok) visit(mask);
  }
}

Tally tree_dps() {
  Tally t;
  std::mt19937 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    const auto tree = random_tree(rng, n, trial % 2 == 1);
    const int labels = tree.num_labels();
    std::vector<double> at_least(labels + 1, kInf);
    double pc_best = kInf;
    for_each_subtree(tree, [&](long mask) {
      double c = 0, pc = 0;
      std::set<int> ls;
      for (int v = 0; v < n; ++v) {
        if (mask >> v & 1) {
          if (v != tree.root) c += tree.cost[v];
          if (tree.label[v] >= 0) ls.insert(tree.label[v]);
        } else {
          pc += tree.prize[v];
        }
      }
      pc_best = std::min(pc_best, c + pc);
      for (int j = 1; j <= static_cast<int>(ls.size()); ++j) at_least[j] = std::min(at_least[j], c);
    });
    const std::string name = "tree trial " + std::to_string(trial);
    for (const auto& solve_on : {tree, binarize(tree)}) {
      t.check(pc_dst_dp(solve_on).objective == pc_best, name + " PC-DST");
      for (int ell = 1; ell <= labels; ++ell) {
        if (at_least[ell] == kInf) {
          bool threw = false;
          try {
            ldst_dp(solve_on, ell);
          } catch (const Error&) {
            threw = true;
          }
          t.check(threw, name + " l-DST infeasible");
          continue;
        }
        const auto s = ldst_dp(solve_on, ell);
        t.check(s.cost == at_least[ell] && s.covered >= ell, name + " l-DST");
      }
    }
  }
  return t;
}

Tally min_density() {
  Tally t;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = planar(60'000 + seed, 1 + seed % 6);
    const double k = static_cast<double>(inst.terminals.size());
    const auto md = min_density_planar(inst);
    const double best = exact_min_density(inst).density;
    t.check(le(md.density, dst_ratio_bound(k) * best), tag("density bound", seed));
    t.check(md.value > 0 && md.density == md.cost() / md.value, tag("density consistent", seed));
    worst = std::max(worst, md.density / best);
  }
  t.note("max density ratio = " + fmt("%.3f", worst) + " against 8(log2 k+1); three-path constant 6");
  return t;
}

Tally multiroot() {
  Tally t;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = planar(70'000 + seed, 1 + seed % 6, Variant::DST, 3);
    const double k = static_cast<double>(inst.terminals.size());
    const auto m = solve_multiroot(inst);
    t.check(check_feasibility(inst, m.solution.arcs).feasible, tag("DST multi-root feasible", seed));
    t.check(m.stats["iterations"].get<int>() <= static_cast<int>(k), tag("iterations <= k", seed));
    const double opt = exact_multiroot(inst).cost;
    const double lnk = 1.0 + std::log(std::max(k, 1.0));
    t.check(le(m.cost(), dst_ratio_bound(k) * lnk * opt), tag("multi-root bound", seed));
    if (opt > 0) worst = std::max(worst, m.cost() / opt);
    for (Variant v : {Variant::DGST, Variant::DCST, Variant::DPST}) {
      const auto vi = planar(70'000 + seed, 1 + seed % 6, v, 3);
      const auto r = solve_multiroot(vi, {.gamma = 0, .seed = seed});
      t.check(check_feasibility(vi, r.solution.arcs).feasible, tag(std::string(to_string(v)).c_str(), seed));
      t.check(r.stats["iterations"].get<int>() <= vi.k(), tag("variant iterations", seed));
    }
  }
  t.note("max ratio = " + fmt("%.3f", worst) + " against 8(log2 k+1)(1+ln k); three-path constant 6");
  return t;
}

Tally variants() {
  Tally t;
  double gkr_sum = 0;
  int gkr_n = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto gi = planar(80'000 + seed, 4, Variant::DGST);
    const auto g = solve_dgst(gi, {.gamma = 0, .seed = seed});
    std::set<int> cov(g.solution.covered.begin(), g.solution.covered.end());
    for (const auto& grp : gi.groups) {
      bool hit = false;
      for (int v : grp) hit = hit || cov.count(v);
      t.check(hit, tag("DGST group covered", seed));
    }
    t.check(check_feasibility(gi, g.solution.arcs).feasible, tag("DGST feasible", seed));

    // GKR on the embedding tree of the same instance.
    const double gamma = gi.graph.total_cost();
    const auto e = tree_emb_height_reduced(gi.graph, gi.root(), gi.terminal_set(), gamma);
    const auto lifted = expand_groups(e, gi.groups);
    const auto ti = tree_from_embedding(e);
    const auto lp = gst_lp_solve(ti, lifted);
    if (lp.objective > 0) {
      double sum = 0;
      const int samples = 30;
      for (int s = 0; s < samples; ++s) sum += gkr_round(ti, lifted, lp.x, seed * 1000 + s).cost;
      const double q = static_cast<double>(gi.groups.size());
      gkr_sum += (sum / samples) / (std::max(1, ti.height()) * (1 + std::log(q)) * lp.objective);
      ++gkr_n;
    }

    const auto ci = planar(80'000 + seed, 4, Variant::DCST);
    const auto c = solve_dcst(ci, {.gamma = 0, .seed = seed});
    std::set<int> ccov(c.solution.covered.begin(), c.solution.covered.end());
    for (std::size_t i = 0; i < ci.groups.size(); ++i) {
      std::set<int> hit;
      for (int v : ci.groups[i]) {
        if (ccov.count(v)) hit.insert(v);
      }
      t.check(static_cast<int>(hit.size()) >= ci.requirements[i], tag("DCST requirement", seed));
    }
    t.check(check_feasibility(ci, c.solution.arcs).feasible, tag("DCST feasible", seed));

    const auto pi = planar(80'000 + seed, 4, Variant::DPST);
    const auto p = solve_dpst(pi);
    t.check(pi.polymatroid->value(p.solution.covered) == pi.polymatroid->total(), tag("DPST f(covered) = f(V)", seed));
    t.check(check_feasibility(pi, p.solution.arcs).feasible, tag("DPST feasible", seed));
  }
  const double gkr_mean = gkr_sum / std::max(1, gkr_n);
  t.check(gkr_mean <= 20.0, "GKR mean cost over 20 d (1+ln k) LP");
  t.note("GKR mean cost/(d (1+ln k) LP) = " + fmt("%.3f", gkr_mean) + " (regression bound 20)");

  std::mt19937 rng(12);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto tr = random_tree(rng, 12, false);
    tr.prize.clear();
    tr = binarize(tr);
    const int k = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<std::vector<int>> groups(k);
    std::uniform_int_distribution<int> pick(1, tr.size() - 1);
    for (auto& grp : groups) {
      std::set<int> s;
      const int sz = std::uniform_int_distribution<int>(1, 3)(rng);
      while (static_cast<int>(s.size()) < sz) s.insert(pick(rng));
      grp.assign(s.begin(), s.end());
    }
    auto f = [&](std::span<const int> z) {
      std::set<int> zs(z.begin(), z.end());
      long c = 0;
      for (const auto& grp : groups) {
        bool hit = false;
        for (int v : grp) hit = hit || zs.count(v);
        c += hit;
      }
      return c;
    };
    const auto res = recursive_greedy_polymatroid(tr, f);
    const double opt = gst_exact(tr, groups).cost;
    const double bound = 4 * std::pow(1 + std::log(static_cast<double>(k)), 2);
    const std::string name = "greedy trial " + std::to_string(trial);
    t.check(f(res.solution.nodes) == k, name + " coverage");
    t.check(le(res.solution.cost, bound * opt), name + " ratio");
    if (opt > 0) worst = std::max(worst, res.solution.cost / opt);
  }
  t.note("max recursive greedy ratio = " + fmt("%.3f", worst));
  return t;
}

double vertex_enumeration(const LpProblem& p) {
  const int n = p.num_vars;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& row : p.rows) {
    std::vector<double> a(n, 0.0);
    for (auto [j, v] : row.coef) a[j] += v;
    rows.push_back(a);
    rhs.push_back(row.rhs);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    rows.push_back(a);
    rhs.push_back(0.0);
  }
  const int total = static_cast<int>(rows.size());
  double best = kInf;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth < n) {
      for (int i = start; i < total; ++i) {
        pick[depth] = i;
        rec(i + 1, depth + 1);
      }
      return;
    }
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m[i][j] = rows[pick[i]][j];
      m[i][n] = rhs[pick[i]];
    }
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int i = c; i < n; ++i) {
        if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
      }
      if (std::abs(m[piv][c]) < 1e-10) return;
      std::swap(m[c], m[piv]);
      for (int i = 0; i < n; ++i) {
        if (i == c) continue;
        const double f = m[i][c] / m[c][c];
        for (int j = c; j <= n; ++j) m[i][j] -= f * m[c][j];
      }
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
    for (int i = 0; i < total; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += rows[i][j] * x[j];
      if (s < rhs[i] - 1e-9) return;
    }
    double obj = 0;
    for (int j = 0; j < n; ++j) obj += p.cost[j] * x[j];
    best = std::min(best, obj);
  };
  rec(0, 0);
  return best;
}

Tally solver_sanity() {
  Tally t;
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> coef(-3, 5), nv(2, 4), nr(2, 5);
  int compared = 0;
  for (int trial = 0; compared < 20; ++trial) {
    const bool signed_costs = trial % 2;
    LpProblem p;
    const int n = nv(rng);
    for (int j = 0; j < n; ++j) p.add_var(signed_costs ? coef(rng) : std::abs(coef(rng)) + 1);
    const int m = nr(rng);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.push_back({j, static_cast<double>(coef(rng))});
      p.add_row(row, coef(rng));
    }
    if (signed_costs) {
      for (int j = 0; j < n; ++j) p.add_row({{j, -1.0}}, -10.0);
    }
    const double expect = vertex_enumeration(p);
    if (expect == kInf) continue;
    ++compared;
    const auto s = simplex_solve(p);
    t.check(s.status == LpStatus::Optimal && std::abs(s.objective - expect) <= 1e-6,
            "LP trial " + std::to_string(trial));
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenSpec s;
    s.kind = seed % 2 ? "grid" : "triangulated-disk";
    s.rows = 3;
    s.cols = 4;
    s.k = 2 + seed % 4;
    s.seed = 90'000 + seed;
    const auto inst = generate(s);
    const auto a = solve_dst_lp(inst.graph, inst.root(), inst.terminals, DstLpMode::Compact);
    const auto b = solve_dst_lp(inst.graph, inst.root(), inst.terminals, DstLpMode::CuttingPlane);
    t.check(std::abs(a.objective - b.objective) <= 1e-6, tag("compact vs cutting plane", seed));
  }
  return t;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Tally (*run)();
  };
  const Criterion criteria[] = {
      {1, "separator balance and cost", separator_balance},
      {2, "embedding invariants", embedding},
      {3, "projection to graph", projection_to_graph},
      {4, "projection from graph", projection_from_graph},
      {5, "RoundLP", round_lp_criterion},
      {6, "end-to-end DST", end_to_end},
      {7, "tree DPs", tree_dps},
      {8, "min-density planar", min_density},
      {9, "multi-root", multiroot},
      {10, "DGST/DCST/DPST feasibility", variants},
      {11, "solver sanity", solver_sanity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Tally t;
    try {
      t = c.run();
    } catch (const std::exception& e) {
      t.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-28s (%.1fs) %s\n", t.pass() ? "PASS" : "FAIL", c.id, c.name, secs, t.summary().c_str());
    std::fflush(stdout);
    failed += !t.pass();
  }
  return failed == 0 ? 0 : 1;
}
