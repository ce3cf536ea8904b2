#include "dstp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <set>

#include "dstp/embed.hpp"
#include "dstp/lp.hpp"
#include "dstp/oracle.hpp"
#include "dstp/tree.hpp"

namespace dstp {

using nlohmann::json;

json SolutionReport::to_json(const ProblemInstance& inst) const {
  json s = stats;
  s["value"] = value;
  if (std::isfinite(density)) s["density"] = density;
  if (!std::isnan(lp_value)) s["lp_value"] = lp_value;
  if (!std::isnan(oracle_opt)) {
    s["oracle_opt"] = oracle_opt;
    s["ratio"] = ratio();
  }
  return solution_to_json(inst, solution, s);
}

FeasibilityCheck check_feasibility(const ProblemInstance& inst, const std::vector<int>& arcs) {
  FeasibilityCheck out;
  const auto& g = inst.graph;
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<std::vector<int>> out_arcs(g.num_vertices());
  for (int a : arcs) out_arcs[g.arc(a).tail].push_back(a);
  std::vector<int> stack;
  for (int r : inst.roots) {
    seen[r] = 1;
    stack.push_back(r);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int a : out_arcs[v]) {
      const int h = g.arc(a).head;
      if (!seen[h]) {
        seen[h] = 1;
        stack.push_back(h);
      }
    }
  }
  for (int t : inst.terminal_set()) {
    if (seen[t]) out.covered.push_back(t);
  }
  out.value = coverage_value(inst, out.covered);
  out.feasible = out.value >= inst.k();
  return out;
}

namespace {

struct Prepared {
  EmbeddedDigraph g;  // costs scaled so the smallest positive cost is 1
  double scale = 1.0;
  double gamma = 1.0;
};

Prepared prepare(const ProblemInstance& inst, const SolveOptions& opt) {
  Prepared p;
  try {
    auto nc = normalize_costs(inst.graph);
    p.g = std::move(nc.graph);
    p.scale = nc.scale;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllZeroCosts) throw;
    p.g = inst.graph;
  }
  p.gamma = opt.gamma > 0 ? opt.gamma * p.scale : p.g.total_cost();
  p.gamma = std::max(p.gamma, 1.0);
  return p;
}

SolutionReport finalize(const ProblemInstance& inst, const std::vector<int>& arcs, json stats = json::object()) {
  const auto seen = reachable_through(inst.graph, arcs, inst.roots);
  std::vector<int> targets;
  for (int t : inst.terminal_set()) {
    if (seen[t]) targets.push_back(t);
  }
  SolutionReport rep;
  rep.solution = evaluate_solution(inst, extract_branching(inst.graph, arcs, inst.roots, targets, true));
  rep.value = coverage_value(inst, rep.solution.covered);
  if (rep.value > 0) rep.density = rep.solution.cost / static_cast<double>(rep.value);
  rep.stats = std::move(stats);
  return rep;
}

void require_reachable(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals, double gamma) {
  const auto spt = shortest_path_tree(g, r);
  for (int t : terminals) {
    if (!spt.reachable(t)) {
      throw Error(ErrorKind::UnreachableTerminal, "terminal " + std::to_string(t) + " is unreachable from the root");
    }
    if (spt.dist[t] > gamma + kTol) {
      throw Error(ErrorKind::Infeasible, "terminal " + std::to_string(t) + " lies farther than gamma from the root");
    }
  }
}

json tree_stats(const EmbedTree& tree) {
  return {{"tree_nodes", tree.nodes.size()},
          {"tree_height", tree.height()},
          {"separator_calls", tree.separator_calls},
          {"gamma", tree.gamma}};
}

// The recursion of the embedding run as a solver: each instance keeps the
// cheaper of its halving branch and its separator branch.
class DirectSolver {
 public:
  struct Result {
    double cost = kInf;
    std::vector<int> arcs;  // input arc ids
  };

  explicit DirectSolver(double gamma) : gamma_(gamma) {}

  int add(EmbeddedDigraph g, int root, std::vector<int> terminals) {
    Ctx c;
    c.spt = shortest_path_tree(g, root);
    c.sorted = c.spt.dist;
    std::sort(c.sorted.begin(), c.sorted.end());
    c.graph = std::move(g);
    c.root = root;
    c.terminals = std::move(terminals);
    ctx_.push_back(std::move(c));
    return static_cast<int>(ctx_.size()) - 1;
  }

  const Result& solve(int id, int level, int depth = 0) {
    max_depth = std::max(max_depth, depth);
    Ctx& c = ctx_[id];
    auto it = c.memo.find(level);
    if (it != c.memo.end()) return *it->second;
    auto res = std::make_shared<Result>();
    c.memo[level] = res;
    const double phi = gamma_ / std::ldexp(1.0, level);
    if (c.terminals.empty()) {
      res->cost = 0.0;
    } else if (phi < 1.0) {
      res->cost = kInf;
    } else if (c.terminals.size() == 1) {
      const int t = c.terminals[0];
      if (c.spt.reachable(t)) {
        res->cost = c.spt.dist[t];
        for (int a : c.spt.path_arcs(t)) res->arcs.push_back(c.graph.arc(a).id);
      }
    } else {
      const Result half = solve(id, level + 1, depth + 1);
      *res = half;
      const auto sp = split(id, phi);
      if (sp->ok) {
        double total = sp->cost;
        std::vector<const Result*> parts;
        for (int child : sp->children) {
          const Result& r = solve(child, level, depth + 1);
          total += r.cost;
          parts.push_back(&r);
        }
        if (total < res->cost) {
          res->cost = total;
          std::set<int> arcs(sp->arcs.begin(), sp->arcs.end());
          for (const Result* r : parts) arcs.insert(r->arcs.begin(), r->arcs.end());
          res->arcs.assign(arcs.begin(), arcs.end());
        }
      }
    }
    return *res;
  }

  int separator_calls = 0;
  int max_depth = 0;
  int contexts() const { return static_cast<int>(ctx_.size()); }

 private:
  struct Split {
    bool ok = false;
    double cost = 0.0;
    std::vector<int> arcs;
    std::vector<int> children;
  };
  struct Ctx {
    EmbeddedDigraph graph;
    int root = 0;
    std::vector<int> terminals;
    ShortestPathTree spt;
    std::vector<double> sorted;
    std::map<int, std::shared_ptr<Split>> splits;
    std::map<int, std::shared_ptr<Result>> memo;
  };

  std::shared_ptr<Split> split(int id, double phi) {
    Ctx& c = ctx_[id];
    const int kept = static_cast<int>(
        std::upper_bound(c.sorted.begin(), c.sorted.end(), phi + kTol) - c.sorted.begin());
    auto it = c.splits.find(kept);
    if (it != c.splits.end()) return it->second;
    auto s = std::make_shared<Split>();
    c.splits[kept] = s;
    for (int t : c.terminals) {
      if (c.spt.dist[t] > phi + kTol) return s;
    }
    ++separator_calls;
    auto res = prune_and_separate(c.graph, c.root, c.terminals, phi);
    s->ok = true;
    s->cost = res.separator_cost;
    for (int a : res.separator_arcs) s->arcs.push_back(c.graph.arc(a).id);
    for (auto& comp : res.components) {
      const int root = comp.sub.root;
      s->children.push_back(add(std::move(comp.sub.graph), root, std::move(comp.terminals)));
    }
    return s;
  }

  double gamma_;
  std::deque<Ctx> ctx_;
};

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<std::vector<int>> copy_groups(const EmbedTree& tree, const std::vector<int>& terminals) {
  std::vector<std::vector<int>> groups;
  for (int t : terminals) {
    auto it = tree.copies.find(t);
    groups.push_back(it == tree.copies.end() ? std::vector<int>{} : it->second);
  }
  return groups;
}

ArcSetSolution project(const EmbedTree& tree, const Prepared& p, const TreeSolution& sol, int r) {
  return project_to_graph(tree, p.g, sol.nodes, r);
}

// Tree solution over embedding nodes from a solution of binarize(t).
TreeSolution from_binarized(const TreeInstance& source, const TreeInstance& bin, const TreeSolution& s) {
  return make_tree_solution(source, unbinarize(bin, s));
}

void check_groups_lifted(const std::vector<std::vector<int>>& lifted) {
  for (std::size_t i = 0; i < lifted.size(); ++i) {
    if (lifted[i].empty()) {
      throw Error(ErrorKind::InfeasibleGroup, "group " + std::to_string(i) + " has no terminal within reach");
    }
  }
}

ProblemInstance with_root(const ProblemInstance& inst, int r) {
  ProblemInstance sub = inst;
  sub.roots = {r};
  return sub;
}

}  // namespace

SolutionReport solve_dst_direct(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto terms = sorted_unique(inst.terminals);
  require_reachable(p.g, r, terms, p.gamma);
  DirectSolver solver(p.gamma);
  const int top = solver.add(p.g, r, terms);
  const auto& res = solver.solve(top, 0);
  if (res.cost == kInf) throw Error(ErrorKind::Infeasible, "the recursion found no feasible tree");
  return finalize(inst, res.arcs,
                  {{"algo", "direct"},
                   {"separator_calls", solver.separator_calls},
                   {"recursion_depth", solver.max_depth},
                   {"instances", solver.contexts()},
                   {"gamma", p.gamma / p.scale}});
}

SolutionReport solve_dst_via_embedding(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto terms = sorted_unique(inst.terminals);
  require_reachable(p.g, r, terms, p.gamma);
  const auto tree = tree_emb_height_reduced(p.g, r, terms, p.gamma);
  json stats = tree_stats(tree);
  stats["algo"] = "embed";
  if (tree.empty()) return finalize(inst, {}, stats);
  const auto ti = tree_from_embedding(tree);
  const auto groups = copy_groups(tree, terms);
  TreeSolution sol;
  if (static_cast<int>(terms.size()) <= opt.exact_tree_max_k) {
    sol = gst_exact(ti, groups);
    stats["tree_solver"] = "exact";
  } else {
    const auto lp = gst_lp_solve(ti, groups);
    sol = gkr_round(ti, groups, lp.x, opt.seed);
    stats["tree_solver"] = "gkr";
    stats["tree_lp"] = lp.objective / p.scale;
  }
  stats["tree_cost"] = sol.cost / p.scale;
  return finalize(inst, project(tree, p, sol, r).arcs, stats);
}

SolutionReport solve_dst_lp_round(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto terms = sorted_unique(inst.terminals);
  require_reachable(p.g, r, terms, kInf);
  const auto lp = solve_dst_lp(p.g, r, terms, DstLpMode::CuttingPlane);
  const auto rounded = round_lp(p.g, r, terms, lp.x);
  auto rep = finalize(inst, rounded.arcs,
                      {{"algo", "lp-round"},
                       {"recursion_depth", rounded.depth},
                       {"separator_calls", rounded.separator_calls},
                       {"lp_rounds", lp.rounds}});
  rep.lp_value = lp.objective / p.scale;
  return rep;
}

SolutionReport solve_dgst(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto tree = tree_emb_height_reduced(p.g, r, inst.terminal_set(), p.gamma);
  const auto lifted = expand_groups(tree, inst.groups);
  check_groups_lifted(lifted);
  const auto ti = tree_from_embedding(tree);
  const auto lp = gst_lp_solve(ti, lifted);
  int rounds = 0;
  const auto sol = gkr_round(ti, lifted, lp.x, opt.seed, &rounds);
  json stats = tree_stats(tree);
  stats["algo"] = "dgst";
  stats["gkr_rounds"] = rounds;
  stats["tree_cost"] = sol.cost / p.scale;
  auto rep = finalize(inst, project(tree, p, sol, r).arcs, stats);
  rep.lp_value = lp.objective / p.scale;
  return rep;
}

SolutionReport solve_dcst(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  for (std::size_t i = 0; i < inst.groups.size(); ++i) {
    if (static_cast<int>(sorted_unique(inst.groups[i]).size()) < inst.requirements[i]) {
      throw Error(ErrorKind::Infeasible, "group " + std::to_string(i) + " is smaller than its requirement");
    }
  }
  const auto tree = tree_emb_height_reduced(p.g, r, inst.terminal_set(), p.gamma);
  const auto lifted = expand_groups(tree, inst.groups);
  const auto ti = tree_from_embedding(tree);
  const auto lp = dcst_lp_solve(ti, lifted, inst.requirements);
  int iterations = 0;
  const auto sol = dcst_iterative_round(ti, lifted, inst.requirements, lp, opt.seed, &iterations);
  json stats = tree_stats(tree);
  stats["algo"] = "dcst";
  stats["rounding_iterations"] = iterations;
  stats["tree_cost"] = sol.cost / p.scale;
  auto rep = finalize(inst, project(tree, p, sol, r).arcs, stats);
  rep.lp_value = lp.objective / p.scale;
  return rep;
}

namespace {

// Greedy on the binarized embedding for f(covered ∪ ·) - f(covered).
struct GreedyRun {
  ArcSetSolution projected;
  std::vector<double> phase_density;
  json stats;
};

GreedyRun polymatroid_greedy(const ProblemInstance& inst, const Prepared& p, int r,
                             const std::vector<int>& covered, int max_phases) {
  const PolymatroidHandle& f = *inst.polymatroid;
  const long base = f.value(covered);
  std::set<int> have(covered.begin(), covered.end());
  std::vector<int> support;
  for (int v : f.support()) {
    if (have.count(v)) continue;
    std::vector<int> z = covered;
    z.push_back(v);
    if (f.value(z) > base) support.push_back(v);
  }
  const auto tree = tree_emb_height_reduced(p.g, r, support, p.gamma);
  GreedyRun run;
  run.stats = tree_stats(tree);
  if (tree.empty()) return run;
  const auto source = tree_from_embedding(tree);
  const auto bin = binarize(source);
  auto value = [&](std::span<const int> nodes) {
    std::vector<int> z = covered;
    for (int v : nodes) {
      const int o = bin.origin[v];
      if (o >= 0 && tree.nodes[o].kind == NodeKind::Copy) z.push_back(tree.nodes[o].terminal);
    }
    return f.value(z) - base;
  };
  const auto g = recursive_greedy_polymatroid(bin, value, max_phases);
  run.phase_density = g.phase_density;
  for (double& d : run.phase_density) d /= p.scale;
  run.projected = project(tree, p, from_binarized(source, bin, g.solution), r);
  return run;
}

}  // namespace

SolutionReport solve_dpst(const ProblemInstance& inst, const SolveOptions& opt) {
  if (!inst.polymatroid) throw Error(ErrorKind::InvariantViolation, "polymatroid instance without f");
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto spt = shortest_path_tree(p.g, r);
  for (int v : inst.polymatroid->support()) {
    if (!spt.reachable(v)) throw Error(ErrorKind::UnreachableSupport, "support vertex " + std::to_string(v) + " is unreachable");
  }
  auto run = polymatroid_greedy(inst, p, r, {}, 0);
  run.stats["algo"] = "dpst";
  run.stats["phase_density"] = run.phase_density;
  return finalize(inst, run.projected.arcs, run.stats);
}

namespace {

struct CountingTree {
  EmbedTree tree;
  TreeInstance source;
  TreeInstance bin;
};

CountingTree counting_tree(const Prepared& p, int r, const std::vector<int>& terminals) {
  CountingTree c;
  c.tree = tree_emb(p.g, r, terminals, p.gamma);
  if (c.tree.empty()) throw Error(ErrorKind::NoTerminals, "no terminal within reach of the root");
  c.source = tree_from_embedding(c.tree);
  c.bin = binarize(c.source);
  return c;
}

}  // namespace

SolutionReport min_density_planar(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto spt = shortest_path_tree(p.g, r);
  std::vector<int> terms;
  for (int t : sorted_unique(inst.terminals)) {
    if (spt.reachable(t)) terms.push_back(t);
  }
  if (terms.empty()) throw Error(ErrorKind::NoTerminals, "no terminal is reachable");
  const auto c = counting_tree(p, r, terms);
  const auto md = min_density_tree(c.bin);
  const auto sol = from_binarized(c.source, c.bin, md.solution);
  json stats = tree_stats(c.tree);
  stats["algo"] = "min-density";
  stats["tree_density"] = md.density / p.scale;
  stats["tree_ell"] = md.ell;
  stats["tree_copies_used"] = md.solution.covered;
  return finalize(inst, project(c.tree, p, sol, r).arcs, stats);
}

SolutionReport ell_dst_planar(const ProblemInstance& inst, int ell, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto terms = sorted_unique(inst.terminals);
  if (ell < 1 || ell > static_cast<int>(terms.size())) {
    throw Error(ErrorKind::EllOutOfRange, "ell must lie in [1, " + std::to_string(terms.size()) + "]");
  }
  const auto c = counting_tree(p, r, terms);
  const auto s = ldst_dp(c.bin, ell);
  json stats = tree_stats(c.tree);
  stats["algo"] = "ell-dst";
  stats["tree_cost"] = s.cost / p.scale;
  return finalize(inst, project(c.tree, p, from_binarized(c.source, c.bin, s), r).arcs, stats);
}

SolutionReport pc_dst_planar(const ProblemInstance& inst, const SolveOptions& opt) {
  const auto p = prepare(inst, opt);
  const int r = inst.root();
  const auto spt = shortest_path_tree(p.g, r);
  auto prize = [&](int t) {
    auto it = inst.prizes.find(t);
    return it == inst.prizes.end() ? 0.0 : it->second;
  };
  std::vector<int> terms;
  for (int t : sorted_unique(inst.terminals)) {
    if (spt.reachable(t)) terms.push_back(t);
  }
  std::vector<int> arcs;
  json stats = {{"algo", "pc-dst"}};
  if (!terms.empty()) {
    auto c = counting_tree(p, r, terms);
    c.bin.prize.assign(c.bin.size(), 0.0);
    for (int v = 0; v < c.bin.size(); ++v) {
      if (c.bin.label[v] >= 0) c.bin.prize[v] = prize(c.bin.label[v]) * p.scale;
    }
    const auto s = pc_dst_dp(c.bin);
    stats.update(tree_stats(c.tree));
    stats["tree_objective"] = s.objective / p.scale;
    arcs = project(c.tree, p, from_binarized(c.source, c.bin, s), r).arcs;
  }
  auto rep = finalize(inst, arcs, stats);
  double objective = rep.solution.cost;
  std::set<int> cov(rep.solution.covered.begin(), rep.solution.covered.end());
  for (int t : sorted_unique(inst.terminals)) {
    if (!cov.count(t)) objective += prize(t);
  }
  rep.density = objective;
  rep.stats["objective"] = objective;
  return rep;
}

namespace {

// One candidate of the density loop: a tree from root r making progress on
// the part of the instance not yet satisfied by `covered`.
std::vector<int> density_candidate(const ProblemInstance& inst, const Prepared& p, int r,
                                   const std::vector<int>& covered, std::uint64_t seed) {
  const auto spt = shortest_path_tree(p.g, r);
  std::set<int> have(covered.begin(), covered.end());
  auto open = [&](int v) { return !have.count(v) && spt.reachable(v) && spt.dist[v] <= p.gamma + kTol; };
  switch (inst.variant) {
    case Variant::DST: {
      std::vector<int> terms;
      for (int t : inst.terminals) {
        if (open(t)) terms.push_back(t);
      }
      if (terms.empty()) return {};
      auto sub = with_root(inst, r);
      sub.terminals = terms;
      SolveOptions o;
      o.gamma = p.gamma / p.scale;
      return min_density_planar(sub, o).solution.arcs;
    }
    case Variant::DGST:
    case Variant::DCST: {
      std::vector<std::vector<int>> groups;
      std::set<int> all;
      for (std::size_t i = 0; i < inst.groups.size(); ++i) {
        long hit = 0;
        for (int v : inst.groups[i]) hit += have.count(v);
        const long need = inst.variant == Variant::DGST ? 1 : inst.requirements[i];
        if (hit >= need) continue;
        std::vector<int> g;
        for (int v : inst.groups[i]) {
          if (open(v)) g.push_back(v);
        }
        if (g.empty()) continue;
        all.insert(g.begin(), g.end());
        groups.push_back(std::move(g));
      }
      if (groups.empty()) return {};
      const auto tree = tree_emb_height_reduced(p.g, r, {all.begin(), all.end()}, p.gamma);
      const auto lifted = expand_groups(tree, groups);
      const auto ti = tree_from_embedding(tree);
      const auto res = min_density_dgst(ti, lifted, seed);
      return project(tree, p, res.solution, r).arcs;
    }
    case Variant::DPST: {
      return polymatroid_greedy(inst, p, r, covered, 1).projected.arcs;
    }
  }
  return {};
}

}  // namespace

SolutionReport solve_multiroot(const ProblemInstance& inst, const SolveOptions& opt) {
  if (inst.roots.size() == 1) {
    switch (inst.variant) {
      case Variant::DST: return solve_dst_direct(inst, opt);
      case Variant::DGST: return solve_dgst(inst, opt);
      case Variant::DCST: return solve_dcst(inst, opt);
      case Variant::DPST: return solve_dpst(inst, opt);
    }
  }
  const auto p = prepare(inst, opt);
  std::vector<int> arcs;
  std::vector<int> covered;
  long value = 0;
  const long target = inst.k();
  int iterations = 0;
  std::vector<double> phase_density;
  while (value < target) {
    ++iterations;
    double best = kInf;
    std::vector<int> best_arcs;
    for (int r : inst.roots) {
      std::vector<int> cand;
      try {
        cand = density_candidate(inst, p, r, covered, opt.seed + static_cast<std::uint64_t>(iterations));
      } catch (const Error&) {
        continue;
      }
      if (cand.empty()) continue;
      std::vector<int> merged = arcs;
      merged.insert(merged.end(), cand.begin(), cand.end());
      const long gain = check_feasibility(inst, merged).value - value;
      if (gain <= 0) continue;
      const double d = arc_set_cost(inst.graph, cand) / static_cast<double>(gain);
      if (d < best) {
        best = d;
        best_arcs = std::move(cand);
      }
    }
    if (best_arcs.empty()) throw Error(ErrorKind::Infeasible, "some terminal is unreachable from every root");
    phase_density.push_back(best);
    arcs.insert(arcs.end(), best_arcs.begin(), best_arcs.end());
    arcs = sorted_unique(std::move(arcs));
    const auto check = check_feasibility(inst, arcs);
    covered = check.covered;
    value = check.value;
  }
  return finalize(inst, arcs, {{"algo", "multiroot"}, {"iterations", iterations}, {"phase_density", phase_density}});
}

SolutionReport solve(const ProblemInstance& inst, const std::string& algo, const SolveOptions& opt) {
  if (algo == "direct") return solve_dst_direct(inst, opt);
  if (algo == "embed") return solve_dst_via_embedding(inst, opt);
  if (algo == "lp-round") return solve_dst_lp_round(inst, opt);
  if (algo == "dgst") return solve_dgst(inst, opt);
  if (algo == "dcst") return solve_dcst(inst, opt);
  if (algo == "dpst") return solve_dpst(inst, opt);
  if (algo == "multiroot") return solve_multiroot(inst, opt);
  if (algo == "min-density") return min_density_planar(inst, opt);
  throw Error(ErrorKind::MalformedSyntax, "unknown algorithm " + algo);
}

}  // namespace dstp
