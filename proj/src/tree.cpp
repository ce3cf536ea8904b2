#include "dstp/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "dstp/lp.hpp"

namespace dstp {

int TreeInstance::add_node(int par, double c, int lab) {
  const int v = size();
  parent.push_back(par);
  cost.push_back(par < 0 ? 0.0 : c);
  children.emplace_back();
  exclusive.push_back(0);
  label.push_back(lab);
  if (!prize.empty()) prize.push_back(0.0);
  origin.push_back(v);
  if (par >= 0) children[par].push_back(v);
  return v;
}

std::vector<int> TreeInstance::preorder() const {
  std::vector<int> order;
  if (parent.empty()) return order;
  order.push_back(root);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int c : children[order[i]]) order.push_back(c);
  }
  return order;
}

int TreeInstance::height() const {
  std::vector<int> depth(size(), 0);
  int h = 0;
  for (int v : preorder()) {
    if (v != root) depth[v] = depth[parent[v]] + 1;
    h = std::max(h, depth[v]);
  }
  return h;
}

int TreeInstance::num_labels() const {
  std::set<int> s;
  for (int l : label) {
    if (l >= 0) s.insert(l);
  }
  return static_cast<int>(s.size());
}

TreeInstance tree_from_parents(const std::vector<int>& parent, const std::vector<double>& cost) {
  TreeInstance t;
  const int n = static_cast<int>(parent.size());
  t.parent = parent;
  t.cost = cost;
  t.children.assign(n, {});
  t.exclusive.assign(n, 0);
  t.label.assign(n, -1);
  t.origin.resize(n);
  for (int v = 0; v < n; ++v) {
    t.origin[v] = v;
    if (parent[v] < 0) {
      t.root = v;
      t.cost[v] = 0.0;
    } else {
      t.children[parent[v]].push_back(v);
    }
  }
  return t;
}

TreeInstance tree_from_embedding(const EmbedTree& tree) {
  std::vector<int> parent;
  std::vector<double> cost;
  for (const auto& n : tree.nodes) {
    parent.push_back(n.parent);
    cost.push_back(n.cost);
  }
  TreeInstance t = tree_from_parents(parent, cost);
  t.root = std::max(0, tree.root);
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    t.exclusive[v] = tree.nodes[v].exclusive;
    if (tree.nodes[v].kind == NodeKind::Copy) t.label[v] = tree.nodes[v].terminal;
  }
  return t;
}

TreeInstance binarize(const TreeInstance& t) {
  TreeInstance b;
  const bool prizes = !t.prize.empty();
  if (prizes) b.prize.clear();
  std::vector<int> fresh(t.size(), -1);
  auto copy_node = [&](int v, int par) {
    const int id = b.add_node(par, t.cost[v], t.label[v]);
    if (prizes) {
      b.prize.resize(b.size(), 0.0);
      b.prize[id] = t.prize[v];
    }
    b.exclusive[id] = t.exclusive[v];
    b.origin[id] = v;
    fresh[v] = id;
    return id;
  };
  if (t.size() == 0) return b;
  copy_node(t.root, -1);
  b.root = 0;
  for (int v : t.preorder()) {
    const auto& ch = t.children[v];
    const int d = static_cast<int>(ch.size());
    int cur = fresh[v];
    for (int i = 0; i < d; ++i) {
      copy_node(ch[i], cur);
      if (d - i > 2) {
        const int aux = b.add_node(cur, 0.0);
        if (prizes) b.prize.resize(b.size(), 0.0);
        b.exclusive[aux] = t.exclusive[v];
        b.origin[aux] = -1;
        cur = aux;
      }
    }
  }
  return b;
}

TreeSolution make_tree_solution(const TreeInstance& t, std::vector<int> nodes) {
  std::vector<char> in(t.size(), 0);
  for (int v : nodes) {
    for (int x = v; x >= 0 && !in[x]; x = t.parent[x]) in[x] = 1;
  }
  if (t.size() > 0) in[t.root] = 1;
  TreeSolution s;
  std::set<int> labels;
  for (int v = 0; v < t.size(); ++v) {
    if (!in[v]) continue;
    s.nodes.push_back(v);
    if (v != t.root) s.cost += t.cost[v];
    if (t.label[v] >= 0) labels.insert(t.label[v]);
  }
  s.covered = static_cast<int>(labels.size());
  s.objective = s.cost;
  return s;
}

std::vector<int> unbinarize(const TreeInstance& bin, const TreeSolution& sol) {
  std::vector<int> out;
  for (int v : sol.nodes) {
    if (bin.origin[v] >= 0) out.push_back(bin.origin[v]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::vector<char>> group_masks(const TreeInstance& t, const std::vector<std::vector<int>>& groups) {
  std::vector<std::vector<char>> m;
  for (const auto& g : groups) {
    std::vector<char> in(t.size(), 0);
    for (int v : g) in[v] = 1;
    m.push_back(std::move(in));
  }
  return m;
}

// below[v]: some node of the set lies in the subtree of v.
std::vector<char> has_below(const TreeInstance& t, const std::vector<char>& in) {
  std::vector<char> below(in.begin(), in.end());
  const auto order = t.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it != t.root && below[*it]) below[t.parent[*it]] = 1;
  }
  return below;
}

void monotonize(const TreeInstance& t, std::vector<double>& x) {
  for (int v : t.preorder()) {
    if (v == t.root) continue;
    const double cap = t.parent[v] == t.root ? 1.0 : x[t.parent[v]];
    x[v] = std::clamp(x[v], 0.0, cap);
  }
}

// Keeps only the nodes leading to a node of `targets`.
std::vector<int> prune_to(const TreeInstance& t, const std::vector<char>& sel, const std::vector<char>& targets) {
  std::vector<char> keep(t.size(), 0);
  for (int v = 0; v < t.size(); ++v) {
    if (!sel[v] || !targets[v]) continue;
    for (int x = v; x >= 0 && !keep[x]; x = t.parent[x]) keep[x] = 1;
  }
  std::vector<int> out;
  for (int v = 0; v < t.size(); ++v) {
    if (keep[v]) out.push_back(v);
  }
  return out;
}

std::vector<char> mark_round(const TreeInstance& t, const std::vector<double>& x, std::mt19937_64& rng) {
  std::vector<char> marked(t.size(), 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  marked[t.root] = 1;
  for (int v : t.preorder()) {
    if (v == t.root || !marked[t.parent[v]]) continue;
    const int p = t.parent[v];
    double prob;
    if (p == t.root) prob = std::min(x[v], 1.0);
    else prob = x[p] > 0 ? x[v] / x[p] : 0.0;
    prob = std::clamp(prob, 0.0, 1.0);
    if (prob >= 1.0 || (prob > 0.0 && u(rng) < prob)) marked[v] = 1;
  }
  return marked;
}

}  // namespace

GstLp gst_lp_solve(const TreeInstance& t, const std::vector<std::vector<int>>& groups) {
  const int n = t.size();
  GstLp out;
  out.x.assign(n, 0.0);
  const auto masks = group_masks(t, groups);
  std::vector<int> active;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) {
      throw Error(ErrorKind::InfeasibleGroup, "group " + std::to_string(i) + " has no tree node");
    }
    if (!masks[i][t.root]) active.push_back(static_cast<int>(i));
  }
  if (active.empty()) return out;
  std::vector<char> any(n, 0);
  for (int i : active) {
    for (int v : groups[i]) any[v] = 1;
  }
  const auto relevant = has_below(t, any);
  std::vector<int> var(n, -1);
  LpProblem p;
  for (int v = 0; v < n; ++v) {
    if (v != t.root && relevant[v]) var[v] = p.add_var(t.cost[v]);
  }
  CuttingPlaneLp lp(p.cost);
  for (int i : active) {
    std::vector<std::pair<int, double>> row;
    for (int v : groups[i]) row.push_back({var[v], 1.0});
    lp.add_row(std::move(row), 1.0);
  }
  std::vector<std::vector<char>> below;
  for (int i : active) below.push_back(has_below(t, masks[i]));
  const auto order = t.preorder();
  std::vector<double> xs(n, 0.0), cut(n, 0.0);
  bool exact = false;
  for (;;) {
    ++out.rounds;
    const auto sol = lp.solve(exact);
    if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::InfeasibleGroup, "group LP infeasible");
    for (int v = 0; v < n; ++v) xs[v] = var[v] >= 0 ? sol.x[var[v]] : 0.0;
    int added = 0;
    for (std::size_t gi = 0; gi < active.size(); ++gi) {
      const auto& in = masks[active[gi]];
      const auto& bl = below[gi];
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        if (!bl[v]) continue;
        double sub = 0.0;
        for (int c : t.children[v]) {
          if (bl[c]) sub += cut[c];
        }
        if (v == t.root) cut[v] = sub;
        else cut[v] = in[v] ? xs[v] : std::min(xs[v], sub);
      }
      if (cut[t.root] >= 1.0 - kCutTol) continue;
      std::vector<std::pair<int, double>> row;
      std::vector<int> stack(t.children[t.root]);
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (!bl[v]) continue;
        double sub = 0.0;
        for (int c : t.children[v]) {
          if (bl[c]) sub += cut[c];
        }
        if (in[v] || xs[v] <= sub) {
          row.push_back({var[v], 1.0});
        } else {
          for (int c : t.children[v]) stack.push_back(c);
        }
      }
      lp.add_row(std::move(row), 1.0);
      ++added;
    }
    if (added == 0) {
      if (exact) break;
      exact = true;
    }
  }
  monotonize(t, xs);
  out.x = xs;
  for (int v = 0; v < n; ++v) out.objective += t.cost[v] * xs[v];
  return out;
}

TreeSolution gkr_round(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                       const std::vector<double>& x_in, std::uint64_t seed, int* rounds_used) {
  const int n = t.size();
  std::vector<double> x = x_in;
  monotonize(t, x);
  const auto masks = group_masks(t, groups);
  std::mt19937_64 rng(seed);
  std::vector<char> sel(n, 0);
  sel[t.root] = 1;
  auto covered = [&](std::size_t i) {
    for (int v : groups[i]) {
      if (sel[v]) return true;
    }
    return false;
  };
  auto all_covered = [&] {
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (!covered(i)) return false;
    }
    return true;
  };
  const int cap = 4 * static_cast<int>(std::ceil(std::log2(n + 2.0))) *
                  static_cast<int>(std::ceil(std::log(groups.size() + 1.0) + 1.0));
  int rounds = 0;
  while (!all_covered() && rounds < cap) {
    ++rounds;
    const auto m = mark_round(t, x, rng);
    for (int v = 0; v < n; ++v) sel[v] |= m[v];
  }
  if (rounds_used) *rounds_used = rounds;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (covered(i)) continue;
    int best = -1;
    double best_cost = kInf;
    for (int v : groups[i]) {
      double c = 0.0;
      for (int y = v; !sel[y]; y = t.parent[y]) c += t.cost[y];
      if (c < best_cost) {
        best_cost = c;
        best = v;
      }
    }
    for (int y = best; !sel[y]; y = t.parent[y]) sel[y] = 1;
  }
  std::vector<char> targets(n, 0);
  for (const auto& m : masks) {
    for (int v = 0; v < n; ++v) targets[v] |= m[v];
  }
  return make_tree_solution(t, prune_to(t, sel, targets));
}

TreeSolution gst_exact(const TreeInstance& t, const std::vector<std::vector<int>>& groups) {
  const int q = static_cast<int>(groups.size());
  if (q > 16) throw Error(ErrorKind::TooManyTerminals, "exact group DP supports at most 16 groups");
  const int n = t.size();
  std::vector<int> own(n, 0);
  for (int i = 0; i < q; ++i) {
    if (groups[i].empty()) throw Error(ErrorKind::InfeasibleGroup, "empty group");
    for (int v : groups[i]) own[v] |= 1 << i;
  }
  const int full = (1 << q) - 1;
  std::vector<char> any(n, 0);
  for (int v = 0; v < n; ++v) any[v] = own[v] != 0;
  const auto rel = has_below(t, any);
  std::vector<std::vector<double>> D(n);
  // choice[v][i][mask]: submask covered through the i-th relevant child.
  std::vector<std::vector<std::vector<int>>> choice(n);
  std::vector<std::vector<int>> kids(n);
  const auto order = t.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (!rel[v] && v != t.root) continue;
    auto& d = D[v];
    d.assign(full + 1, kInf);
    for (int m = 0; m <= full; ++m) {
      if ((m & ~own[v]) == 0) d[m] = 0.0;
    }
    for (int c : t.children[v]) {
      if (!rel[c]) continue;
      kids[v].push_back(c);
      std::vector<double> g(full + 1);
      g[0] = 0.0;
      for (int m = 1; m <= full; ++m) g[m] = t.cost[c] + D[c][m];
      std::vector<double> nd(full + 1, kInf);
      std::vector<int> ch(full + 1, 0);
      for (int m = 0; m <= full; ++m) {
        for (int s = m;; s = (s - 1) & m) {
          const double val = d[m & ~s] + g[s];
          if (val < nd[m]) {
            nd[m] = val;
            ch[m] = s;
          }
          if (s == 0) break;
        }
      }
      d = std::move(nd);
      choice[v].push_back(std::move(ch));
    }
  }
  if (D[t.root][full] == kInf) throw Error(ErrorKind::InfeasibleGroup, "groups not coverable");
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> stack{{t.root, full}};
  while (!stack.empty()) {
    auto [v, m] = stack.back();
    stack.pop_back();
    nodes.push_back(v);
    for (int i = static_cast<int>(kids[v].size()) - 1; i >= 0; --i) {
      const int s = choice[v][i][m];
      if (s != 0) stack.push_back({kids[v][i], s});
      m &= ~s;
    }
  }
  return make_tree_solution(t, nodes);
}

DensityResult min_density_dgst(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                               std::uint64_t seed, const std::vector<double>* x_given) {
  const int n = t.size();
  const auto masks = group_masks(t, groups);
  std::vector<int> live;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].empty()) live.push_back(static_cast<int>(i));
  }
  if (live.empty()) throw Error(ErrorKind::NoReachableGroup, "no group has a tree node");
  std::vector<std::vector<int>> lg;
  for (int i : live) lg.push_back(groups[i]);
  std::vector<double> x;
  DensityResult best;
  if (x_given) {
    x = *x_given;
    monotonize(t, x);
    double c = 0.0;
    for (int v = 0; v < n; ++v) c += t.cost[v] * x[v];
    best.lp_density = c / static_cast<double>(live.size());
  } else {
    auto lp = gst_lp_solve(t, lg);
    x = lp.x;
    best.lp_density = lp.objective / static_cast<double>(live.size());
  }
  best.density = kInf;
  auto consider = [&](const std::vector<char>& sel) {
    std::vector<char> targets(n, 0);
    int hit = 0;
    for (int i : live) {
      bool h = false;
      for (int v : groups[i]) {
        if (sel[v]) {
          h = true;
          targets[v] = 1;
        }
      }
      hit += h;
    }
    if (hit == 0) return;
    auto sol = make_tree_solution(t, prune_to(t, sel, targets));
    const double dens = sol.cost / hit;
    if (dens < best.density - 1e-12) {
      best.density = dens;
      best.groups_covered = hit;
      best.solution = std::move(sol);
    }
  };
  std::mt19937_64 rng(seed);
  const int trials = 16 * static_cast<int>(std::ceil(std::log(static_cast<double>(live.size()) + 2.0)));
  for (int trial = 0; trial < trials; ++trial) consider(mark_round(t, x, rng));
  std::vector<char> sel(n, 0);
  for (int i : live) {
    for (int v : groups[i]) {
      std::fill(sel.begin(), sel.end(), 0);
      for (int y = v; y >= 0; y = t.parent[y]) sel[y] = 1;
      consider(sel);
    }
  }
  return best;
}

DcstLpSolution dcst_lp_solve(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                             const std::vector<int>& h) {
  const int n = t.size();
  auto key = [&](int v) { return t.label[v] >= 0 ? t.label[v] : -(v + 1); };
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::set<int> keys;
    for (int v : groups[i]) keys.insert(key(v));
    if (static_cast<int>(keys.size()) < h[i]) {
      throw Error(ErrorKind::Infeasible, "group " + std::to_string(i) + " has fewer than h distinct terminals");
    }
  }
  DcstLpSolution out;
  out.x.assign(n, 0.0);
  out.f.assign(n, 0.0);
  std::vector<char> member(n, 0);
  for (const auto& g : groups) {
    for (int v : g) member[v] = 1;
  }
  const auto rel = has_below(t, member);
  LpProblem p;
  std::vector<int> xv(n, -1), fv(n, -1);
  for (int v = 0; v < n; ++v) {
    if (rel[v] && v != t.root) xv[v] = p.add_var(t.cost[v]);
  }
  std::map<int, std::vector<int>> by_key;
  for (int v = 0; v < n; ++v) {
    if (member[v]) {
      fv[v] = p.add_var(0.0);
      by_key[key(v)].push_back(v);
    }
  }
  CuttingPlaneLp lp(p.cost);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (h[i] <= 0) continue;
    std::vector<std::pair<int, double>> row;
    for (int v : groups[i]) row.push_back({fv[v], 1.0});
    lp.add_row(std::move(row), h[i]);
  }
  for (const auto& [k, vs] : by_key) {
    std::vector<std::pair<int, double>> row;
    for (int v : vs) row.push_back({fv[v], -1.0});
    lp.add_row(std::move(row), -1.0);
  }
  std::set<std::pair<int, int>> added;  // (edge, key)
  LpSolution sol;
  bool exact = false;
  for (;;) {
    ++out.rounds;
    sol = lp.solve(exact);
    if (sol.status != LpStatus::Optimal) throw Error(ErrorKind::Infeasible, "covering LP infeasible");
    std::map<std::pair<int, int>, double> through;
    for (int u = 0; u < n; ++u) {
      if (fv[u] < 0 || sol.x[fv[u]] <= 1e-12) continue;
      for (int y = u; y != t.root; y = t.parent[y]) through[{y, key(u)}] += sol.x[fv[u]];
    }
    int count = 0;
    for (const auto& [ek, fl] : through) {
      const auto [v, k] = ek;
      if (sol.x[xv[v]] >= fl - 1e-9 || added.count(ek)) continue;
      std::vector<std::pair<int, double>> row{{xv[v], 1.0}};
      for (int u : by_key[k]) {
        bool below = false;
        for (int y = u; y >= 0 && !below; y = t.parent[y]) below = y == v;
        if (below) row.push_back({fv[u], -1.0});
      }
      lp.add_row(std::move(row), 0.0);
      added.insert(ek);
      ++count;
    }
    if (count == 0) {
      if (exact) break;
      exact = true;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (xv[v] >= 0) out.x[v] = sol.x[xv[v]];
    if (fv[v] >= 0) out.f[v] = sol.x[fv[v]];
    out.objective += t.cost[v] * out.x[v];
  }
  return out;
}

TreeSolution dcst_iterative_round(const TreeInstance& t, const std::vector<std::vector<int>>& groups,
                                  const std::vector<int>& h, const DcstLpSolution& lp,
                                  std::uint64_t seed, int* iterations) {
  const int n = t.size();
  auto key = [&](int v) { return t.label[v] >= 0 ? t.label[v] : -(v + 1); };
  std::map<int, std::vector<int>> copies;
  for (int v = 0; v < n; ++v) {
    if (t.label[v] >= 0) copies[t.label[v]].push_back(v);
  }
  for (const auto& g : groups) {
    for (int v : g) {
      if (t.label[v] < 0) copies[key(v)] = {v};
    }
  }
  std::vector<double> xcap(n);
  for (int v = 0; v < n; ++v) xcap[v] = std::min(lp.x[v], 1.0);
  std::vector<char> sel(n, 0);
  sel[t.root] = 1;
  std::set<int> covered;
  auto refresh = [&] {
    for (int v = 0; v < n; ++v) {
      if (sel[v] && (t.label[v] >= 0 || copies.count(key(v)))) covered.insert(key(v));
    }
  };
  refresh();
  int iter = 0;
  for (;;) {
    std::vector<std::vector<int>> parts;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      std::map<int, double> flow;
      std::set<int> in_group;
      for (int v : groups[i]) {
        in_group.insert(key(v));
        if (!covered.count(key(v))) flow[key(v)] += lp.f[v];
      }
      int have = 0;
      for (int k : in_group) have += covered.count(k);
      if (have >= h[i]) continue;
      std::vector<std::pair<double, int>> order;
      for (auto [k, f] : flow) order.push_back({-f, k});
      std::sort(order.begin(), order.end());
      std::vector<int> part;
      double acc = 0.0;
      bool closed = false;
      for (auto [negf, k] : order) {
        for (int v : copies[k]) part.push_back(v);
        acc -= negf;
        if (acc >= 1.0 - 1e-9) {
          parts.push_back(std::move(part));
          part.clear();
          acc = 0.0;
          closed = true;
        }
      }
      if (!closed && !part.empty()) parts.push_back(std::move(part));
    }
    if (parts.empty()) break;
    ++iter;
    if (iter > static_cast<int>(copies.size()) + 1) {
      throw Error(ErrorKind::Infeasible, "covering rounding made no progress");
    }
    const auto res = min_density_dgst(t, parts, seed + static_cast<std::uint64_t>(iter), &xcap);
    for (int v : res.solution.nodes) sel[v] = 1;
    refresh();
  }
  if (iterations) *iterations = iter;
  std::vector<char> targets(n, 0);
  for (const auto& g : groups) {
    for (int v : g) targets[v] = 1;
  }
  return make_tree_solution(t, prune_to(t, sel, targets));
}

GreedyResult recursive_greedy_polymatroid(const TreeInstance& t, const TreeSetFunction& f, int max_phases) {
  const int n = t.size();
  GreedyResult out;
  std::vector<int> all(n);
  for (int v = 0; v < n; ++v) all[v] = v;
  const long target = f(all);
  std::vector<int> support;
  for (int v = 0; v < n; ++v) {
    const int one[] = {v};
    if (f(one) > 0) support.push_back(v);
  }
  std::vector<char> sup(n, 0);
  for (int v : support) sup[v] = 1;
  const auto rel = has_below(t, sup);
  std::vector<std::vector<int>> below(n);  // support nodes in each relevant subtree
  for (int u : support) {
    for (int y = u; y >= 0; y = t.parent[y]) below[y].push_back(u);
  }
  std::vector<int> anchors;
  for (int v = 0; v < n; ++v) {
    if (!rel[v]) continue;
    int kids = 0;
    for (int c : t.children[v]) kids += rel[c];
    if (v == t.root || kids >= 2 || sup[v]) anchors.push_back(v);
  }
  std::vector<char> in(n, 0);
  in[t.root] = 1;
  std::vector<int> current{t.root};
  long value = f(current);
  while (value < target && (max_phases <= 0 || static_cast<int>(out.phase_density.size()) < max_phases)) {
    double best_density = kInf;
    std::vector<int> best_add;
    for (int v : anchors) {
      std::vector<char> local = in;
      std::vector<int> set = current;
      double spent = 0.0;
      for (int y = v; !local[y]; y = t.parent[y]) {
        local[y] = 1;
        set.push_back(y);
        spent += t.cost[y];
      }
      long gained = f(set) - value;
      std::vector<int> added(set.begin() + current.size(), set.end());
      if (gained > 0 && spent / gained < best_density) {
        best_density = spent / gained;
        best_add = added;
      }
      for (;;) {
        double step_density = kInf;
        int pick = -1;
        long pick_gain = 0;
        double pick_cost = 0.0;
        const long base = value + gained;
        for (int u : below[v]) {
          if (local[u]) continue;
          std::vector<int> trial = set;
          double c = 0.0;
          for (int y = u; !local[y]; y = t.parent[y]) {
            trial.push_back(y);
            c += t.cost[y];
          }
          const long g = f(trial) - base;
          if (g > 0 && c / g < step_density) {
            step_density = c / g;
            pick = u;
            pick_gain = g;
            pick_cost = c;
          }
        }
        if (pick < 0) break;
        for (int y = pick; !local[y]; y = t.parent[y]) {
          local[y] = 1;
          set.push_back(y);
          added.push_back(y);
        }
        spent += pick_cost;
        gained += pick_gain;
        if (spent / gained < best_density) {
          best_density = spent / gained;
          best_add = added;
        }
      }
    }
    if (best_add.empty()) throw Error(ErrorKind::UnreachableSupport, "no candidate increases f");
    for (int y : best_add) {
      if (!in[y]) {
        in[y] = 1;
        current.push_back(y);
      }
    }
    value = f(current);
    out.phase_density.push_back(best_density);
  }
  out.solution = make_tree_solution(t, current);
  return out;
}

namespace {

// Exact-count table: E[v][j] is the cheapest subtree at v containing exactly
// j labelled nodes.
class CountDp {
 public:
  explicit CountDp(const TreeInstance& t) : t_(t), E_(t.size()), steps_(t.size()) {
    const auto order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) solve(*it);
  }

  const std::vector<double>& at_root() const { return E_[t_.root]; }

  std::vector<int> rebuild(int j) const {
    std::vector<int> nodes;
    std::vector<std::pair<int, int>> stack{{t_.root, j}};
    while (!stack.empty()) {
      auto [v, cnt] = stack.back();
      stack.pop_back();
      nodes.push_back(v);
      const auto& st = steps_[v];
      if (t_.exclusive[v]) {
        const int rest = cnt - self(v);
        if (rest > 0) stack.push_back({st.pick[rest], rest});
        continue;
      }
      for (int i = static_cast<int>(st.split.size()) - 1; i >= 0; --i) {
        const int b = st.split[i][cnt];
        if (b > 0) stack.push_back({t_.children[v][i], b});
        cnt -= b;
      }
    }
    return nodes;
  }

 private:
  struct Steps {
    std::vector<std::vector<int>> split;  // free nodes: count taken from child i
    std::vector<int> pick;                // exclusive nodes: child serving count j
  };

  int self(int v) const { return t_.label[v] >= 0 ? 1 : 0; }

  void solve(int v) {
    std::vector<double> cur(self(v) + 1, kInf);
    cur[self(v)] = 0.0;
    Steps& st = steps_[v];
    if (t_.exclusive[v]) {
      std::vector<double> h{0.0};
      std::vector<int> pick{-1};
      for (int c : t_.children[v]) {
        const auto& ec = E_[c];
        if (ec.size() > h.size()) {
          h.resize(ec.size(), kInf);
          pick.resize(ec.size(), -1);
        }
        for (std::size_t j = 1; j < ec.size(); ++j) {
          const double val = t_.cost[c] + ec[j];
          if (val < h[j]) {
            h[j] = val;
            pick[j] = c;
          }
        }
      }
      std::vector<double> out(cur.size() + h.size() - 1, kInf);
      for (std::size_t j = 0; j < h.size(); ++j) out[j + self(v)] = h[j];
      E_[v] = std::move(out);
      st.pick = std::move(pick);
      return;
    }
    for (int c : t_.children[v]) {
      const auto& ec = E_[c];
      std::vector<double> out(cur.size() + ec.size() - 1, kInf);
      std::vector<int> split(out.size(), 0);
      for (std::size_t a = 0; a < cur.size(); ++a) {
        if (cur[a] == kInf) continue;
        if (cur[a] < out[a]) {
          out[a] = cur[a];
          split[a] = 0;
        }
        for (std::size_t b = 1; b < ec.size(); ++b) {
          const double val = cur[a] + t_.cost[c] + ec[b];
          if (val < out[a + b]) {
            out[a + b] = val;
            split[a + b] = static_cast<int>(b);
          }
        }
      }
      cur = std::move(out);
      st.split.push_back(std::move(split));
    }
    E_[v] = std::move(cur);
  }

  const TreeInstance& t_;
  std::vector<std::vector<double>> E_;
  std::vector<Steps> steps_;
};

}  // namespace

TreeSolution ldst_dp(const TreeInstance& t, int ell) {
  const int labels = t.num_labels();
  if (ell < 1 || ell > labels) {
    throw Error(ErrorKind::EllOutOfRange, "ell must lie in [1, " + std::to_string(labels) + "]");
  }
  CountDp dp(t);
  const auto& e = dp.at_root();
  int best = -1;
  for (int j = ell; j < static_cast<int>(e.size()); ++j) {
    if (e[j] < kInf && (best < 0 || e[j] < e[best])) best = j;
  }
  if (best < 0) throw Error(ErrorKind::Infeasible, "no subtree covers ell terminals");
  return make_tree_solution(t, dp.rebuild(best));
}

TreeSolution pc_dst_dp(const TreeInstance& t) {
  const int n = t.size();
  std::vector<double> prize = t.prize;
  prize.resize(n, 0.0);
  // Reward-form DP: P[v] = -prize(v) + best use of the children.
  std::vector<double> P(n, 0.0);
  std::vector<int> pick(n, -1);
  const auto order = t.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    double val = -prize[v];
    if (t.exclusive[v]) {
      double best = 0.0;
      for (int c : t.children[v]) {
        const double g = t.cost[c] + P[c];
        if (g < best) {
          best = g;
          pick[v] = c;
        }
      }
      val += best;
    } else {
      for (int c : t.children[v]) val += std::min(0.0, t.cost[c] + P[c]);
    }
    P[v] = val;
  }
  std::vector<int> nodes;
  std::vector<int> stack{t.root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    nodes.push_back(v);
    if (t.exclusive[v]) {
      if (pick[v] >= 0) stack.push_back(pick[v]);
      continue;
    }
    for (int c : t.children[v]) {
      if (t.cost[c] + P[c] < 0) stack.push_back(c);
    }
  }
  auto sol = make_tree_solution(t, nodes);
  std::vector<char> in(n, 0);
  for (int v : sol.nodes) in[v] = 1;
  std::map<int, std::pair<double, bool>> by_label;  // prize, covered
  sol.objective = sol.cost;
  for (int v = 0; v < n; ++v) {
    if (t.label[v] < 0) {
      if (!in[v]) sol.objective += prize[v];
      continue;
    }
    auto& e = by_label[t.label[v]];
    e.first = std::max(e.first, prize[v]);
    e.second = e.second || in[v];
  }
  for (const auto& [l, e] : by_label) {
    if (!e.second) sol.objective += e.first;
  }
  return sol;
}

MinDensityTree min_density_tree(const TreeInstance& t) {
  if (t.num_labels() == 0) throw Error(ErrorKind::NoTerminals, "tree has no terminals");
  CountDp dp(t);
  const auto& e = dp.at_root();
  const int top = static_cast<int>(e.size()) - 1;
  std::vector<double> suffix(e.size(), kInf);
  std::vector<int> arg(e.size(), -1);
  for (int j = top; j >= 1; --j) {
    suffix[j] = e[j];
    arg[j] = j;
    if (j < top && suffix[j + 1] < suffix[j]) {
      suffix[j] = suffix[j + 1];
      arg[j] = arg[j + 1];
    }
  }
  MinDensityTree out;
  out.density = kInf;
  for (int j = 1; j <= top; ++j) {
    if (suffix[j] == kInf) continue;
    const double d = suffix[j] / j;
    if (d < out.density - 1e-12) {
      out.density = d;
      out.ell = j;
    }
  }
  if (out.ell == 0) throw Error(ErrorKind::NoTerminals, "no terminal can be covered");
  out.solution = make_tree_solution(t, dp.rebuild(arg[out.ell]));
  return out;
}

}  // namespace dstp
