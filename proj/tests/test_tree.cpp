#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "dstp/tree.hpp"

using namespace dstp;

namespace {

TreeInstance star(const std::vector<double>& leaf_costs) {
  TreeInstance t = tree_from_parents({-1}, {0.0});
  for (std::size_t i = 0; i < leaf_costs.size(); ++i) t.add_node(0, leaf_costs[i], static_cast<int>(i));
  return t;
}

TreeInstance random_tree(std::mt19937& rng, int n, bool exclusive, bool prizes) {
  std::uniform_int_distribution<int> cost(0, 6);
  std::bernoulli_distribution coin(0.5);
  TreeInstance t = tree_from_parents({-1}, {0.0});
  if (prizes) t.prize.assign(1, 0.0);
  int next_label = 0;
  for (int v = 1; v < n; ++v) {
    const int p = std::uniform_int_distribution<int>(0, v - 1)(rng);
    t.add_node(p, cost(rng), coin(rng) ? next_label++ : -1);
    if (prizes) t.prize[v] = t.label[v] >= 0 ? cost(rng) + 0.5 : 0.0;
  }
  if (exclusive) {
    for (int v = 0; v < n; ++v) t.exclusive[v] = coin(rng) && coin(rng);
  }
  return t;
}

// Every subtree containing the root that respects the exclusive flags.
std::vector<std::vector<char>> all_subtrees(const TreeInstance& t) {
  std::vector<std::vector<char>> out;
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
    for (int v = 0; v < n && ok; ++v) {
      if (t.exclusive[v] && used[v] > 1) ok = false;
    }
    if (!ok) continue;
    std::vector<char> in(n);
    for (int v = 0; v < n; ++v) in[v] = mask >> v & 1;
    out.push_back(std::move(in));
  }
  return out;
}

double subtree_cost(const TreeInstance& t, const std::vector<char>& in) {
  double c = 0;
  for (int v = 0; v < t.size(); ++v) {
    if (in[v] && v != t.root) c += t.cost[v];
  }
  return c;
}

int labels_in(const TreeInstance& t, const std::vector<char>& in) {
  std::set<int> s;
  for (int v = 0; v < t.size(); ++v) {
    if (in[v] && t.label[v] >= 0) s.insert(t.label[v]);
  }
  return static_cast<int>(s.size());
}

bool respects(const TreeInstance& t, const TreeSolution& s) {
  std::vector<char> in(t.size(), 0);
  for (int v : s.nodes) in[v] = 1;
  if (!in[t.root]) return false;
  std::vector<int> used(t.size(), 0);
  for (int v : s.nodes) {
    if (v == t.root) continue;
    if (!in[t.parent[v]]) return false;
    ++used[t.parent[v]];
  }
  for (int v = 0; v < t.size(); ++v) {
    if (t.exclusive[v] && used[v] > 1) return false;
  }
  return true;
}

std::vector<std::vector<int>> random_groups(const TreeInstance& t, std::mt19937& rng, int q) {
  std::vector<std::vector<int>> groups(q);
  std::uniform_int_distribution<int> pick(1, t.size() - 1);
  for (auto& g : groups) {
    std::set<int> s;
    const int sz = std::uniform_int_distribution<int>(1, std::min(3, t.size() - 1))(rng);
    while (static_cast<int>(s.size()) < sz) s.insert(pick(rng));
    g.assign(s.begin(), s.end());
  }
  return groups;
}

double brute_gst(const TreeInstance& t, const std::vector<std::vector<int>>& groups) {
  double best = kInf;
  for (const auto& in : all_subtrees(t)) {
    bool ok = true;
    for (const auto& g : groups) {
      bool hit = false;
      for (int v : g) hit = hit || in[v];
      ok = ok && hit;
    }
    if (ok) best = std::min(best, subtree_cost(t, in));
  }
  return best;
}

bool covers_all(const TreeSolution& s, const std::vector<std::vector<int>>& groups) {
  std::set<int> in(s.nodes.begin(), s.nodes.end());
  for (const auto& g : groups) {
    bool hit = false;
    for (int v : g) hit = hit || in.count(v);
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("binarize") {
  auto t = star({1, 2, 3, 4});
  auto b = binarize(t);
  CHECK(b.size() == 7);
  int aux = 0;
  for (int v = 0; v < b.size(); ++v) {
    CHECK(b.children[v].size() <= 2);
    if (b.origin[v] < 0) {
      ++aux;
      CHECK(b.cost[v] == 0.0);
    }
  }
  CHECK(aux == 2);

  auto bin = star({1, 2});
  auto same = binarize(bin);
  CHECK(same.parent == bin.parent);
  CHECK(same.cost == bin.cost);

  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto r = random_tree(rng, 30, trial % 2, false);
    auto rb = binarize(r);
    for (int v = 0; v < rb.size(); ++v) CHECK(rb.children[v].size() <= 2);
    for (int ell = 1; ell <= r.num_labels(); ++ell) {
      bool a_ok = true, b_ok = true;
      double a = 0, c = 0;
      try {
        a = ldst_dp(r, ell).cost;
      } catch (const Error&) {
        a_ok = false;
      }
      try {
        auto s = ldst_dp(rb, ell);
        c = s.cost;
        auto back = make_tree_solution(r, unbinarize(rb, s));
        CHECK(back.cost == doctest::Approx(c));
        CHECK(respects(r, back));
      } catch (const Error&) {
        b_ok = false;
      }
      CHECK(a_ok == b_ok);
      if (a_ok && b_ok) CHECK(a == doctest::Approx(c));
    }
  }
}

TEST_CASE("ldst and min density examples") {
  auto t = star({1, 2, 3});
  CHECK(ldst_dp(t, 2).cost == 3.0);
  CHECK_THROWS_AS(ldst_dp(t, 0), Error);
  CHECK_THROWS_AS(ldst_dp(t, 4), Error);

  auto ex = star({1, 1});
  ex.exclusive[0] = 1;
  try {
    ldst_dp(ex, 2);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }

  auto md = min_density_tree(t);
  CHECK(md.ell == 1);
  CHECK(md.density == 1.0);
  auto uni = min_density_tree(star({2, 2, 2}));
  CHECK(uni.ell == 1);
  CHECK(uni.density == 2.0);
  CHECK_THROWS_AS(min_density_tree(tree_from_parents({-1, 0}, {0, 1})), Error);
}

TEST_CASE("pc examples") {
  auto t = star({3});
  t.prize = {0.0, 5.0};
  auto buy = pc_dst_dp(t);
  CHECK(buy.objective == 3.0);
  CHECK(buy.nodes.size() == 2);
  t.prize = {0.0, 2.0};
  auto skip = pc_dst_dp(t);
  CHECK(skip.objective == 2.0);
  CHECK(skip.nodes.size() == 1);
}

TEST_CASE("tree DPs match exhaustive enumeration") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 600; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    auto t = random_tree(rng, n, trial % 2, true);
    const bool use_bin = trial % 3 == 0;
    auto solve_on = use_bin ? binarize(t) : t;
    const auto subs = all_subtrees(t);
    const int labels = t.num_labels();

    double pc_best = kInf, dens_best = kInf;
    std::vector<double> at_least(labels + 1, kInf);
    for (const auto& in : subs) {
      const double c = subtree_cost(t, in);
      const int l = labels_in(t, in);
      double pc = c;
      for (int v = 0; v < n; ++v) {
        if (!in[v]) pc += t.prize[v];
      }
      pc_best = std::min(pc_best, pc);
      for (int j = 1; j <= l; ++j) at_least[j] = std::min(at_least[j], c);
      if (l > 0) dens_best = std::min(dens_best, c / l);
    }

    auto pc = pc_dst_dp(solve_on);
    CHECK(pc.objective == doctest::Approx(pc_best));
    CHECK(respects(solve_on, pc));
    for (int ell = 1; ell <= labels; ++ell) {
      if (at_least[ell] == kInf) {
        CHECK_THROWS_AS(ldst_dp(solve_on, ell), Error);
        continue;
      }
      auto s = ldst_dp(solve_on, ell);
      CHECK(s.cost == doctest::Approx(at_least[ell]));
      CHECK(s.covered >= ell);
      CHECK(respects(solve_on, s));
    }
    if (labels > 0) {
      auto md = min_density_tree(solve_on);
      CHECK(md.density == doctest::Approx(dens_best));
      CHECK(md.solution.cost / md.solution.covered == doctest::Approx(dens_best));
    }
  }
}

TEST_CASE("group Steiner LP and rounding") {
  auto s2 = star({1, 1});
  auto lp = gst_lp_solve(s2, {{1}, {2}});
  CHECK(lp.objective == doctest::Approx(2));
  CHECK(lp.x[1] == doctest::Approx(1));
  CHECK(lp.x[2] == doctest::Approx(1));
  CHECK(gst_lp_solve(s2, {{1, 2}}).objective == doctest::Approx(1));
  CHECK_THROWS_AS(gst_lp_solve(s2, {{}}), Error);

  auto integral = gkr_round(s2, {{1}}, {0.0, 1.0, 0.0}, 3);
  CHECK(integral.nodes == std::vector<int>{0, 1});
  auto exact_star = gkr_round(s2, {{1}, {2}}, lp.x, 3);
  CHECK(exact_star.cost == 2.0);

  std::mt19937 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 12)(rng);
    auto t = random_tree(rng, n, false, false);
    auto groups = random_groups(t, rng, std::uniform_int_distribution<int>(1, 4)(rng));
    const double opt = brute_gst(t, groups);
    auto ex = gst_exact(t, groups);
    CHECK(ex.cost == doctest::Approx(opt));
    CHECK(covers_all(ex, groups));
    auto glp = gst_lp_solve(t, groups);
    CHECK(glp.objective <= opt + 1e-7);
    for (int v = 0; v < n; ++v) {
      if (v != t.root && t.parent[v] != t.root) CHECK(glp.x[v] <= glp.x[t.parent[v]] + 1e-9);
    }
    auto r = gkr_round(t, groups, glp.x, trial);
    CHECK(covers_all(r, groups));
    CHECK(respects(t, r));
  }
}

TEST_CASE("GKR mean cost bound") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = random_tree(rng, 40, false, false);
    auto groups = random_groups(t, rng, 5);
    auto lp = gst_lp_solve(t, groups);
    double sum = 0;
    for (int s = 0; s < 200; ++s) sum += gkr_round(t, groups, lp.x, s).cost;
    const double bound = 20.0 * t.height() * (1 + std::log(5.0)) * lp.objective;
    CHECK(sum / 200 <= bound + 1e-9);
  }
}

TEST_CASE("min density group Steiner") {
  auto t = star({1, 3});
  auto r = min_density_dgst(t, {{1}, {2}}, 1);
  CHECK(r.density == 1.0);
  CHECK(r.solution.nodes == std::vector<int>{0, 1});

  auto single = min_density_dgst(star({4, 2, 5}), {{1, 2, 3}}, 1);
  CHECK(single.density == 2.0);
  CHECK_THROWS_AS(min_density_dgst(t, {{}}, 1), Error);

  std::mt19937 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto rt = random_tree(rng, 12, false, false);
    auto groups = random_groups(rt, rng, 3);
    auto res = min_density_dgst(rt, groups, trial);
    int hit = 0;
    for (const auto& g : groups) {
      std::set<int> in(res.solution.nodes.begin(), res.solution.nodes.end());
      bool h = false;
      for (int v : g) h = h || in.count(v);
      hit += h;
    }
    CHECK(hit == res.groups_covered);
    CHECK(res.density == doctest::Approx(res.solution.cost / hit));
    for (int leaf = 1; leaf < rt.size(); ++leaf) {
      std::set<int> path;
      double c = 0;
      for (int y = leaf; y != rt.root; y = rt.parent[y]) {
        path.insert(y);
        c += rt.cost[y];
      }
      int ph = 0;
      for (const auto& g : groups) {
        bool h = false;
        for (int v : g) h = h || path.count(v);
        ph += h;
      }
      if (ph > 0) CHECK(res.density <= c / ph + 1e-9);
    }
  }
}

TEST_CASE("covering Steiner LP and rounding") {
  auto two = star({1, 1});
  auto lp = dcst_lp_solve(two, {{1, 2}}, {2});
  CHECK(lp.objective == doctest::Approx(2));
  CHECK(lp.f[1] == doctest::Approx(1));
  CHECK(lp.f[2] == doctest::Approx(1));
  auto both = dcst_iterative_round(two, {{1, 2}}, {2}, lp, 1);
  CHECK(both.cost == 2.0);
  CHECK(dcst_lp_solve(two, {{1, 2}}, {0}).objective == doctest::Approx(0));
  CHECK_THROWS_AS(dcst_lp_solve(two, {{1}}, {2}), Error);

  std::mt19937 rng(10);
  for (int trial = 0; trial < 120; ++trial) {
    auto t = random_tree(rng, std::uniform_int_distribution<int>(4, 12)(rng), false, false);
    auto groups = random_groups(t, rng, 2);
    std::vector<int> h;
    for (const auto& g : groups) h.push_back(std::uniform_int_distribution<int>(1, static_cast<int>(g.size()))(rng));
    // Unlabelled group members count by node; give them keys consistent with the LP.
    double opt = kInf;
    for (const auto& in : all_subtrees(t)) {
      bool ok = true;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        std::set<int> keys;
        for (int v : groups[i]) {
          if (in[v]) keys.insert(t.label[v] >= 0 ? t.label[v] : -(v + 1));
        }
        ok = ok && static_cast<int>(keys.size()) >= h[i];
      }
      if (ok) opt = std::min(opt, subtree_cost(t, in));
    }
    auto l = dcst_lp_solve(t, groups, h);
    CHECK(l.objective <= opt + 1e-7);
    auto s = dcst_iterative_round(t, groups, h, l, trial);
    std::set<int> in(s.nodes.begin(), s.nodes.end());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      std::set<int> keys;
      for (int v : groups[i]) {
        if (in.count(v)) keys.insert(t.label[v] >= 0 ? t.label[v] : -(v + 1));
      }
      CHECK(static_cast<int>(keys.size()) >= h[i]);
    }
  }
}

TEST_CASE("recursive greedy") {
  auto path_tree = tree_from_parents({-1, 0, 1, 0}, {0, 2, 2, 1});
  auto modular = [](std::span<const int> z) {
    long s = 0;
    for (int v : z) s += v == 2;
    return s;
  };
  auto g = recursive_greedy_polymatroid(path_tree, modular);
  CHECK(g.solution.nodes == std::vector<int>{0, 1, 2});
  CHECK(g.solution.cost == 4.0);

  auto s = star({1, 2, 3});
  auto coverage = [](std::span<const int> z) {
    std::set<int> hit;
    for (int v : z) {
      if (v >= 1) hit.insert(v);
    }
    return static_cast<long>(hit.size());
  };
  CHECK(recursive_greedy_polymatroid(s, coverage).solution.cost == 6.0);

  std::mt19937 rng(12);
  for (int trial = 0; trial < 80; ++trial) {
    auto t = binarize(random_tree(rng, 12, false, false));
    const int k = std::uniform_int_distribution<int>(1, 6)(rng);
    auto groups = random_groups(t, rng, k);
    auto f = [&](std::span<const int> z) {
      std::set<int> zs(z.begin(), z.end());
      long c = 0;
      for (const auto& gr : groups) {
        bool hit = false;
        for (int v : gr) hit = hit || zs.count(v);
        c += hit;
      }
      return c;
    };
    auto res = recursive_greedy_polymatroid(t, f);
    CHECK(f(res.solution.nodes) == static_cast<long>(k));
    const double opt = gst_exact(t, groups).cost;
    const double ratio_bound = 4 * std::pow(1 + std::log(static_cast<double>(k)), 2);
    CHECK(res.solution.cost <= ratio_bound * opt + 1e-9);
    CHECK(!res.phase_density.empty());
  }
}
