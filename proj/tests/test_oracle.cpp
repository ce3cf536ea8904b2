#include <doctest.h>

#include <algorithm>
#include <bit>

#include "dstp/oracle.hpp"
#include "helpers.hpp"

using namespace dstp;
using testutil::drawn;

namespace {

// Minimum over every arc subset whose reachable set satisfies `ok`.
template <class Ok>
double enumerate_arcs(const ProblemInstance& inst, Ok ok) {
  const auto& g = inst.graph;
  const int m = g.num_arcs();
  double best = kInf;
  std::vector<int> arcs;
  for (long mask = 0; mask < (1L << m); ++mask) {
    double c = 0;
    arcs.clear();
    for (int a = 0; a < m; ++a) {
      if (mask >> a & 1) {
        arcs.push_back(a);
        c += g.arc(a).cost;
      }
    }
    if (c >= best) continue;
    const auto seen = reachable_through(g, arcs, inst.roots);
    std::vector<int> covered;
    for (int t : inst.terminal_set()) {
      if (seen[t]) covered.push_back(t);
    }
    if (ok(covered, c)) best = c;
  }
  return best;
}

ProblemInstance small(std::uint64_t seed, Variant v, int roots = 1) {
  for (std::uint64_t s = seed;; s += 1000) {
    GenSpec spec;
    spec.kind = s % 2 ? "grid" : "triangulated-disk";
    spec.rows = 3;
    spec.cols = 3;
    spec.k = 2 + s % 4;
    spec.variant = v;
    spec.roots = roots;
    spec.groups = 2 + s % 2;
    spec.group_size = 2;
    spec.polymatroid = s % 3 == 0 ? "modular" : s % 3 == 1 ? "coverage" : "truncated_partition";
    spec.seed = s;
    spec.both_directions = 0.1;
    spec.prizes = true;
    auto inst = generate(spec);
    if (inst.graph.num_arcs() <= 16) return inst;
  }
}

void check_solution(const ProblemInstance& inst, const OracleSolution& s) {
  auto ev = evaluate_solution(inst, s.arcs);
  CHECK(ev.cost == doctest::Approx(s.cost));
  CHECK(satisfies(inst, ev.covered));
}

}  // namespace

TEST_CASE("diamond and single terminal") {
  // r=0, a=1, b=2, t=3
  auto g = drawn({{0, 1, 1}, {1, 3, 1}, {0, 2, 2}, {2, 3, 1}}, {0, 1, -1, 0}, {0, 1, 1, 2});
  auto s = exact_dst(g, 0, {1, 3});
  CHECK(s.cost == 2.0);
  CHECK(check_out_tree(g, s.arcs, 0).ok);
  CHECK(exact_dst(g, 0, {3}).cost == 2.0);
  CHECK(exact_dst(g, 0, {2}).cost == 2.0);
  CHECK_THROWS_AS(exact_dst(g, 3, {0}), Error);
  std::vector<int> many(15);
  for (int i = 0; i < 15; ++i) many[i] = i;
  auto big = testutil::grid(4, 4, 4, 1);
  CHECK_THROWS_AS(exact_dst(big.graph, 0, many), Error);
}

TEST_CASE("subset DP equals arc-subset enumeration") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto inst = small(seed, Variant::DST);
    SteinerTable table(inst.graph, inst.terminals);
    CHECK(table.monotone());
    for (int i = 0; i < table.num_terminals(); ++i) {
      CHECK(table.cost(1u << i, inst.root()) ==
            doctest::Approx(shortest_path_tree(inst.graph, inst.root()).dist[table.terminals()[i]]));
    }
    auto s = exact_dst(inst.graph, inst.root(), inst.terminals);
    const std::size_t k = inst.terminals.size();
    const double brute = enumerate_arcs(inst, [&](const std::vector<int>& c, double) { return c.size() == k; });
    CHECK(s.cost == doctest::Approx(brute));
    CHECK(check_out_tree(inst.graph, s.arcs, inst.root()).ok);
    check_solution(inst, s);

    double best_density = kInf;
    const int m = inst.graph.num_arcs();
    for (long mask = 1; mask < (1L << m); ++mask) {
      std::vector<int> arcs;
      double c = 0;
      for (int a = 0; a < m; ++a) {
        if (mask >> a & 1) {
          arcs.push_back(a);
          c += inst.graph.arc(a).cost;
        }
      }
      auto ev = evaluate_solution(inst, arcs);
      if (!ev.covered.empty()) best_density = std::min(best_density, c / ev.covered.size());
    }
    CHECK(exact_min_density(inst).density == doctest::Approx(best_density));

    const int l = 1 + static_cast<int>(seed % k);
    const double ell_brute = enumerate_arcs(
        inst, [&](const std::vector<int>& c, double) { return static_cast<int>(c.size()) >= l; });
    CHECK(exact_ell(inst, l).cost == doctest::Approx(ell_brute));

    double pc_brute = kInf;
    for (long mask = 0; mask < (1L << m); ++mask) {
      std::vector<int> arcs;
      double c = 0;
      for (int a = 0; a < m; ++a) {
        if (mask >> a & 1) {
          arcs.push_back(a);
          c += inst.graph.arc(a).cost;
        }
      }
      auto ev = evaluate_solution(inst, arcs);
      for (int t : inst.terminals) {
        if (std::find(ev.covered.begin(), ev.covered.end(), t) == ev.covered.end()) c += inst.prizes.at(t);
      }
      pc_brute = std::min(pc_brute, c);
    }
    CHECK(exact_prize_collecting(inst).objective == doctest::Approx(pc_brute));
  }
}

TEST_CASE("variants equal enumeration") {
  for (Variant v : {Variant::DGST, Variant::DCST, Variant::DPST}) {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      auto inst = small(seed * 7, v);
      const double brute =
          enumerate_arcs(inst, [&](const std::vector<int>& c, double) { return satisfies(inst, c); });
      auto s = exact_variant(inst);
      CHECK(s.cost == doctest::Approx(brute));
      check_solution(inst, s);
    }
  }
}

TEST_CASE("variant reductions") {
  auto g = drawn({{0, 1, 1}, {0, 2, 2}, {0, 3, 3}}, {0, 1, 0, -1}, {0, 0, 1, 0});
  auto gst = make_instance(g, {0}, Variant::DGST);
  gst.groups = {{1}, {3}};
  CHECK(exact_variant(gst).cost == exact_dst(g, 0, {1, 3}).cost);
  auto cst = make_instance(g, {0}, Variant::DCST);
  cst.groups = {{1, 2, 3}};
  cst.requirements = {3};
  CHECK(exact_variant(cst).cost == exact_dst(g, 0, {1, 2, 3}).cost);
  auto dst = make_instance(g, {0}, Variant::DST);
  dst.terminals = {1, 2, 3};
  CHECK(exact_min_density(dst).density == 1.0);
}

TEST_CASE("multiple roots") {
  // Roots 0 and 2, each with its own terminal.
  auto g = drawn({{0, 1, 1}, {2, 3, 1}, {0, 3, 5}}, {0, 0, 3, 3}, {0, 1, 0, 1});
  auto two = make_instance(g, {0, 2}, Variant::DST);
  two.terminals = {1, 3};
  CHECK(exact_multiroot(two).cost == 2.0);
  auto one = make_instance(g, {0}, Variant::DST);
  one.terminals = {1, 3};
  CHECK(exact_multiroot(one).cost == exact_variant(one).cost);

  for (Variant v : {Variant::DST, Variant::DGST, Variant::DCST, Variant::DPST}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst = small(seed * 13, v, 3);
      const double brute =
          enumerate_arcs(inst, [&](const std::vector<int>& c, double) { return satisfies(inst, c); });
      auto s = exact_multiroot(inst);
      CHECK(s.cost == doctest::Approx(brute));
      check_solution(inst, s);
    }
  }
}
