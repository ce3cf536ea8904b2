#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "dstp/separator.hpp"
#include "helpers.hpp"

using namespace dstp;
using testutil::drawn;

namespace {

std::vector<int> tree_parents(const EmbeddedDigraph& g, int r) {
  return shortest_path_tree(g, r).parent_arc;
}

// Digons from parallel arcs are left alone; every other face is a triangle.
bool all_triangles(const EmbeddedDigraph& g) {
  for (const auto& f : trace_faces(g)) {
    if (f.size() > 3) return false;
  }
  return true;
}

EmbeddedDigraph star(int leaves) {
  std::vector<testutil::A> arcs;
  std::vector<double> x{0}, y{0};
  for (int i = 0; i < leaves; ++i) {
    x.push_back(std::cos(2 * M_PI * i / leaves));
    y.push_back(std::sin(2 * M_PI * i / leaves));
    arcs.push_back({0, i + 1, 1});
  }
  return drawn(arcs, x, y);
}

// Components of the triangulation minus the cycle, checked independently of
// the face walk used by the separator.
double heaviest_off_cycle(const Triangulation& tri, const std::vector<int>& parent, int edge,
                          const std::vector<double>& w) {
  const auto& g = tri.graph;
  std::vector<char> on(g.num_vertices(), 0);
  auto climb = [&](int v) {
    for (int x = v;; x = g.arc(parent[x]).tail) {
      on[x] = 1;
      if (parent[x] < 0) break;
    }
  };
  climb(g.arc(edge).tail);
  climb(g.arc(edge).head);
  // Only vertices strictly on the cycle are removed: drop the shared prefix.
  std::vector<char> a(g.num_vertices(), 0);
  for (int x = g.arc(edge).tail;; x = g.arc(parent[x]).tail) {
    a[x] = 1;
    if (parent[x] < 0) break;
  }
  int lca = g.arc(edge).head;
  while (!a[lca]) lca = g.arc(parent[lca]).tail;
  for (int x = lca; parent[x] >= 0;) {
    x = g.arc(parent[x]).tail;
    on[x] = 0;
  }
  double heavy = 0;
  for (const auto& comp : weak_components(g, on)) {
    double s = 0;
    for (int v : comp) s += w[v];
    heavy = std::max(heavy, s);
  }
  return heavy;
}

}  // namespace

TEST_CASE("triangulation") {
  auto square = drawn({{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}, {0, 1, 1, 0}, {0, 0, 1, 1});
  auto t = triangulate(square);
  CHECK(t.graph.num_arcs() - t.original_arcs == 2);  // one chord in each of the two 4-faces
  CHECK(validate_planar_embedding(t.graph) == 4);
  CHECK(all_triangles(t.graph));
  for (int a = t.original_arcs; a < t.graph.num_arcs(); ++a) CHECK(t.graph.arc(a).cost == 0.0);

  auto tri = drawn({{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}, {0, 1, 0}, {0, 0, 1});
  CHECK(triangulate(tri).graph.num_arcs() == 3);
  auto again = triangulate(t.graph);
  CHECK(again.graph.num_arcs() == t.graph.num_arcs());

  auto grid = testutil::grid(6, 6, 2, 4);
  auto tg = triangulate(grid.graph);
  const int n = tg.graph.num_vertices(), m = tg.graph.num_arcs();
  const int faces = validate_planar_embedding(tg.graph);
  CHECK(n - m + faces == 2);
  CHECK(all_triangles(tg.graph));
  std::size_t sides = 0;
  for (const auto& f : trace_faces(tg.graph)) sides += f.size();
  CHECK(sides == static_cast<std::size_t>(2 * m));

  auto two = drawn({{0, 1, 1}, {2, 3, 1}}, {0, 1, 0, 1}, {0, 0, 1, 1});
  CHECK_THROWS_AS(triangulate(two), Error);
}

TEST_CASE("fundamental cycles") {
  // Triangle, star tree from 0.
  auto tri = drawn({{0, 1, 1}, {0, 2, 1}, {1, 2, 1}}, {0, 1, 0}, {0, 0, 1});
  auto t = triangulate(tri);
  std::vector<double> w{1, 1, 1};
  auto fc = fundamental_cycle_separator(t, tree_parents(tri, 0), 0, w);
  CHECK_FALSE(fc.degenerate);
  CHECK(fc.inside <= 2.0);
  CHECK(fc.outside <= 2.0);

  // Star on five leaves with unit weights on the leaves.
  auto s = star(5);
  auto ts = triangulate(s);
  std::vector<double> ws{0, 1, 1, 1, 1, 1};
  const auto parent = tree_parents(ts.graph, 0);
  auto best = fundamental_cycle_separator(ts, parent, 0, ws);
  CHECK(std::max(best.inside, best.outside) <= 3.0);
  std::vector<char> tree(ts.graph.num_arcs(), 0);
  for (int p : parent) {
    if (p >= 0) tree[p] = 1;
  }
  double optimum = kInf;
  for (int a = 0; a < ts.graph.num_arcs(); ++a) {
    if (tree[a]) continue;
    optimum = std::min(optimum, heaviest_off_cycle(ts, parent, a, ws));
  }
  CHECK(heaviest_off_cycle(ts, parent, best.edge, ws) == optimum);

  // Path graph: a tree with no room for a chord.
  auto path = drawn({{0, 1, 1}}, {0, 1}, {0, 0});
  auto tp = triangulate(path);
  auto deg = fundamental_cycle_separator(tp, tree_parents(path, 0), 0, std::vector<double>{0, 1});
  CHECK(deg.degenerate);
}

TEST_CASE("fundamental cycles balance on random triangulations") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto inst = testutil::grid(5, 6, 8, seed, seed % 2 ? "grid" : "triangulated-disk");
    auto t = triangulate(inst.graph);
    const auto parent = tree_parents(inst.graph, inst.root());
    std::vector<double> w(inst.graph.num_vertices(), 0.0);
    for (int v : inst.terminals) w[v] = 1.0;
    auto fc = fundamental_cycle_separator(t, parent, inst.root(), w);
    CHECK(std::max(fc.inside, fc.outside) <= 2.0 / 3.0 * 8 + 1e-9);
    CHECK(heaviest_off_cycle(t, parent, fc.edge, w) <= std::max(fc.inside, fc.outside));
  }
}

TEST_CASE("shortest path separators") {
  auto s = star(5);
  std::vector<double> ws{0, 1, 1, 1, 1, 1};
  auto res = shortest_path_separator(s, 0, ws);
  CHECK(res.paths.size() == 1);
  CHECK(res.beta == doctest::Approx(0.2));
  for (double cw : res.component_weight) CHECK(cw <= 1.0);

  auto two = drawn({{0, 1, 2}, {1, 2, 3}}, {0, 1, 2}, {0, 0, 0});
  auto r2 = shortest_path_separator(two, 0, std::vector<double>{0, 1, 1});
  CHECK(r2.paths.size() == 1);
  CHECK(r2.beta <= 0.5);

  auto iso = drawn({{0, 1, 1}}, {0, 1, 3}, {0, 0, 3});
  CHECK_THROWS_AS(shortest_path_separator(iso, 0, std::vector<double>{0, 0, 1}), Error);

  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto inst = testutil::grid(6, 6, 8, seed, seed % 3 ? "grid" : "triangulated-disk");
    std::vector<double> w(36, 0.0);
    for (int v : inst.terminals) w[v] = 1.0;
    auto sep = shortest_path_separator(inst.graph, inst.root(), w);
    const auto spt = shortest_path_tree(inst.graph, inst.root());
    double radius = 0;
    for (double d : spt.dist) radius = std::max(radius, d);
    double sum = 0;
    CHECK(sep.paths.size() <= static_cast<std::size_t>(kMaxSeparatorPaths));
    for (std::size_t i = 0; i < sep.paths.size(); ++i) {
      const double c = arc_set_cost(inst.graph, sep.paths[i]);
      CHECK(c == spt.dist[sep.path_ends[i]]);
      sum += c;
    }
    CHECK(sum <= kMaxSeparatorPaths * radius);
    CHECK(sep.beta <= 0.5);
  }
}

TEST_CASE("prune and separate") {
  // Single terminal within reach: P is its shortest path and no component remains.
  auto line = drawn({{0, 1, 1}, {1, 2, 1}, {0, 3, 5}}, {0, 1, 2, -1}, {0, 0, 0, 0});
  auto one = prune_and_separate(line, 0, {2}, 4);
  CHECK(one.components.empty());
  CHECK(one.separator_cost == 2.0);
  CHECK(one.terminals_on_separator == std::vector<int>{2});

  auto far = prune_and_separate(line, 0, {3}, 4);
  CHECK(far.pruned_terminals == std::vector<int>{3});
  CHECK(far.paths.empty());

  CHECK_THROWS_AS(prune_and_separate(line, 0, {2}, 0), Error);

  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = testutil::grid(7, 7, 8, 500 + seed, seed % 2 ? "grid" : "triangulated-disk");
    const auto& g = inst.graph;
    const auto spt = shortest_path_tree(g, inst.root());
    double gamma = 0;
    for (int t : inst.terminals) gamma = std::max(gamma, spt.dist[t]);
    auto res = prune_and_separate(g, inst.root(), inst.terminals, gamma);
    CHECK(res.path_cost_sum <= kMaxSeparatorPaths * gamma);
    CHECK(res.separator_cost <= res.path_cost_sum);
    for (const auto& p : res.paths) {
      CHECK(arc_set_cost(g, p) == spt.dist[g.arc(p.back()).head]);
      for (int a : p) CHECK(a < g.num_arcs());
    }
    std::set<int> used;
    std::size_t covered = res.terminals_on_separator.size();
    for (const auto& c : res.components) {
      CHECK(c.terminals.size() <= 4);
      CHECK_NOTHROW(validate_planar_embedding(c.sub.graph));
      covered += c.terminals.size();
      for (int v = 0; v < c.sub.graph.num_vertices(); ++v) {
        if (v == c.sub.root) continue;
        CHECK(used.insert(c.sub.vertex_parent[v]).second);
      }
    }
    CHECK(covered == inst.terminals.size());
  }
}
