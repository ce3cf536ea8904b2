#include "dstp/gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace dstp {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  int uniform(int lo, int hi) {
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  bool coin(double p) { return unit() < p; }
  std::vector<int> sample(std::vector<int> pool, int count) {
    for (int i = 0; i < count; ++i) {
      const int j = uniform(i, static_cast<int>(pool.size()) - 1);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 eng_;
};

struct Edge {
  int u, v;
};

// Orients each undirected edge (one arc or both) and returns the arc list.
std::vector<Arc> orient(const std::vector<Edge>& edges, const GenSpec& spec, Rng& rng) {
  std::vector<Arc> arcs;
  for (const Edge& e : edges) {
    if (rng.coin(spec.both_directions)) {
      arcs.push_back({e.u, e.v, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
      arcs.push_back({e.v, e.u, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
    } else if (rng.coin(0.5)) {
      arcs.push_back({e.u, e.v, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
    } else {
      arcs.push_back({e.v, e.u, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
    }
  }
  return arcs;
}

// Adds reversed copies of arcs until every vertex is reachable from each root.
void force_reachability(int n, std::vector<Arc>& arcs, const std::vector<int>& roots,
                        const GenSpec& spec, Rng& rng) {
  for (int r : roots) {
    while (true) {
      std::vector<std::vector<int>> out(n);
      for (int a = 0; a < static_cast<int>(arcs.size()); ++a) out[arcs[a].tail].push_back(arcs[a].head);
      std::vector<char> seen(n, 0);
      std::vector<int> order{r};
      seen[r] = 1;
      for (std::size_t i = 0; i < order.size(); ++i) {
        for (int w : out[order[i]]) {
          if (!seen[w]) {
            seen[w] = 1;
            order.push_back(w);
          }
        }
      }
      if (static_cast<int>(order.size()) == n) break;
      bool added = false;
      const std::size_t m = arcs.size();
      for (std::size_t a = 0; a < m; ++a) {
        if (seen[arcs[a].head] && !seen[arcs[a].tail]) {
          arcs.push_back({arcs[a].head, arcs[a].tail, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
          seen[arcs[a].tail] = 1;
          added = true;
        }
      }
      if (!added) throw Error(ErrorKind::SpecInvalid, "generated graph is disconnected");
    }
  }
}

void finish_instance(ProblemInstance& inst, const GenSpec& spec, Rng& rng) {
  const int n = inst.graph.num_vertices();
  std::vector<int> pool;
  for (int v = 0; v < n; ++v) {
    if (std::find(inst.roots.begin(), inst.roots.end(), v) == inst.roots.end()) pool.push_back(v);
  }
  switch (spec.variant) {
    case Variant::DST:
      if (spec.k > static_cast<int>(pool.size())) throw Error(ErrorKind::SpecInvalid, "k exceeds n - R");
      inst.terminals = rng.sample(pool, spec.k);
      break;
    case Variant::DGST:
    case Variant::DCST:
      if (spec.group_size > static_cast<int>(pool.size()) || spec.group_size < 1) {
        throw Error(ErrorKind::SpecInvalid, "group size out of range");
      }
      for (int i = 0; i < spec.groups; ++i) inst.groups.push_back(rng.sample(pool, spec.group_size));
      if (spec.variant == Variant::DCST) {
        for (const auto& g : inst.groups) {
          inst.requirements.push_back(rng.uniform(1, std::min<int>(spec.max_requirement, g.size())));
        }
      }
      break;
    case Variant::DPST: {
      if (spec.polymatroid == "modular") {
        if (spec.k > static_cast<int>(pool.size())) throw Error(ErrorKind::SpecInvalid, "k exceeds n - R");
        std::map<int, long> w;
        for (int v : rng.sample(pool, spec.k)) w[v] = rng.uniform(1, 3);
        inst.polymatroid = PolymatroidHandle::modular(std::move(w));
      } else {
        std::vector<std::vector<int>> groups;
        for (int i = 0; i < spec.groups; ++i) groups.push_back(rng.sample(pool, spec.group_size));
        if (spec.polymatroid == "coverage") {
          inst.polymatroid = PolymatroidHandle::coverage(std::move(groups));
        } else if (spec.polymatroid == "truncated_partition") {
          std::vector<int> caps;
          for (const auto& g : groups) caps.push_back(rng.uniform(1, std::min<int>(spec.max_requirement, g.size())));
          inst.polymatroid = PolymatroidHandle::truncated_partition(std::move(groups), std::move(caps));
        } else {
          throw Error(ErrorKind::SpecInvalid, "unknown polymatroid kind " + spec.polymatroid);
        }
      }
      break;
    }
  }
  if (spec.prizes) {
    for (int v : inst.terminal_set()) inst.prizes[v] = rng.uniform(1, 2 * spec.max_cost);
  }
}

ProblemInstance build(int n, std::vector<Arc> arcs, std::vector<std::vector<Dart>> rotation,
                      std::vector<int> roots, const GenSpec& spec) {
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) arcs[a].id = a;
  ProblemInstance inst = make_instance(EmbeddedDigraph(n, std::move(arcs), std::move(rotation)),
                                       std::move(roots), spec.variant);
  return inst;
}

ProblemInstance lattice(const GenSpec& spec, Rng& rng, bool triangulated) {
  if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols < 2) {
    throw Error(ErrorKind::SpecInvalid, "grid needs at least two vertices");
  }
  const int R = spec.rows, C = spec.cols, n = R * C;
  auto id = [C](int i, int j) { return i * C + j; };
  std::vector<Edge> edges;
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      if (j + 1 < C) edges.push_back({id(i, j), id(i, j + 1)});
      if (i + 1 < R) edges.push_back({id(i, j), id(i + 1, j)});
      if (triangulated && i + 1 < R && j + 1 < C) {
        if (rng.coin(0.5)) edges.push_back({id(i, j), id(i + 1, j + 1)});
        else edges.push_back({id(i, j + 1), id(i + 1, j)});
      }
    }
  }
  std::vector<int> boundary;
  for (int j = 0; j < C; ++j) boundary.push_back(id(0, j));
  for (int i = 1; i < R; ++i) boundary.push_back(id(i, C - 1));
  if (R > 1) {
    for (int j = C - 2; j >= 0; --j) boundary.push_back(id(R - 1, j));
  }
  if (C > 1) {
    for (int i = R - 2; i >= 1; --i) boundary.push_back(id(i, 0));
  }
  if (spec.roots < 1 || spec.roots > static_cast<int>(boundary.size())) {
    throw Error(ErrorKind::SpecInvalid, "root count out of range");
  }
  std::vector<int> roots;
  for (int i = 0; i < spec.roots; ++i) {
    roots.push_back(boundary[i * boundary.size() / spec.roots]);
  }
  std::vector<Arc> arcs = orient(edges, spec, rng);
  force_reachability(n, arcs, roots, spec, rng);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      x[id(i, j)] = j;
      y[id(i, j)] = -i;
    }
  }
  auto rotation = rotation_from_positions(n, arcs, x, y);
  ProblemInstance inst = build(n, std::move(arcs), std::move(rotation), roots, spec);
  finish_instance(inst, spec, rng);
  return inst;
}

ProblemInstance series_parallel(const GenSpec& spec, Rng& rng) {
  if (spec.n < 2) throw Error(ErrorKind::SpecInvalid, "series-parallel needs n >= 2");
  // Undirected edges with a combinatorial rotation of edge ends (edge*2 + side).
  std::vector<Edge> edges{{0, 1}};
  std::vector<std::vector<int>> rot(2);
  rot[0] = {0};
  rot[1] = {1};
  int n = 2;
  auto end_at = [&](int e, int v) { return edges[e].u == v ? 2 * e : 2 * e + 1; };
  while (n < spec.n) {
    const int e = rng.uniform(0, static_cast<int>(edges.size()) - 1);
    const int u = edges[e].u, v = edges[e].v;
    const int w = n++;
    rot.emplace_back();
    if (rng.coin(0.5)) {
      // Series: subdivide e into (u, w) and (w, v).
      edges[e].v = w;
      const int f = static_cast<int>(edges.size());
      edges.push_back({w, v});
      auto& rv = rot[v];
      *std::find(rv.begin(), rv.end(), 2 * e + 1) = 2 * f + 1;
      rot[w] = {2 * e + 1, 2 * f};
    } else {
      // Parallel: a path u - w - v drawn beside e.
      const int f1 = static_cast<int>(edges.size());
      edges.push_back({u, w});
      const int f2 = static_cast<int>(edges.size());
      edges.push_back({w, v});
      auto& ru = rot[u];
      ru.insert(std::find(ru.begin(), ru.end(), end_at(e, u)) + 1, 2 * f1);
      auto& rv = rot[v];
      rv.insert(std::find(rv.begin(), rv.end(), end_at(e, v)), 2 * f2 + 1);
      rot[w] = {2 * f1 + 1, 2 * f2};
    }
  }
  // Outer face: the one through the first end at vertex 0.
  std::vector<int> pos(2 * edges.size());
  for (int v = 0; v < n; ++v) {
    for (int i = 0; i < static_cast<int>(rot[v].size()); ++i) pos[rot[v][i]] = i;
  }
  auto end_vertex = [&](int d) { return (d & 1) ? edges[d >> 1].v : edges[d >> 1].u; };
  std::vector<int> outer;
  {
    const int start = rot[0][0];
    int d = start;
    do {
      const int v = end_vertex(d);
      if (std::find(outer.begin(), outer.end(), v) == outer.end()) outer.push_back(v);
      const int t = d ^ 1;
      const auto& r = rot[end_vertex(t)];
      d = r[(pos[t] + 1) % r.size()];
    } while (d != start);
  }
  if (spec.roots < 1 || spec.roots > static_cast<int>(outer.size())) {
    throw Error(ErrorKind::SpecInvalid, "root count out of range");
  }
  std::vector<int> roots;
  for (int i = 0; i < spec.roots; ++i) roots.push_back(outer[i * outer.size() / spec.roots]);

  // Orient: each undirected edge becomes one or two arcs placed as a lens.
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> arcs_of_edge(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool both = rng.coin(spec.both_directions);
    const bool fwd = rng.coin(0.5);
    if (both || fwd) {
      arcs_of_edge[e].push_back(static_cast<int>(arcs.size()));
      arcs.push_back({edges[e].u, edges[e].v, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
    }
    if (both || !fwd) {
      arcs_of_edge[e].push_back(static_cast<int>(arcs.size()));
      arcs.push_back({edges[e].v, edges[e].u, static_cast<double>(rng.uniform(1, spec.max_cost)), 0});
    }
  }
  const std::size_t before = arcs.size();
  force_reachability(n, arcs, roots, spec, rng);
  // Reachability arcs reverse an existing arc; attach each to that arc's edge.
  for (std::size_t a = before; a < arcs.size(); ++a) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const bool match = (edges[e].u == arcs[a].tail && edges[e].v == arcs[a].head) ||
                         (edges[e].v == arcs[a].tail && edges[e].u == arcs[a].head);
      if (match) {
        arcs_of_edge[e].push_back(static_cast<int>(a));
        break;
      }
    }
  }
  std::vector<std::vector<Dart>> rotation(n);
  for (int v = 0; v < n; ++v) {
    for (int end : rot[v]) {
      const int e = end >> 1;
      std::vector<int> list = arcs_of_edge[e];
      if (edges[e].u != v) std::reverse(list.begin(), list.end());
      for (int a : list) rotation[v].push_back(arcs[a].tail == v ? tail_dart(a) : head_dart(a));
    }
  }
  ProblemInstance inst = build(n, std::move(arcs), std::move(rotation), roots, spec);
  finish_instance(inst, spec, rng);
  return inst;
}

}  // namespace

std::vector<std::vector<Dart>> rotation_from_positions(int n, const std::vector<Arc>& arcs,
                                                       const std::vector<double>& x,
                                                       const std::vector<double>& y) {
  std::vector<std::vector<Dart>> rotation(n);
  for (int v = 0; v < n; ++v) {
    std::vector<std::pair<double, Dart>> items;
    for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
      for (int side = 0; side < 2; ++side) {
        const int here = side ? arcs[a].head : arcs[a].tail;
        const int there = side ? arcs[a].tail : arcs[a].head;
        if (here != v) continue;
        items.push_back({std::atan2(y[there] - y[here], x[there] - x[here]), 2 * a + side});
      }
    }
    // Clockwise: decreasing angle. Parallel arcs keep list order at the
    // smaller endpoint and reverse order at the larger one.
    std::stable_sort(items.begin(), items.end(), [&](const auto& p, const auto& q) {
      if (p.first != q.first) return p.first > q.first;
      const Arc& ap = arcs[dart_arc(p.second)];
      const int other = ap.tail == v ? ap.head : ap.tail;
      return v < other ? p.second < q.second : p.second > q.second;
    });
    for (const auto& it : items) rotation[v].push_back(it.second);
  }
  return rotation;
}

ProblemInstance generate(const GenSpec& spec) {
  Rng rng(spec.seed);
  if (spec.max_cost < 1) throw Error(ErrorKind::SpecInvalid, "max_cost must be >= 1");
  ProblemInstance inst;
  if (spec.kind == "grid") {
    inst = lattice(spec, rng, false);
  } else if (spec.kind == "triangulated-disk") {
    inst = lattice(spec, rng, true);
  } else if (spec.kind == "series-parallel") {
    inst = series_parallel(spec, rng);
  } else {
    throw Error(ErrorKind::SpecInvalid, "unknown generator kind " + spec.kind);
  }
  try {
    inst.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::SpecInvalid, e.what());
  }
  return inst;
}

GenSpec gen_spec_from_json(const nlohmann::json& j) {
  GenSpec s;
  try {
    s.kind = j.value("kind", s.kind);
    s.rows = j.value("rows", s.rows);
    s.cols = j.value("cols", s.cols);
    s.n = j.value("n", s.n);
    const std::string v = j.value("variant", std::string("dst"));
    if (v == "dst") s.variant = Variant::DST;
    else if (v == "dgst") s.variant = Variant::DGST;
    else if (v == "dcst") s.variant = Variant::DCST;
    else if (v == "dpst") s.variant = Variant::DPST;
    else throw Error(ErrorKind::SpecInvalid, "unknown variant " + v);
    s.roots = j.value("roots", s.roots);
    s.k = j.value("k", s.k);
    s.groups = j.value("groups", s.groups);
    s.group_size = j.value("group_size", s.group_size);
    s.max_requirement = j.value("max_requirement", s.max_requirement);
    s.polymatroid = j.value("polymatroid", s.polymatroid);
    s.both_directions = j.value("both_directions", s.both_directions);
    s.max_cost = j.value("max_cost", s.max_cost);
    s.prizes = j.value("prizes", s.prizes);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SpecInvalid, e.what());
  }
  return s;
}

}  // namespace dstp
