#include "dstp/graph.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

namespace dstp {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

EmbeddedDigraph::EmbeddedDigraph(int n, std::vector<Arc> arcs,
                                 std::vector<std::vector<Dart>> rotation,
                                 std::vector<int> vertex_origin)
    : n_(n), arcs_(std::move(arcs)), rotation_(std::move(rotation)),
      vertex_origin_(std::move(vertex_origin)) {
  if (vertex_origin_.empty()) {
    vertex_origin_.resize(n_);
    std::iota(vertex_origin_.begin(), vertex_origin_.end(), 0);
  }
  if (static_cast<int>(rotation_.size()) != n_) rotation_.resize(n_);
  out_.assign(n_, {});
  in_.assign(n_, {});
  for (int a = 0; a < num_arcs(); ++a) {
    const Arc& arc = arcs_[a];
    if (arc.tail < 0 || arc.tail >= n_ || arc.head < 0 || arc.head >= n_) {
      throw Error(ErrorKind::InvariantViolation,
                  "arc " + std::to_string(arc.id) + " has an endpoint outside [0, n)");
    }
    out_[arc.tail].push_back(a);
    in_[arc.head].push_back(a);
  }
}

double EmbeddedDigraph::total_cost() const {
  double s = 0.0;
  for (const Arc& a : arcs_) s += a.cost;
  return s;
}

int EmbeddedDigraph::find_origin(int origin) const {
  for (int v = 0; v < n_; ++v) {
    if (vertex_origin_[v] == origin) return v;
  }
  return -1;
}

std::vector<std::vector<Dart>> trace_faces(const EmbeddedDigraph& g) {
  const int darts = 2 * g.num_arcs();
  std::vector<int> pos(darts, -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto& rot = g.rotation(v);
    for (int i = 0; i < static_cast<int>(rot.size()); ++i) pos[rot[i]] = i;
  }
  std::vector<char> seen(darts, 0);
  std::vector<std::vector<Dart>> faces;
  for (Dart start = 0; start < darts; ++start) {
    if (seen[start]) continue;
    std::vector<Dart> face;
    Dart d = start;
    while (!seen[d]) {
      seen[d] = 1;
      face.push_back(d);
      const Dart t = dart_twin(d);
      const auto& rot = g.rotation(g.dart_vertex(t));
      d = rot[(pos[t] + 1) % rot.size()];
    }
    faces.push_back(std::move(face));
  }
  return faces;
}

int validate_planar_embedding(const EmbeddedDigraph& g) {
  const int m = g.num_arcs();
  std::vector<int> seen(2 * m, 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    for (Dart d : g.rotation(v)) {
      if (d < 0 || d >= 2 * m) {
        throw Error(ErrorKind::InconsistentRotation,
                    "rotation of vertex " + std::to_string(v) + " names an unknown arc");
      }
      if (g.dart_vertex(d) != v) {
        throw Error(ErrorKind::InconsistentRotation,
                    "arc " + std::to_string(g.arc(dart_arc(d)).id) +
                        " listed at vertex " + std::to_string(v) + " which it does not touch");
      }
      if (++seen[d] > 1) {
        throw Error(ErrorKind::InconsistentRotation,
                    "arc " + std::to_string(g.arc(dart_arc(d)).id) + " repeated at vertex " +
                        std::to_string(v));
      }
    }
  }
  for (Dart d = 0; d < 2 * m; ++d) {
    if (!seen[d]) {
      throw Error(ErrorKind::InconsistentRotation,
                  "arc " + std::to_string(g.arc(dart_arc(d)).id) +
                      " missing from the rotation of vertex " + std::to_string(g.dart_vertex(d)));
    }
  }

  Dsu dsu(g.num_vertices());
  for (const Arc& a : g.arcs()) dsu.unite(a.tail, a.head);
  std::map<int, std::array<long, 3>> per_component;  // n, m, F
  for (int v = 0; v < g.num_vertices(); ++v) per_component[dsu.find(v)][0]++;
  for (const Arc& a : g.arcs()) per_component[dsu.find(a.tail)][1]++;
  const auto faces = trace_faces(g);
  for (const auto& f : faces) per_component[dsu.find(g.dart_vertex(f.front()))][2]++;
  int total_faces = 0;
  for (auto& [rep, c] : per_component) {
    if (c[1] == 0) c[2] = 1;  // isolated vertex: one face
    if (c[0] - c[1] + c[2] != 2) {
      throw Error(ErrorKind::EulerViolation,
                  "component of vertex " + std::to_string(rep) + ": n - m + F = " +
                      std::to_string(c[0] - c[1] + c[2]));
    }
    total_faces += static_cast<int>(c[2]);
  }
  return total_faces;
}

NormalizedCosts normalize_costs(const EmbeddedDigraph& g, bool strict) {
  NormalizedCosts out;
  std::vector<Arc> arcs = g.arcs();
  double min_positive = kInf;
  for (const Arc& a : arcs) {
    if (a.cost < 0) throw Error(ErrorKind::InvariantViolation, "negative arc cost");
    if (a.cost > 0) min_positive = std::min(min_positive, a.cost);
  }
  if (min_positive == kInf) throw Error(ErrorKind::AllZeroCosts, "every arc has cost 0");
  if (strict) {
    for (Arc& a : arcs) {
      if (a.cost == 0.0) {
        a.cost = 1.0;
        ++out.raised_zero_arcs;
      }
    }
    if (out.raised_zero_arcs > 0) min_positive = std::min(min_positive, 1.0);
  }
  out.scale = 1.0 / min_positive;
  if (min_positive != 1.0) {
    for (Arc& a : arcs) a.cost *= out.scale;
  }
  out.graph = EmbeddedDigraph(g.num_vertices(), std::move(arcs), g.rotations(), g.vertex_origins());
  return out;
}

std::vector<int> ShortestPathTree::path_arcs(int v) const {
  std::vector<int> arcs;
  if (!reachable(v)) return arcs;
  int cur = v;
  while (cur != root) {
    const int a = parent_arc[cur];
    arcs.push_back(a);
    cur = arc_tail[a];
  }
  std::reverse(arcs.begin(), arcs.end());
  return arcs;
}

std::vector<int> ShortestPathTree::path_vertices(int v, const EmbeddedDigraph& g) const {
  std::vector<int> verts;
  if (!reachable(v)) return verts;
  int cur = v;
  verts.push_back(cur);
  while (cur != root) {
    cur = g.arc(parent_arc[cur]).tail;
    verts.push_back(cur);
  }
  std::reverse(verts.begin(), verts.end());
  return verts;
}

ShortestPathTree shortest_path_tree(const EmbeddedDigraph& g, int r) {
  const int n = g.num_vertices();
  ShortestPathTree t;
  t.root = r;
  t.dist.assign(n, kInf);
  t.parent_arc.assign(n, -1);
  t.arc_tail.resize(g.num_arcs());
  for (int a = 0; a < g.num_arcs(); ++a) t.arc_tail[a] = g.arc(a).tail;
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  t.dist[r] = 0.0;
  pq.emplace(0.0, r);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (int a : g.out_arcs(u)) {
      const int v = g.arc(a).head;
      if (done[v]) continue;
      const double nd = d + g.arc(a).cost;
      if (nd < t.dist[v] - kTol) {
        t.dist[v] = nd;
        t.parent_arc[v] = a;
        pq.emplace(nd, v);
      } else if (nd <= t.dist[v] + kTol && t.parent_arc[v] >= 0 &&
                 g.arc(a).id < g.arc(t.parent_arc[v]).id) {
        t.parent_arc[v] = a;
      }
    }
  }
  return t;
}

DerivedGraph induced_subgraph(const EmbeddedDigraph& g, const std::vector<char>& keep, int root) {
  DerivedGraph out;
  std::vector<int> new_id(g.num_vertices(), -1);
  std::vector<int> origins;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!keep[v]) continue;
    new_id[v] = static_cast<int>(out.vertex_parent.size());
    out.vertex_parent.push_back(v);
    origins.push_back(g.vertex_origin(v));
  }
  std::vector<int> new_arc(g.num_arcs(), -1);
  std::vector<Arc> arcs;
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc& arc = g.arc(a);
    if (new_id[arc.tail] < 0 || new_id[arc.head] < 0) continue;
    new_arc[a] = static_cast<int>(arcs.size());
    arcs.push_back({new_id[arc.tail], new_id[arc.head], arc.cost, arc.id});
    out.arc_parents.push_back({a});
  }
  const int n = static_cast<int>(out.vertex_parent.size());
  std::vector<std::vector<Dart>> rotation(n);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (new_id[v] < 0) continue;
    for (Dart d : g.rotation(v)) {
      const int na = new_arc[dart_arc(d)];
      if (na >= 0) rotation[new_id[v]].push_back(2 * na + (d & 1));
    }
  }
  out.root = root >= 0 ? new_id[root] : -1;
  out.graph = EmbeddedDigraph(n, std::move(arcs), std::move(rotation), std::move(origins));
  return out;
}

DerivedGraph contract_into_root(const EmbeddedDigraph& g, int r, std::span<const int> merge) {
  const int n = g.num_vertices();
  std::vector<char> in_set(n, 0);
  in_set[r] = 1;
  for (int v : merge) in_set[v] = 1;

  // Spanning tree of the merge set through arcs inside it, grown from r.
  std::vector<char> reached(n, 0);
  std::vector<int> tree_arcs;
  std::vector<int> queue{r};
  reached[r] = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int u = queue[qi];
    for (Dart d : g.rotation(u)) {
      const Arc& a = g.arc(dart_arc(d));
      const int w = (d & 1) ? a.tail : a.head;
      if (!in_set[w] || reached[w]) continue;
      reached[w] = 1;
      tree_arcs.push_back(dart_arc(d));
      queue.push_back(w);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (in_set[v] && !reached[v]) {
      throw Error(ErrorKind::DisconnectedContractionSet,
                  "vertex " + std::to_string(g.vertex_origin(v)) + " is not connected to the root");
    }
  }

  // Splice rotations edge by edge: merging w into r across dart pair
  // (dr at r, dw at w) yields r's darts after dr followed by w's darts after dw.
  std::vector<Dart> rot_r = g.rotation(r);
  for (int a : tree_arcs) {
    const Arc& arc = g.arc(a);
    const bool tail_in_r = std::find(rot_r.begin(), rot_r.end(), tail_dart(a)) != rot_r.end();
    const Dart dr = tail_in_r ? tail_dart(a) : head_dart(a);
    const Dart dw = dart_twin(dr);
    const int w = tail_in_r ? arc.head : arc.tail;
    const auto& rot_w = g.rotation(w);
    std::vector<Dart> merged;
    merged.reserve(rot_r.size() + rot_w.size());
    const auto ir = std::find(rot_r.begin(), rot_r.end(), dr) - rot_r.begin();
    for (std::size_t i = 1; i < rot_r.size(); ++i) merged.push_back(rot_r[(ir + i) % rot_r.size()]);
    const auto iw = std::find(rot_w.begin(), rot_w.end(), dw) - rot_w.begin();
    for (std::size_t i = 1; i < rot_w.size(); ++i) merged.push_back(rot_w[(iw + i) % rot_w.size()]);
    rot_r = std::move(merged);
  }

  // New vertex ids: merged vertices collapse onto r.
  std::vector<int> new_id(n, -1);
  DerivedGraph out;
  std::vector<int> origins;
  for (int v = 0; v < n; ++v) {
    if (in_set[v] && v != r) continue;
    new_id[v] = static_cast<int>(out.vertex_parent.size());
    out.vertex_parent.push_back(v);
    origins.push_back(g.vertex_origin(v));
  }
  for (int v = 0; v < n; ++v) {
    if (in_set[v]) new_id[v] = new_id[r];
  }
  out.root = new_id[r];

  // Keep the cheapest arc per ordered pair; drop loops.
  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  for (int a = 0; a < g.num_arcs(); ++a) {
    const int t = new_id[g.arc(a).tail];
    const int h = new_id[g.arc(a).head];
    if (t == h) continue;
    by_pair[{t, h}].push_back(a);
  }
  std::vector<int> keep_order;
  std::vector<std::vector<int>> group_of;
  for (auto& [pair, list] : by_pair) {
    std::stable_sort(list.begin(), list.end(), [&](int x, int y) {
      if (g.arc(x).cost != g.arc(y).cost) return g.arc(x).cost < g.arc(y).cost;
      return g.arc(x).id < g.arc(y).id;
    });
    keep_order.push_back(list.front());
    group_of.push_back(list);
  }
  // Preserve the input arc order for the kept arcs.
  std::vector<int> perm(keep_order.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int x, int y) { return keep_order[x] < keep_order[y]; });
  std::vector<int> new_arc(g.num_arcs(), -1);
  std::vector<Arc> arcs;
  for (int idx : perm) {
    const int a = keep_order[idx];
    new_arc[a] = static_cast<int>(arcs.size());
    const Arc& arc = g.arc(a);
    arcs.push_back({new_id[arc.tail], new_id[arc.head], arc.cost, arc.id});
    out.arc_parents.push_back(group_of[idx]);
  }

  const int nn = static_cast<int>(out.vertex_parent.size());
  std::vector<std::vector<Dart>> rotation(nn);
  auto remap = [&](const std::vector<Dart>& rot, std::vector<Dart>& dst) {
    for (Dart d : rot) {
      const int na = new_arc[dart_arc(d)];
      if (na >= 0) dst.push_back(2 * na + (d & 1));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (in_set[v]) continue;
    remap(g.rotation(v), rotation[new_id[v]]);
  }
  remap(rot_r, rotation[out.root]);
  out.graph = EmbeddedDigraph(nn, std::move(arcs), std::move(rotation), std::move(origins));
  return out;
}

std::vector<std::vector<int>> weak_components(const EmbeddedDigraph& g,
                                              const std::vector<char>& removed) {
  const int n = g.num_vertices();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if ((!removed.empty() && removed[s]) || comp[s] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out[id].push_back(u);
      auto visit = [&](int w) {
        if ((!removed.empty() && removed[w]) || comp[w] >= 0) return;
        comp[w] = id;
        stack.push_back(w);
      };
      for (int a : g.out_arcs(u)) visit(g.arc(a).head);
      for (int a : g.in_arcs(u)) visit(g.arc(a).tail);
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

OutTreeCheck check_out_tree(const EmbeddedDigraph& g, std::span<const int> arcs, int r) {
  const int n = g.num_vertices();
  std::vector<int> indeg(n, 0);
  std::vector<char> touched(n, 0);
  touched[r] = 1;
  for (int a : arcs) {
    indeg[g.arc(a).head]++;
    touched[g.arc(a).tail] = touched[g.arc(a).head] = 1;
  }
  if (indeg[r] > 0) return {false, r};
  for (int v = 0; v < n; ++v) {
    if (touched[v] && v != r && indeg[v] != 1) return {false, v};
  }
  const std::vector<int> roots{r};
  const auto seen = reachable_through(g, arcs, roots);
  for (int v = 0; v < n; ++v) {
    if (touched[v] && !seen[v]) return {false, v};
  }
  return {};
}

std::vector<char> reachable_through(const EmbeddedDigraph& g, std::span<const int> arcs,
                                    std::span<const int> roots) {
  const int n = g.num_vertices();
  std::vector<std::vector<int>> out(n);
  for (int a : arcs) out[g.arc(a).tail].push_back(g.arc(a).head);
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int r : roots) {
    if (!seen[r]) {
      seen[r] = 1;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : out[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<int> extract_branching(const EmbeddedDigraph& g, std::span<const int> arcs,
                                   std::span<const int> roots, std::span<const int> targets,
                                   bool prune) {
  const int n = g.num_vertices();
  std::vector<std::vector<int>> out(n);
  for (int a : arcs) out[g.arc(a).tail].push_back(a);
  for (auto& list : out) std::sort(list.begin(), list.end());
  std::vector<double> dist(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int r : roots) {
    dist[r] = 0.0;
    pq.emplace(0.0, r);
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (int a : out[u]) {
      const int v = g.arc(a).head;
      if (done[v]) continue;
      const double nd = d + g.arc(a).cost;
      if (nd < dist[v] - kTol) {
        dist[v] = nd;
        parent[v] = a;
        pq.emplace(nd, v);
      }
    }
  }
  std::vector<char> used(g.num_arcs(), 0);
  if (!prune) {
    for (int v = 0; v < n; ++v) {
      if (parent[v] >= 0) used[parent[v]] = 1;
    }
  } else {
    for (int t : targets) {
      int cur = t;
      while (parent[cur] >= 0 && !used[parent[cur]]) {
        used[parent[cur]] = 1;
        cur = g.arc(parent[cur]).tail;
      }
    }
  }
  std::vector<int> result;
  for (int a = 0; a < g.num_arcs(); ++a) {
    if (used[a]) result.push_back(a);
  }
  return result;
}

double arc_set_cost(const EmbeddedDigraph& g, std::span<const int> arcs) {
  double s = 0.0;
  for (int a : arcs) s += g.arc(a).cost;
  return s;
}

}  // namespace dstp
