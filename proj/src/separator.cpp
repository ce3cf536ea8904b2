#include "dstp/separator.hpp"

#include <algorithm>
#include <numeric>

namespace dstp {

Triangulation triangulate(const EmbeddedDigraph& g) {
  try {
    validate_planar_embedding(g);
  } catch (const Error& e) {
    throw Error(ErrorKind::EmbeddingInvalid, e.what());
  }
  if (g.num_vertices() > 0 && weak_components(g, {}).size() > 1) {
    throw Error(ErrorKind::EmbeddingInvalid, "graph is not weakly connected");
  }
  std::vector<Arc> arcs = g.arcs();
  std::vector<std::vector<Dart>> rot = g.rotations();
  auto vertex_of = [&](Dart d) {
    const Arc& a = arcs[dart_arc(d)];
    return (d & 1) ? a.head : a.tail;
  };
  auto insert_after = [&](int v, Dart anchor, Dart d) {
    auto& r = rot[v];
    r.insert(std::find(r.begin(), r.end(), anchor) + 1, d);
  };

  for (std::vector<Dart> face : trace_faces(g)) {
    std::size_t i = 0;
    while (face.size() > 3) {
      const std::size_t L = face.size();
      std::size_t tried = 0;
      while (tried < L && vertex_of(face[i % L]) == vertex_of(face[(i + 2) % L])) {
        ++i;
        ++tried;
      }
      if (tried == L) break;  // walk alternates between two vertices
      i %= L;
      const Dart prev = face[(i + L - 1) % L];
      const Dart next = face[(i + 1) % L];
      const int wi = vertex_of(face[i]);
      const int wj = vertex_of(face[(i + 2) % L]);
      const int a = static_cast<int>(arcs.size());
      arcs.push_back({wi, wj, 0.0, -1});
      insert_after(wi, dart_twin(prev), tail_dart(a));
      insert_after(wj, dart_twin(next), head_dart(a));
      // The ear (face[i], face[i+1], chord) is closed off; the chord's tail
      // dart takes the place of the two ear darts.
      if (i + 1 < L) {
        face[i] = tail_dart(a);
        face.erase(face.begin() + static_cast<long>(i) + 1);
      } else {
        face[i] = tail_dart(a);
        face.erase(face.begin());
        i = L - 2;
      }
    }
  }
  Triangulation t;
  t.original_arcs = g.num_arcs();
  t.graph = EmbeddedDigraph(g.num_vertices(), std::move(arcs), std::move(rot), g.vertex_origins());
  return t;
}

namespace {

struct TreeInfo {
  std::vector<int> parent;  // parent vertex, -1 at the root
  std::vector<int> depth;
};

TreeInfo tree_info(const EmbeddedDigraph& g, const std::vector<int>& parent_arc, int root) {
  const int n = g.num_vertices();
  TreeInfo t;
  t.parent.assign(n, -1);
  t.depth.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (parent_arc[v] >= 0) t.parent[v] = g.arc(parent_arc[v]).tail;
  }
  t.depth[root] = 0;
  for (int v = 0; v < n; ++v) {
    std::vector<int> chain;
    int cur = v;
    while (t.depth[cur] < 0) {
      chain.push_back(cur);
      cur = t.parent[cur];
      if (cur < 0) throw Error(ErrorKind::InvariantViolation, "tree does not span the graph");
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t.depth[*it] = t.depth[t.parent[*it]] + 1;
  }
  return t;
}

// Marks the arcs and vertices of the fundamental cycle of `edge`.
void mark_cycle(const Triangulation& tri, const std::vector<int>& parent_arc, const TreeInfo& t,
                int edge, std::vector<char>& arc_on, std::vector<char>& vert_on) {
  const Arc& e = tri.graph.arc(edge);
  int a = e.tail, b = e.head;
  arc_on[edge] = 1;
  vert_on[a] = vert_on[b] = 1;
  while (a != b) {
    if (t.depth[a] < t.depth[b]) std::swap(a, b);
    arc_on[parent_arc[a]] = 1;
    a = t.parent[a];
    vert_on[a] = 1;
  }
}

struct FaceIndex {
  std::vector<std::vector<Dart>> faces;
  std::vector<int> face_of;  // per dart
};

FaceIndex index_faces(const EmbeddedDigraph& g) {
  FaceIndex fi;
  fi.faces = trace_faces(g);
  fi.face_of.assign(2 * g.num_arcs(), -1);
  for (int f = 0; f < static_cast<int>(fi.faces.size()); ++f) {
    for (Dart d : fi.faces[f]) fi.face_of[d] = f;
  }
  return fi;
}

std::pair<double, double> inside_weight(const Triangulation& tri, const FaceIndex& fi,
                                        const std::vector<int>& parent_arc, const TreeInfo& t,
                                        int edge, const std::vector<double>& w) {
  const auto& g = tri.graph;
  std::vector<char> arc_on(g.num_arcs(), 0), vert_on(g.num_vertices(), 0);
  mark_cycle(tri, parent_arc, t, edge, arc_on, vert_on);
  std::vector<char> face_seen(fi.faces.size(), 0), vert_seen(g.num_vertices(), 0);
  std::vector<int> stack{fi.face_of[tail_dart(edge)]};
  face_seen[stack.back()] = 1;
  double inside = 0.0;
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    for (Dart d : fi.faces[f]) {
      const int v = g.dart_vertex(d);
      if (!vert_on[v] && !vert_seen[v]) {
        vert_seen[v] = 1;
        inside += w[v];
      }
      if (arc_on[dart_arc(d)]) continue;
      const int nf = fi.face_of[dart_twin(d)];
      if (!face_seen[nf]) {
        face_seen[nf] = 1;
        stack.push_back(nf);
      }
    }
  }
  double on = 0.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (vert_on[v]) on += w[v];
  }
  return {inside, on};
}

}  // namespace

std::pair<double, double> cycle_inside_weight(const Triangulation& tri,
                                              const std::vector<int>& parent_arc, int root,
                                              int edge, const std::vector<double>& w) {
  const auto t = tree_info(tri.graph, parent_arc, root);
  const auto fi = index_faces(tri.graph);
  return inside_weight(tri, fi, parent_arc, t, edge, w);
}

FundamentalCycle fundamental_cycle_separator(const Triangulation& tri,
                                             const std::vector<int>& parent_arc, int root,
                                             const std::vector<double>& w) {
  const auto& g = tri.graph;
  const auto t = tree_info(g, parent_arc, root);
  const auto fi = index_faces(g);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<char> tree_arc(g.num_arcs(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (parent_arc[v] >= 0) tree_arc[parent_arc[v]] = 1;
  }
  FundamentalCycle best;
  double best_score = kInf;
  for (int a = 0; a < g.num_arcs(); ++a) {
    if (tree_arc[a] || g.arc(a).tail == g.arc(a).head) continue;
    auto [inside, on] = inside_weight(tri, fi, parent_arc, t, a, w);
    const double outside = total - inside - on;
    const double score = std::max(inside, outside);
    if (score < best_score - kTol) {
      best_score = score;
      best.edge = a;
      best.u = g.arc(a).tail;
      best.v = g.arc(a).head;
      best.inside = inside;
      best.outside = outside;
      best.on_cycle = on;
    }
  }
  if (best.edge < 0) {
    // A tree: the root path whose removal leaves the lightest heavy part.
    best.degenerate = true;
    std::vector<double> below(w.begin(), w.end());
    std::vector<int> order(g.num_vertices());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return t.depth[x] > t.depth[y]; });
    for (int v : order) {
      if (t.parent[v] >= 0) below[t.parent[v]] += below[v];
    }
    double best_heavy = kInf;
    for (int v = 0; v < g.num_vertices(); ++v) {
      double heavy = 0.0;
      for (int c = 0; c < g.num_vertices(); ++c) {
        if (t.parent[c] == v) heavy = std::max(heavy, below[c]);
      }
      // Components hanging off the path above v lie outside v's subtree.
      double on = 0.0;
      for (int x = v; x >= 0; x = t.parent[x]) on += w[x];
      heavy = std::max(heavy, total - below[v] - (on - w[v]));
      if (heavy < best_heavy - kTol) {
        best_heavy = heavy;
        best.degenerate_vertex = v;
      }
    }
  }
  return best;
}

namespace {

struct Evaluation {
  std::vector<std::vector<int>> components;
  std::vector<double> weight;
  double heaviest = 0.0;
  int heaviest_index = -1;
};

Evaluation evaluate(const EmbeddedDigraph& g, const std::vector<char>& removed,
                    const std::vector<double>& w) {
  Evaluation ev;
  ev.components = weak_components(g, removed);
  for (std::size_t i = 0; i < ev.components.size(); ++i) {
    double s = 0.0;
    for (int v : ev.components[i]) s += w[v];
    ev.weight.push_back(s);
    if (s > ev.heaviest) {
      ev.heaviest = s;
      ev.heaviest_index = static_cast<int>(i);
    }
  }
  return ev;
}

}  // namespace

SeparatorResult shortest_path_separator(const EmbeddedDigraph& g, int r, const std::vector<double>& w) {
  const int n = g.num_vertices();
  const auto spt = shortest_path_tree(g, r);
  double total = 0.0;
  for (int v = 0; v < n; ++v) {
    if (w[v] > 0 && !spt.reachable(v)) {
      throw Error(ErrorKind::UnreachableWeight,
                  "vertex " + std::to_string(g.vertex_origin(v)) + " has weight but is unreachable");
    }
    total += w[v];
  }
  const double half = total / 2.0 + kTol;

  SeparatorResult res;
  res.total_weight = total;
  auto finish = [&](const std::vector<int>& ends, int rounds) {
    res.in_separator.assign(n, 0);
    res.in_separator[r] = 1;
    for (int v : ends) {
      if (v == r || std::find(res.path_ends.begin(), res.path_ends.end(), v) != res.path_ends.end()) continue;
      res.path_ends.push_back(v);
      res.paths.push_back(spt.path_arcs(v));
      for (int x : spt.path_vertices(v, g)) res.in_separator[x] = 1;
    }
    auto ev = evaluate(g, res.in_separator, w);
    res.components = std::move(ev.components);
    res.component_weight = std::move(ev.weight);
    res.beta = total > 0 ? ev.heaviest / total : 0.0;
    res.rounds = rounds;
    return ev.heaviest <= half;
  };
  auto mask_of = [&](const std::vector<int>& ends) {
    std::vector<char> mask(n, 0);
    mask[r] = 1;
    for (int v : ends) {
      for (int x : spt.path_vertices(v, g)) mask[x] = 1;
    }
    return mask;
  };

  if (total <= 0) {
    finish({}, 0);
    return res;
  }

  // A single root path often suffices.
  int best_single = -1;
  double best_single_heavy = kInf;
  for (int v = 0; v < n; ++v) {
    if (w[v] <= 0) continue;
    const double heavy = evaluate(g, mask_of({v}), w).heaviest;
    if (heavy < best_single_heavy - kTol) {
      best_single_heavy = heavy;
      best_single = v;
    }
  }
  if (best_single_heavy <= half) {
    finish({best_single}, 1);
    return res;
  }

  // Fundamental cycles of the shortest-path tree in a triangulation of the
  // reachable part.
  std::vector<char> keep(n, 0);
  for (int v = 0; v < n; ++v) keep[v] = spt.reachable(v);
  const DerivedGraph h = induced_subgraph(g, keep, r);
  std::vector<int> h_of(n, -1);
  for (int hv = 0; hv < h.graph.num_vertices(); ++hv) h_of[h.vertex_parent[hv]] = hv;
  std::vector<int> h_arc_of(g.num_arcs(), -1);
  for (int ha = 0; ha < h.graph.num_arcs(); ++ha) h_arc_of[h.arc_parents[ha][0]] = ha;
  const Triangulation tri = triangulate(h.graph);
  std::vector<int> parent(h.graph.num_vertices(), -1);
  std::vector<double> hw(h.graph.num_vertices(), 0.0);
  for (int hv = 0; hv < h.graph.num_vertices(); ++hv) {
    const int v = h.vertex_parent[hv];
    hw[hv] = w[v];
    if (spt.parent_arc[v] >= 0) parent[hv] = h_arc_of[spt.parent_arc[v]];
  }
  auto ends_of = [&](const FundamentalCycle& fc) -> std::vector<int> {
    if (fc.degenerate) return {h.vertex_parent[fc.degenerate_vertex]};
    return {h.vertex_parent[fc.u], h.vertex_parent[fc.v]};
  };

  const auto fc1 = fundamental_cycle_separator(tri, parent, h.root, hw);
  std::vector<int> ends = ends_of(fc1);
  auto ev1 = evaluate(g, mask_of(ends), w);
  if (ev1.heaviest <= half) {
    finish(ends, 1);
    return res;
  }
  std::vector<double> hw2(hw.size(), 0.0);
  for (int v : ev1.components[ev1.heaviest_index]) hw2[h_of[v]] = w[v];
  const auto fc2 = fundamental_cycle_separator(tri, parent, h.root, hw2);
  std::vector<int> ends2 = ends;
  for (int v : ends_of(fc2)) ends2.push_back(v);
  if (evaluate(g, mask_of(ends2), w).heaviest <= half) {
    finish(ends2, 2);
    return res;
  }

  // Exhaustive fallback over non-tree edges with true component weights.
  std::vector<std::vector<int>> candidates;
  std::vector<char> tree_arc(tri.graph.num_arcs(), 0);
  for (int p : parent) {
    if (p >= 0) tree_arc[p] = 1;
  }
  for (int a = 0; a < tri.graph.num_arcs(); ++a) {
    if (tree_arc[a]) continue;
    candidates.push_back({h.vertex_parent[tri.graph.arc(a).tail], h.vertex_parent[tri.graph.arc(a).head]});
  }
  for (int v = 0; v < n; ++v) {
    if (spt.reachable(v)) candidates.push_back({v});
  }
  auto best_extension = [&](const std::vector<int>& base) {
    std::vector<int> best = base;
    double best_heavy = kInf;
    for (const auto& c : candidates) {
      std::vector<int> trial = base;
      trial.insert(trial.end(), c.begin(), c.end());
      const double heavy = evaluate(g, mask_of(trial), w).heaviest;
      if (heavy < best_heavy - kTol) {
        best_heavy = heavy;
        best = trial;
      }
    }
    return std::make_pair(best, best_heavy);
  };
  auto [first, heavy1] = best_extension({});
  if (heavy1 <= half) {
    finish(first, 3);
    return res;
  }
  auto [second, heavy2] = best_extension(first);
  if (heavy2 <= half) {
    finish(second, 4);
    return res;
  }
  throw Error(ErrorKind::SeparatorFailure, "no balanced separator with at most four root paths");
}

PruneSeparateResult prune_and_separate(const EmbeddedDigraph& g, int r,
                                       const std::vector<int>& terminals, double gamma) {
  if (!(gamma > 0)) throw Error(ErrorKind::GammaNonpositive, "gamma must be positive");
  PruneSeparateResult out;
  const int n = g.num_vertices();
  const auto spt = shortest_path_tree(g, r);
  std::vector<char> keep(n, 0);
  for (int v = 0; v < n; ++v) keep[v] = spt.dist[v] <= gamma + kTol;
  std::vector<char> is_terminal(n, 0);
  for (int t : terminals) {
    if (t == r) continue;
    if (keep[t]) is_terminal[t] = 1;
    else out.pruned_terminals.push_back(t);
  }
  const DerivedGraph h = induced_subgraph(g, keep, r);
  out.kept_vertices = h.graph.num_vertices();
  std::vector<double> w(h.graph.num_vertices(), 0.0);
  for (int hv = 0; hv < h.graph.num_vertices(); ++hv) w[hv] = is_terminal[h.vertex_parent[hv]] ? 1.0 : 0.0;

  const SeparatorResult sep = shortest_path_separator(h.graph, h.root, w);
  out.beta = sep.beta;
  std::vector<char> arc_used(g.num_arcs(), 0);
  for (const auto& path : sep.paths) {
    std::vector<int> mapped;
    for (int a : path) {
      const int ga = h.arc_parents[a][0];
      mapped.push_back(ga);
      out.path_cost_sum += g.arc(ga).cost;
      arc_used[ga] = 1;
    }
    out.paths.push_back(std::move(mapped));
  }
  for (int a = 0; a < g.num_arcs(); ++a) {
    if (arc_used[a]) {
      out.separator_arcs.push_back(a);
      out.separator_cost += g.arc(a).cost;
    }
  }
  std::vector<int> p_vertices;
  for (int hv = 0; hv < h.graph.num_vertices(); ++hv) {
    if (!sep.in_separator[hv]) continue;
    p_vertices.push_back(hv);
    const int v = h.vertex_parent[hv];
    out.separator_vertices.push_back(v);
    if (is_terminal[v]) out.terminals_on_separator.push_back(v);
  }
  std::sort(out.separator_vertices.begin(), out.separator_vertices.end());
  std::sort(out.terminals_on_separator.begin(), out.terminals_on_separator.end());

  const DerivedGraph gp = contract_into_root(h.graph, h.root, p_vertices);
  std::vector<int> gp_of(h.graph.num_vertices(), -1);
  for (int v = 0; v < gp.graph.num_vertices(); ++v) gp_of[gp.vertex_parent[v]] = v;
  for (std::size_t ci = 0; ci < sep.components.size(); ++ci) {
    if (sep.component_weight[ci] <= 0) continue;
    std::vector<char> sel(gp.graph.num_vertices(), 0);
    sel[gp.root] = 1;
    for (int hv : sep.components[ci]) sel[gp_of[hv]] = 1;
    DerivedGraph d = induced_subgraph(gp.graph, sel, gp.root);
    SubInstance si;
    si.sub.graph = std::move(d.graph);
    si.sub.root = d.root;
    for (int v : d.vertex_parent) si.sub.vertex_parent.push_back(h.vertex_parent[gp.vertex_parent[v]]);
    for (const auto& parents : d.arc_parents) {
      std::vector<int> list;
      for (int gpa : parents) {
        for (int ha : gp.arc_parents[gpa]) list.push_back(h.arc_parents[ha][0]);
      }
      si.sub.arc_parents.push_back(std::move(list));
    }
    for (int v = 0; v < si.sub.graph.num_vertices(); ++v) {
      if (v != si.sub.root && is_terminal[si.sub.vertex_parent[v]]) si.terminals.push_back(v);
    }
    out.components.push_back(std::move(si));
  }
  return out;
}

nlohmann::json separator_to_json(const EmbeddedDigraph& g, const PruneSeparateResult& res) {
  nlohmann::json j;
  auto ids = [&](const std::vector<int>& arcs) {
    std::vector<int> out;
    for (int a : arcs) out.push_back(g.arc(a).id);
    return out;
  };
  auto origins = [&](const std::vector<int>& verts) {
    std::vector<int> out;
    for (int v : verts) out.push_back(g.vertex_origin(v));
    return out;
  };
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : res.paths) paths.push_back(ids(p));
  j["paths"] = std::move(paths);
  j["separator_vertices"] = origins(res.separator_vertices);
  j["separator_cost"] = res.separator_cost;
  j["beta"] = res.beta;
  j["pruned_terminals"] = origins(res.pruned_terminals);
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : res.components) {
    std::vector<int> verts, terms;
    for (int v = 0; v < c.sub.graph.num_vertices(); ++v) verts.push_back(c.sub.graph.vertex_origin(v));
    for (int t : c.terminals) terms.push_back(c.sub.graph.vertex_origin(t));
    comps.push_back({{"vertices", verts}, {"terminals", terms}});
  }
  j["components"] = std::move(comps);
  return j;
}

}  // namespace dstp
