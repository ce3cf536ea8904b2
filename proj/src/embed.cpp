#include "dstp/embed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <set>

#include "dstp/separator.hpp"

namespace dstp {

int EmbedTree::height() const {
  if (root < 0) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (int c : nodes[v].children) stack.push_back({c, d + 1});
  }
  return best;
}

int EmbedTree::non_copy_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.kind != NodeKind::Copy;
  return n;
}

std::vector<int> EmbedTree::copy_nodes() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    if (nodes[v].kind == NodeKind::Copy) out.push_back(v);
  }
  return out;
}

namespace {

struct Split {
  bool any_terminal = false;
  int path = -1;
  double cost = 0.0;
  std::vector<int> children;  // instance ids of the components
  std::vector<int> on_separator;  // input terminals on P
};

struct Work {
  ShortestPathTree spt;
  std::vector<double> sorted_dist;
  std::map<int, std::shared_ptr<Split>> memo;  // keyed by surviving vertex count
  int base_path = -1;
};

class Builder {
 public:
  Builder(EmbedTree& tree, bool reduced) : tree_(tree), reduced_(reduced) {}

  int add_context(InstanceContext ctx) {
    Work w;
    w.spt = shortest_path_tree(ctx.graph, ctx.root);
    w.sorted_dist = w.spt.dist;
    std::sort(w.sorted_dist.begin(), w.sorted_dist.end());
    tree_.contexts.push_back(std::move(ctx));
    work_.push_back(std::move(w));
    return static_cast<int>(tree_.contexts.size()) - 1;
  }

  int build(int inst, double phi) {
    const InstanceContext& ctx = tree_.contexts[inst];
    if (phi < 1.0 || ctx.terminals.empty()) return -1;
    const int node = new_node(NodeKind::Instance);
    tree_.nodes[node].instance = inst;
    tree_.nodes[node].phi = phi;
    tree_.nodes[node].k = static_cast<int>(ctx.terminals.size());
    if (ctx.terminals.size() == 1) {
      const int t = ctx.terminals[0];
      const int path = base_path(inst);
      const int c = new_node(NodeKind::Copy);
      tree_.nodes[c].terminal = ctx.graph.vertex_origin(t);
      tree_.nodes[c].source_path = path;
      attach(node, c, tree_.path_cost[path], path);
      return node;
    }
    if (reduced_) {
      for (double guess = phi; guess >= 1.0; guess /= 2) separator_branch(node, inst, guess);
      tree_.nodes[node].exclusive = tree_.nodes[node].children.size() > 1;
    } else {
      const int half = build(inst, phi / 2);
      if (half >= 0) attach(node, half, 0.0, -1);
      const bool sep = separator_branch(node, inst, phi);
      tree_.nodes[node].exclusive = half >= 0 && sep;
    }
    return node;
  }

 private:
  int new_node(NodeKind kind) {
    tree_.nodes.emplace_back();
    tree_.nodes.back().kind = kind;
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  void attach(int parent, int child, double cost, int carried) {
    tree_.nodes[child].parent = parent;
    tree_.nodes[child].cost = cost;
    tree_.nodes[child].carried = carried;
    tree_.nodes[parent].children.push_back(child);
    if (tree_.nodes[child].kind == NodeKind::Copy) {
      tree_.copies[tree_.nodes[child].terminal].push_back(child);
    }
  }

  int add_path(const InstanceContext& ctx, const std::vector<int>& local_arcs) {
    std::vector<int> ids;
    double cost = 0.0;
    for (int a : local_arcs) {
      ids.push_back(ctx.graph.arc(a).id);
      cost += ctx.graph.arc(a).cost;
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    tree_.paths.push_back(std::move(ids));
    tree_.path_cost.push_back(cost);
    return static_cast<int>(tree_.paths.size()) - 1;
  }

  int base_path(int inst) {
    Work& w = work_[inst];
    if (w.base_path < 0) {
      const InstanceContext& ctx = tree_.contexts[inst];
      w.base_path = add_path(ctx, w.spt.path_arcs(ctx.terminals[0]));
    }
    return w.base_path;
  }

  std::shared_ptr<Split> split(int inst, double phi) {
    Work& w = work_[inst];
    const int kept = static_cast<int>(
        std::upper_bound(w.sorted_dist.begin(), w.sorted_dist.end(), phi + kTol) - w.sorted_dist.begin());
    auto it = w.memo.find(kept);
    if (it != w.memo.end()) return it->second;
    auto s = std::make_shared<Split>();
    w.memo[kept] = s;
    const InstanceContext& ctx = tree_.contexts[inst];
    for (int t : ctx.terminals) s->any_terminal |= w.spt.dist[t] <= phi + kTol;
    if (!s->any_terminal) return s;

    ++tree_.separator_calls;
    PruneSeparateResult res = prune_and_separate(ctx.graph, ctx.root, ctx.terminals, phi);
    s->path = add_path(ctx, res.separator_arcs);
    s->cost = res.separator_cost;
    for (int t : res.terminals_on_separator) s->on_separator.push_back(ctx.graph.vertex_origin(t));
    for (auto& comp : res.components) {
      InstanceContext child;
      child.root = comp.sub.root;
      child.terminals = comp.terminals;
      child.arc_sources.resize(comp.sub.graph.num_arcs());
      for (int a = 0; a < comp.sub.graph.num_arcs(); ++a) {
        auto& src = child.arc_sources[a];
        for (int pa : comp.sub.arc_parents[a]) {
          const auto& up = tree_.contexts[inst].arc_sources[pa];
          src.insert(src.end(), up.begin(), up.end());
        }
        std::sort(src.begin(), src.end());
        src.erase(std::unique(src.begin(), src.end()), src.end());
      }
      child.graph = std::move(comp.sub.graph);
      s->children.push_back(add_context(std::move(child)));
    }
    return s;
  }

  bool separator_branch(int node, int inst, double phi) {
    auto s = split(inst, phi);
    if (!s->any_terminal) return false;
    const int aux = new_node(NodeKind::Aux);
    tree_.nodes[aux].phi = phi;
    attach(node, aux, s->cost, s->path);
    for (int child : s->children) {
      const int c = build(child, phi);
      if (c >= 0) attach(aux, c, 0.0, -1);
    }
    for (int t : s->on_separator) {
      const int c = new_node(NodeKind::Copy);
      tree_.nodes[c].terminal = t;
      tree_.nodes[c].source_path = s->path;
      attach(aux, c, 0.0, -1);
    }
    return true;
  }

  EmbedTree& tree_;
  bool reduced_;
  std::deque<Work> work_;
};

EmbedTree embed(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals, double gamma,
                bool reduced) {
  if (!(gamma > 0)) throw Error(ErrorKind::GammaNonpositive, "gamma must be positive");
  EmbedTree tree;
  tree.gamma = gamma;
  tree.height_reduced = reduced;
  const auto spt = shortest_path_tree(g, r);
  InstanceContext top;
  top.graph = g;
  top.root = r;
  std::set<int> seen;
  for (int t : terminals) {
    if (t == r || !seen.insert(t).second) continue;
    if (spt.dist[t] <= gamma + kTol) top.terminals.push_back(t);
    else tree.dropped_terminals.push_back(t);
  }
  tree.k = static_cast<int>(top.terminals.size());
  top.arc_sources.resize(g.num_arcs());
  for (int a = 0; a < g.num_arcs(); ++a) top.arc_sources[a] = {g.arc(a).id};
  Builder b(tree, reduced);
  const int inst = b.add_context(std::move(top));
  tree.root = b.build(inst, gamma);
  return tree;
}

}  // namespace

EmbedTree tree_emb(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals, double gamma) {
  return embed(g, r, terminals, gamma, false);
}

EmbedTree tree_emb_height_reduced(const EmbeddedDigraph& g, int r, const std::vector<int>& terminals,
                                  double gamma) {
  return embed(g, r, terminals, gamma, true);
}

double subtree_cost(const EmbedTree& tree, std::span<const int> subtree) {
  double c = 0.0;
  for (int v : subtree) {
    if (v != tree.root) c += tree.nodes[v].cost;
  }
  return c;
}

namespace {

std::vector<char> subtree_mask(const EmbedTree& tree, std::span<const int> subtree) {
  std::vector<char> in(tree.nodes.size(), 0);
  for (int v : subtree) {
    if (v < 0 || v >= static_cast<int>(tree.nodes.size())) {
      throw Error(ErrorKind::SubtreeNotRooted, "unknown tree node " + std::to_string(v));
    }
    in[v] = 1;
  }
  if (subtree.empty()) return in;
  if (tree.root < 0 || !in[tree.root]) {
    throw Error(ErrorKind::SubtreeNotRooted, "subtree does not contain the tree root");
  }
  for (int v : subtree) {
    if (v != tree.root && !in[tree.nodes[v].parent]) {
      throw Error(ErrorKind::SubtreeNotRooted, "parent of node " + std::to_string(v) + " missing");
    }
  }
  return in;
}

}  // namespace

ArcSetSolution project_to_graph(const EmbedTree& tree, const EmbeddedDigraph& g,
                                std::span<const int> subtree, int r) {
  const auto in = subtree_mask(tree, subtree);
  std::vector<char> used(g.num_arcs(), 0);
  std::vector<int> arcs;
  std::set<int> terminals;
  for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
    if (!in[v]) continue;
    const EmbedNode& node = tree.nodes[v];
    if (node.kind == NodeKind::Copy) terminals.insert(node.terminal);
    if (node.carried < 0) continue;
    for (int a : tree.paths[node.carried]) {
      if (!used[a]) {
        used[a] = 1;
        arcs.push_back(a);
      }
    }
  }
  const int roots[] = {r};
  ArcSetSolution sol;
  sol.arcs = extract_branching(g, arcs, roots);
  std::sort(sol.arcs.begin(), sol.arcs.end());
  sol.cost = arc_set_cost(g, sol.arcs);
  const auto reach = reachable_through(g, sol.arcs, roots);
  for (int t : terminals) {
    if (reach[t]) sol.covered.push_back(t);
  }
  return sol;
}

namespace {

class Descent {
 public:
  Descent(const EmbedTree& tree, const std::vector<char>& arc_in, const std::vector<char>& vertex_in)
      : tree_(tree), arc_in_(arc_in), vertex_in_(vertex_in) {}

  std::vector<int> nodes;

  void visit(int node) {
    const InstanceContext& ctx = tree_.contexts[tree_.nodes[node].instance];
    nodes.push_back(node);
    bool any = false;
    for (int t : ctx.terminals) any |= vertex_in_[ctx.graph.vertex_origin(t)] != 0;
    if (!any) return;
    if (ctx.terminals.size() == 1) {
      nodes.push_back(tree_.nodes[node].children.at(0));
      return;
    }
    double c = 0.0;
    for (int a = 0; a < ctx.graph.num_arcs(); ++a) {
      for (int src : ctx.arc_sources[a]) {
        if (arc_in_[src]) {
          c += ctx.graph.arc(a).cost;
          break;
        }
      }
    }
    // Candidate separator nodes with their guesses, reachable through halving edges.
    std::vector<std::pair<int, std::vector<int>>> options;  // aux, zero-cost prefix
    std::vector<int> prefix;
    for (int cur = node;;) {
      int half = -1;
      for (int ch : tree_.nodes[cur].children) {
        const EmbedNode& n = tree_.nodes[ch];
        if (n.kind == NodeKind::Aux) options.push_back({ch, prefix});
        else if (n.kind == NodeKind::Instance) half = ch;
      }
      if (half < 0) break;
      prefix.push_back(half);
      cur = half;
    }
    int pick = -1;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const double phi = tree_.nodes[options[i].first].phi;
      if (phi + kTol < c) continue;
      if (pick < 0 || phi < tree_.nodes[options[pick].first].phi) pick = static_cast<int>(i);
    }
    if (pick < 0) {
      throw Error(ErrorKind::CostExceedsGamma, "no separator level covers the solution");
    }
    const auto& [aux, chain] = options[pick];
    nodes.insert(nodes.end(), chain.begin(), chain.end());
    nodes.push_back(aux);
    for (int ch : tree_.nodes[aux].children) {
      const EmbedNode& n = tree_.nodes[ch];
      if (n.kind != NodeKind::Copy) visit(ch);
      else if (vertex_in_[n.terminal]) nodes.push_back(ch);
    }
  }

 private:
  const EmbedTree& tree_;
  const std::vector<char>& arc_in_;
  const std::vector<char>& vertex_in_;
};

}  // namespace

TreeProjection project_from_graph(const EmbedTree& tree, const EmbeddedDigraph& g,
                                  std::span<const int> arcs, int r) {
  TreeProjection out;
  if (!check_out_tree(g, arcs, r).ok) throw Error(ErrorKind::NotAnRtree, "solution is not an r-tree");
  const double c = arc_set_cost(g, arcs);
  if (c > tree.gamma + kTol) {
    throw Error(ErrorKind::CostExceedsGamma, "solution cost exceeds the embedding guess");
  }
  if (tree.root < 0) return out;
  std::vector<char> arc_in(g.num_arcs(), 0), vertex_in(g.num_vertices(), 0);
  vertex_in[r] = 1;
  for (int a : arcs) {
    arc_in[a] = 1;
    vertex_in[g.arc(a).tail] = vertex_in[g.arc(a).head] = 1;
  }
  Descent d(tree, arc_in, vertex_in);
  d.visit(tree.root);
  out.nodes = std::move(d.nodes);
  std::sort(out.nodes.begin(), out.nodes.end());
  out.cost = subtree_cost(tree, out.nodes);
  return out;
}

std::vector<std::vector<int>> expand_groups(const EmbedTree& tree,
                                            const std::vector<std::vector<int>>& groups) {
  std::vector<std::vector<int>> out;
  for (const auto& g : groups) {
    std::vector<int> lifted;
    for (int u : g) {
      auto it = tree.copies.find(u);
      if (it != tree.copies.end()) lifted.insert(lifted.end(), it->second.begin(), it->second.end());
    }
    std::sort(lifted.begin(), lifted.end());
    out.push_back(std::move(lifted));
  }
  return out;
}

LiftedPolymatroid::LiftedPolymatroid(const EmbedTree& tree, PolymatroidHandle f)
    : terminal_of_(tree.nodes.size(), -1), f_(std::move(f)) {
  for (const auto& [t, cs] : tree.copies) {
    for (int c : cs) terminal_of_[c] = t;
  }
}

long LiftedPolymatroid::value(std::span<const int> nodes) const {
  std::vector<int> ts;
  for (int v : nodes) {
    if (v >= 0 && v < static_cast<int>(terminal_of_.size()) && terminal_of_[v] >= 0) {
      ts.push_back(terminal_of_[v]);
    }
  }
  return f_.value(ts);
}

LiftedPolymatroid lift_polymatroid(const EmbedTree& tree, const PolymatroidHandle& f) {
  return LiftedPolymatroid(tree, f);
}

nlohmann::json embed_tree_to_json(const EmbedTree& tree) {
  using nlohmann::json;
  json nodes = json::array();
  for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
    const EmbedNode& n = tree.nodes[v];
    json j{{"id", v}, {"parent", n.parent}, {"cost", n.cost}};
    switch (n.kind) {
      case NodeKind::Instance:
        j["kind"] = "instance";
        j["instance"] = n.instance;
        j["phi"] = n.phi;
        j["k"] = n.k;
        j["exclusive"] = n.exclusive;
        break;
      case NodeKind::Aux:
        j["kind"] = "aux";
        j["phi"] = n.phi;
        break;
      case NodeKind::Copy:
        j["kind"] = "copy";
        j["terminal"] = n.terminal;
        j["source_path"] = n.source_path;
        break;
    }
    if (n.carried >= 0) j["path"] = n.carried;
    nodes.push_back(std::move(j));
  }
  json copies = json::object();
  for (const auto& [t, cs] : tree.copies) copies[std::to_string(t)] = cs;
  json paths = json::array();
  for (std::size_t i = 0; i < tree.paths.size(); ++i) {
    paths.push_back({{"arcs", tree.paths[i]}, {"cost", tree.path_cost[i]}});
  }
  return {{"root", tree.root},      {"gamma", tree.gamma},   {"k", tree.k},
          {"height", tree.height()}, {"height_reduced", tree.height_reduced},
          {"nodes", nodes},         {"copies", copies},      {"paths", paths},
          {"dropped_terminals", tree.dropped_terminals}};
}

}  // namespace dstp
