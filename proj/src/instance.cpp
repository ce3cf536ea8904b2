#include "dstp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace dstp {

using nlohmann::json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::DST: return "dst";
    case Variant::DGST: return "dgst";
    case Variant::DCST: return "dcst";
    case Variant::DPST: return "dpst";
  }
  return "dst";
}

PolymatroidHandle PolymatroidHandle::coverage(std::vector<std::vector<int>> groups) {
  PolymatroidHandle f;
  f.kind_ = Kind::Coverage;
  f.groups_ = std::move(groups);
  return f;
}

PolymatroidHandle PolymatroidHandle::truncated_partition(std::vector<std::vector<int>> groups,
                                                         std::vector<int> caps) {
  PolymatroidHandle f;
  f.kind_ = Kind::TruncatedPartition;
  f.groups_ = std::move(groups);
  f.caps_ = std::move(caps);
  return f;
}

PolymatroidHandle PolymatroidHandle::modular(std::map<int, long> weights) {
  PolymatroidHandle f;
  f.kind_ = Kind::Modular;
  f.weights_ = std::move(weights);
  return f;
}

long PolymatroidHandle::value(std::span<const int> set) const {
  std::set<int> z(set.begin(), set.end());
  long total = 0;
  switch (kind_) {
    case Kind::Coverage:
      for (const auto& g : groups_) {
        if (std::any_of(g.begin(), g.end(), [&](int v) { return z.count(v) > 0; })) ++total;
      }
      break;
    case Kind::TruncatedPartition:
      for (std::size_t i = 0; i < groups_.size(); ++i) {
        long hit = 0;
        for (int v : groups_[i]) hit += z.count(v) ? 1 : 0;
        total += std::min<long>(caps_[i], hit);
      }
      break;
    case Kind::Modular:
      for (int v : z) {
        auto it = weights_.find(v);
        if (it != weights_.end()) total += it->second;
      }
      break;
  }
  return total;
}

std::vector<int> PolymatroidHandle::support() const {
  std::set<int> s;
  if (kind_ == Kind::Modular) {
    for (auto [v, w] : weights_) {
      if (w > 0) s.insert(v);
    }
  } else {
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      if (kind_ == Kind::TruncatedPartition && caps_[i] <= 0) continue;
      s.insert(groups_[i].begin(), groups_[i].end());
    }
  }
  return {s.begin(), s.end()};
}

long PolymatroidHandle::total() const {
  const auto s = support();
  return value(s);
}

std::vector<int> ProblemInstance::terminal_set() const {
  std::set<int> s;
  switch (variant) {
    case Variant::DST: s.insert(terminals.begin(), terminals.end()); break;
    case Variant::DGST:
    case Variant::DCST:
      for (const auto& g : groups) s.insert(g.begin(), g.end());
      break;
    case Variant::DPST:
      if (polymatroid) {
        for (int v : polymatroid->support()) s.insert(v);
      }
      break;
  }
  return {s.begin(), s.end()};
}

long ProblemInstance::k() const {
  switch (variant) {
    case Variant::DST: return static_cast<long>(terminals.size());
    case Variant::DGST: return static_cast<long>(groups.size());
    case Variant::DCST: {
      long s = 0;
      for (int h : requirements) s += h;
      return s;
    }
    case Variant::DPST: return polymatroid ? polymatroid->total() : 0;
  }
  return 0;
}

namespace {

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorKind::InvariantViolation, what);
}

void check_vertex(int v, int n, const std::string& where) {
  if (v < 0 || v >= n) violation(where + " references vertex " + std::to_string(v) + " outside [0, n)");
}

}  // namespace

void ProblemInstance::validate() const {
  const int n = graph.num_vertices();
  for (const Arc& a : graph.arcs()) {
    if (!(a.cost >= 0) || !std::isfinite(a.cost)) violation("arc costs must be finite and nonnegative");
  }
  try {
    validate_planar_embedding(graph);
  } catch (const Error& e) {
    violation(std::string("embedding: ") + e.what());
  }
  if (roots.empty()) violation("at least one root is required");
  std::set<int> root_set;
  for (int r : roots) {
    check_vertex(r, n, "roots");
    if (!root_set.insert(r).second) violation("root " + std::to_string(r) + " repeated");
  }
  auto check_members = [&](const std::vector<int>& list, const std::string& where) {
    std::set<int> seen;
    for (int v : list) {
      check_vertex(v, n, where);
      if (root_set.count(v)) violation(where + " contains root " + std::to_string(v));
      if (!seen.insert(v).second) violation(where + " repeats vertex " + std::to_string(v));
    }
  };
  switch (variant) {
    case Variant::DST: check_members(terminals, "terminals"); break;
    case Variant::DGST:
    case Variant::DCST:
      for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].empty()) violation("group " + std::to_string(i) + " is empty");
        check_members(groups[i], "group " + std::to_string(i));
      }
      if (variant == Variant::DCST) {
        if (requirements.size() != groups.size()) violation("one requirement per group is required");
        for (std::size_t i = 0; i < groups.size(); ++i) {
          if (requirements[i] < 1 || requirements[i] > static_cast<int>(groups[i].size())) {
            violation("requirement h_" + std::to_string(i) + " = " + std::to_string(requirements[i]) +
                      " must lie in [1, |g_" + std::to_string(i) + "|]");
          }
        }
      }
      break;
    case Variant::DPST: {
      if (!polymatroid) violation("dpst instance without polymatroid");
      const auto& f = *polymatroid;
      for (std::size_t i = 0; i < f.groups().size(); ++i) {
        check_members(f.groups()[i], "polymatroid group " + std::to_string(i));
      }
      if (f.kind() == PolymatroidHandle::Kind::TruncatedPartition) {
        if (f.caps().size() != f.groups().size()) violation("one cap per polymatroid group is required");
        for (int c : f.caps()) {
          if (c < 0) violation("polymatroid caps must be nonnegative");
        }
      }
      for (auto [v, w] : f.weights()) {
        check_vertex(v, n, "polymatroid weights");
        if (w < 0) violation("polymatroid weights must be nonnegative");
        if (w > 0 && root_set.count(v)) violation("polymatroid weight on root " + std::to_string(v));
      }
      break;
    }
  }
  for (auto [v, p] : prizes) {
    check_vertex(v, n, "prizes");
    if (!(p >= 0)) violation("prizes must be nonnegative");
  }
}

namespace {

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw Error(ErrorKind::MalformedSyntax, where + " must be an integer");
  return j.get<int>();
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorKind::MalformedSyntax, where + " must be a number");
  return j.get<double>();
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::MalformedSyntax, where + " must be an array");
  std::vector<int> out;
  for (const auto& e : j) out.push_back(as_int(e, where));
  return out;
}

std::vector<std::vector<int>> int_lists(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::MalformedSyntax, where + " must be an array");
  std::vector<std::vector<int>> out;
  for (const auto& e : j) out.push_back(int_list(e, where));
  return out;
}

int vertex_key(const std::string& key, const std::string& where) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::MalformedSyntax, where + " key '" + key + "' is not a vertex id");
  }
}

json number_json(double x) {
  if (std::floor(x) == x && std::fabs(x) < 9.0e15) return static_cast<long long>(x);
  return x;
}

}  // namespace

ProblemInstance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedSyntax, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::MalformedSyntax, "instance must be a JSON object");
  for (const char* key : {"n", "arcs", "rotation", "problem"}) {
    if (!j.contains(key)) throw Error(ErrorKind::MalformedSyntax, std::string("missing field '") + key + "'");
  }
  const int n = as_int(j["n"], "n");
  if (n < 1) violation("n must be positive");

  ProblemInstance inst;
  std::unordered_map<int, int> index_of;
  std::vector<Arc> arcs;
  if (!j["arcs"].is_array()) throw Error(ErrorKind::MalformedSyntax, "arcs must be an array");
  for (const auto& a : j["arcs"]) {
    if (!a.is_object()) throw Error(ErrorKind::MalformedSyntax, "arc entries must be objects");
    for (const char* key : {"id", "tail", "head", "cost"}) {
      if (!a.contains(key)) throw Error(ErrorKind::MalformedSyntax, std::string("arc without '") + key + "'");
    }
    const int id = as_int(a["id"], "arc id");
    const int idx = static_cast<int>(arcs.size());
    if (!index_of.emplace(id, idx).second) violation("arc id " + std::to_string(id) + " repeated");
    const int tail = as_int(a["tail"], "arc tail");
    const int head = as_int(a["head"], "arc head");
    check_vertex(tail, n, "arc " + std::to_string(id));
    check_vertex(head, n, "arc " + std::to_string(id));
    arcs.push_back({tail, head, as_number(a["cost"], "arc cost"), idx});
    inst.arc_labels.push_back(id);
  }

  const json& rot = j["rotation"];
  if (!rot.is_object()) throw Error(ErrorKind::MalformedSyntax, "rotation must be an object");
  std::vector<std::vector<Dart>> rotation(n);
  std::vector<int> loop_seen(arcs.size(), 0);
  for (auto it = rot.begin(); it != rot.end(); ++it) {
    const int v = vertex_key(it.key(), "rotation");
    check_vertex(v, n, "rotation");
    for (int id : int_list(it.value(), "rotation list")) {
      auto found = index_of.find(id);
      if (found == index_of.end()) {
        violation("rotation of vertex " + std::to_string(v) + " names unknown arc " + std::to_string(id));
      }
      const int a = found->second;
      Dart d;
      if (arcs[a].tail == arcs[a].head) {
        d = loop_seen[a]++ == 0 ? tail_dart(a) : head_dart(a);
      } else if (arcs[a].tail == v) {
        d = tail_dart(a);
      } else if (arcs[a].head == v) {
        d = head_dart(a);
      } else {
        violation("rotation of vertex " + std::to_string(v) + " lists arc " + std::to_string(id) +
                  " which does not touch it");
      }
      rotation[v].push_back(d);
    }
  }
  inst.graph = EmbeddedDigraph(n, std::move(arcs), std::move(rotation));

  const json& p = j["problem"];
  if (!p.is_object() || !p.contains("type") || !p["type"].is_string()) {
    throw Error(ErrorKind::MalformedSyntax, "problem.type must be a string");
  }
  const std::string type = p["type"].get<std::string>();
  if (type == "dst") inst.variant = Variant::DST;
  else if (type == "dgst") inst.variant = Variant::DGST;
  else if (type == "dcst") inst.variant = Variant::DCST;
  else if (type == "dpst") inst.variant = Variant::DPST;
  else throw Error(ErrorKind::UnknownVariant, "problem type '" + type + "'");
  if (!p.contains("roots")) throw Error(ErrorKind::MalformedSyntax, "problem.roots missing");
  inst.roots = int_list(p["roots"], "roots");
  if (p.contains("terminals")) inst.terminals = int_list(p["terminals"], "terminals");
  if (p.contains("groups")) inst.groups = int_lists(p["groups"], "groups");
  if (p.contains("requirements")) inst.requirements = int_list(p["requirements"], "requirements");
  if (p.contains("polymatroid")) {
    const json& f = p["polymatroid"];
    if (!f.is_object() || !f.contains("kind") || !f["kind"].is_string()) {
      throw Error(ErrorKind::MalformedSyntax, "polymatroid.kind must be a string");
    }
    const std::string kind = f["kind"].get<std::string>();
    if (kind == "coverage") {
      inst.polymatroid = PolymatroidHandle::coverage(int_lists(f.value("groups", json::array()), "polymatroid groups"));
    } else if (kind == "truncated_partition") {
      inst.polymatroid = PolymatroidHandle::truncated_partition(
          int_lists(f.value("groups", json::array()), "polymatroid groups"),
          int_list(f.value("caps", json::array()), "polymatroid caps"));
    } else if (kind == "modular") {
      std::map<int, long> w;
      const json& wj = f.value("weights", json::object());
      if (!wj.is_object()) throw Error(ErrorKind::MalformedSyntax, "polymatroid weights must be an object");
      for (auto it = wj.begin(); it != wj.end(); ++it) {
        w[vertex_key(it.key(), "weights")] = as_int(it.value(), "weight");
      }
      inst.polymatroid = PolymatroidHandle::modular(std::move(w));
    } else {
      throw Error(ErrorKind::UnknownVariant, "polymatroid kind '" + kind + "'");
    }
  }
  if (j.contains("prizes")) {
    const json& pj = j["prizes"];
    if (!pj.is_object()) throw Error(ErrorKind::MalformedSyntax, "prizes must be an object");
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      inst.prizes[vertex_key(it.key(), "prizes")] = as_number(it.value(), "prize");
    }
  }
  if (inst.variant == Variant::DST && !p.contains("terminals")) {
    throw Error(ErrorKind::MalformedSyntax, "dst problem without terminals");
  }
  if ((inst.variant == Variant::DGST || inst.variant == Variant::DCST) && !p.contains("groups")) {
    throw Error(ErrorKind::MalformedSyntax, "group problem without groups");
  }
  inst.validate();
  return inst;
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedSyntax, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

json instance_to_json(const ProblemInstance& inst) {
  const auto& g = inst.graph;
  json j;
  j["n"] = g.num_vertices();
  json arcs = json::array();
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc& arc = g.arc(a);
    arcs.push_back({{"id", inst.arc_labels[a]}, {"tail", arc.tail}, {"head", arc.head},
                    {"cost", number_json(arc.cost)}});
  }
  j["arcs"] = std::move(arcs);
  json rot = json::object();
  for (int v = 0; v < g.num_vertices(); ++v) {
    json list = json::array();
    for (Dart d : g.rotation(v)) list.push_back(inst.arc_labels[dart_arc(d)]);
    rot[std::to_string(v)] = std::move(list);
  }
  j["rotation"] = std::move(rot);
  json p;
  p["type"] = std::string(to_string(inst.variant));
  p["roots"] = inst.roots;
  if (inst.variant == Variant::DST) p["terminals"] = inst.terminals;
  if (!inst.groups.empty() || inst.variant == Variant::DGST || inst.variant == Variant::DCST) {
    p["groups"] = inst.groups;
  }
  if (!inst.requirements.empty()) p["requirements"] = inst.requirements;
  if (inst.polymatroid) {
    const auto& f = *inst.polymatroid;
    json fj;
    switch (f.kind()) {
      case PolymatroidHandle::Kind::Coverage:
        fj["kind"] = "coverage";
        fj["groups"] = f.groups();
        break;
      case PolymatroidHandle::Kind::TruncatedPartition:
        fj["kind"] = "truncated_partition";
        fj["groups"] = f.groups();
        fj["caps"] = f.caps();
        break;
      case PolymatroidHandle::Kind::Modular: {
        fj["kind"] = "modular";
        json w = json::object();
        for (auto [v, x] : f.weights()) w[std::to_string(v)] = x;
        fj["weights"] = std::move(w);
        break;
      }
    }
    p["polymatroid"] = std::move(fj);
  }
  j["problem"] = std::move(p);
  if (!inst.prizes.empty()) {
    json pr = json::object();
    for (auto [v, x] : inst.prizes) pr[std::to_string(v)] = number_json(x);
    j["prizes"] = std::move(pr);
  }
  return j;
}

std::string serialize_instance(const ProblemInstance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

ProblemInstance make_instance(EmbeddedDigraph g, std::vector<int> roots, Variant variant) {
  ProblemInstance inst;
  std::vector<Arc> arcs = g.arcs();
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) arcs[a].id = a;
  inst.graph = EmbeddedDigraph(g.num_vertices(), std::move(arcs), g.rotations());
  inst.arc_labels.resize(inst.graph.num_arcs());
  for (int a = 0; a < inst.graph.num_arcs(); ++a) inst.arc_labels[a] = a;
  inst.roots = std::move(roots);
  inst.variant = variant;
  return inst;
}

ArcSetSolution evaluate_solution(const ProblemInstance& inst, std::vector<int> arcs) {
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  ArcSetSolution sol;
  sol.cost = arc_set_cost(inst.graph, arcs);
  const auto seen = reachable_through(inst.graph, arcs, inst.roots);
  for (int t : inst.terminal_set()) {
    if (seen[t]) sol.covered.push_back(t);
  }
  sol.arcs = std::move(arcs);
  return sol;
}

json solution_to_json(const ProblemInstance& inst, const ArcSetSolution& sol, const json& stats) {
  json j;
  std::vector<int> ids;
  for (int a : sol.arcs) ids.push_back(inst.arc_labels[a]);
  std::sort(ids.begin(), ids.end());
  j["arcs"] = ids;
  j["cost"] = number_json(sol.cost);
  j["covered"] = sol.covered;
  j["stats"] = stats.is_null() ? json::object() : stats;
  return j;
}

}  // namespace dstp
