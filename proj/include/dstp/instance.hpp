#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dstp/graph.hpp"

namespace dstp {

enum class Variant { DST, DGST, DCST, DPST };

std::string_view to_string(Variant v);

class PolymatroidHandle {
 public:
  enum class Kind { Coverage, TruncatedPartition, Modular };

  static PolymatroidHandle coverage(std::vector<std::vector<int>> groups);
  static PolymatroidHandle truncated_partition(std::vector<std::vector<int>> groups,
                                               std::vector<int> caps);
  static PolymatroidHandle modular(std::map<int, long> weights);

  Kind kind() const { return kind_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  const std::vector<int>& caps() const { return caps_; }
  const std::map<int, long>& weights() const { return weights_; }

  /// f(Z) for a vertex set given as a list (duplicates ignored).
  long value(std::span<const int> set) const;
  /// Vertices v with f({v}) > 0, sorted.
  std::vector<int> support() const;
  long total() const;

 private:
  Kind kind_ = Kind::Modular;
  std::vector<std::vector<int>> groups_;
  std::vector<int> caps_;
  std::map<int, long> weights_;
};

struct ProblemInstance {
  EmbeddedDigraph graph;  // Arc::id is the arc's index; file ids live in arc_labels
  std::vector<int> arc_labels;
  std::vector<int> roots;
  Variant variant = Variant::DST;
  std::vector<int> terminals;
  std::vector<std::vector<int>> groups;
  std::vector<int> requirements;
  std::optional<PolymatroidHandle> polymatroid;
  std::map<int, double> prizes;

  int root() const { return roots.front(); }
  /// The terminal set S of the variant.
  std::vector<int> terminal_set() const;
  /// k: terminal count, group count, sum of requirements or f(V).
  long k() const;
  /// Checks every type invariant; throws InvariantViolation naming the first failure.
  void validate() const;
};

ProblemInstance parse_instance(const std::string& text);
ProblemInstance load_instance(const std::string& path);
nlohmann::json instance_to_json(const ProblemInstance& inst);
/// Canonical form: keys sorted, two-space indent, trailing newline.
std::string serialize_instance(const ProblemInstance& inst);

/// Builds an instance whose arcs carry ids 0..m-1 in order.
ProblemInstance make_instance(EmbeddedDigraph g, std::vector<int> roots, Variant variant);

struct ArcSetSolution {
  std::vector<int> arcs;  // arc indices of the instance graph
  double cost = 0.0;
  std::vector<int> covered;
};

/// Cost and covered terminals of `arcs`, computed by reachability from the roots.
ArcSetSolution evaluate_solution(const ProblemInstance& inst, std::vector<int> arcs);

nlohmann::json solution_to_json(const ProblemInstance& inst, const ArcSetSolution& sol,
                                const nlohmann::json& stats);

}  // namespace dstp
