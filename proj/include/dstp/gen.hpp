#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dstp/instance.hpp"

namespace dstp {

struct GenSpec {
  std::string kind = "grid";  // grid | triangulated-disk | series-parallel
  int rows = 4;
  int cols = 4;
  int n = 12;  // series-parallel vertex count
  Variant variant = Variant::DST;
  int roots = 1;
  int k = 4;  // terminals (dst) or polymatroid support size (dpst)
  int groups = 3;
  int group_size = 3;
  int max_requirement = 2;
  std::string polymatroid = "coverage";
  double both_directions = 0.3;
  int max_cost = 10;
  bool prizes = false;
  std::uint64_t seed = 1;
};

GenSpec gen_spec_from_json(const nlohmann::json& j);

/// Throws SpecInvalid when the spec cannot be realised.
ProblemInstance generate(const GenSpec& spec);

/// Rotation system of a straight-line drawing, clockwise around each vertex.
/// Arcs joining the same pair of vertices are drawn as a lens in list order.
std::vector<std::vector<Dart>> rotation_from_positions(int n, const std::vector<Arc>& arcs,
                                                       const std::vector<double>& x,
                                                       const std::vector<double>& y);

}  // namespace dstp
