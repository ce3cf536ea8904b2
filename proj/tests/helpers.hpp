#pragma once

#include <tuple>
#include <vector>

#include "dstp/gen.hpp"
#include "dstp/graph.hpp"
#include "dstp/instance.hpp"

namespace testutil {

struct A {
  int tail, head;
  double cost;
};

// Graph drawn with straight lines at the given positions.
inline dstp::EmbeddedDigraph drawn(const std::vector<A>& list, const std::vector<double>& x,
                                   const std::vector<double>& y) {
  std::vector<dstp::Arc> arcs;
  for (const A& a : list) arcs.push_back({a.tail, a.head, a.cost, static_cast<int>(arcs.size())});
  const int n = static_cast<int>(x.size());
  auto rot = dstp::rotation_from_positions(n, arcs, x, y);
  return dstp::EmbeddedDigraph(n, std::move(arcs), std::move(rot));
}

inline dstp::ProblemInstance dst_instance(dstp::EmbeddedDigraph g, int r, std::vector<int> terminals) {
  auto inst = dstp::make_instance(std::move(g), {r}, dstp::Variant::DST);
  inst.terminals = std::move(terminals);
  return inst;
}

inline dstp::ProblemInstance grid(int rows, int cols, int k, std::uint64_t seed,
                                  const std::string& kind = "grid", int max_cost = 10) {
  dstp::GenSpec s;
  s.kind = kind;
  s.rows = rows;
  s.cols = cols;
  s.k = k;
  s.seed = seed;
  s.max_cost = max_cost;
  return dstp::generate(s);
}

}  // namespace testutil
