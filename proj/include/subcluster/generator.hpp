#pragma once

#include <cstddef>
#include <cstdint>

#include "subcluster/graph.hpp"

namespace subcluster {

struct GeneratorConfig {
  std::size_t n = 0;
  int k = 1;
  int d = 3;
  // Target fraction of the n*d degree slots taken by cross-cluster edge endpoints.
  double cross_edge_budget = 0.0;
  std::uint64_t seed = 1;
  // Degree slots per vertex kept free for cross edges when the budget is positive.
  int reserved_slots = 1;
};

struct Instance {
  Graph graph;
  Clustering truth;
};

// k near-equal clusters, each the union of d' random perfect matchings
// (d' = d - reserved_slots when cross edges are requested, otherwise d),
// plus uniformly placed cross edges.  Deterministic in cfg.seed.
Instance generate_clusterable(const GeneratorConfig& cfg);

// k disjoint copies of K_m with degree bound d (default m - 1).
Instance disjoint_cliques(int k, std::size_t m, int d = -1);

}  // namespace subcluster
