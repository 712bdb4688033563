#pragma once

#include <cstddef>
#include <vector>

#include "subcluster/graph.hpp"

namespace subcluster {

struct Misclassification {
  std::size_t errors = 0;
  double rate = 0;
  std::size_t unclassified = 0;
  std::vector<int> assignment;  // truth cluster -> predicted label, -1 if unmatched
};

// Min over injective label matchings of sum_i |C_i symmetric-difference C^_pi(i)|;
// negative predictions are unclassified and always count as errors.
Misclassification misclassification(const Clustering& truth, const std::vector<int>& predicted);

// Minimum-cost perfect assignment of a square cost matrix; returns column per row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

}  // namespace subcluster
