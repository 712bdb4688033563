#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subcluster/sketch.hpp"

namespace subcluster {

struct ApproxKConfig {
  double eps_apx = 0.5;  // target multiplicative error
  double phi = 0.5;
  double eps = 0.01;
  std::optional<std::size_t> samples;  // L
  std::optional<std::uint64_t> boost;  // T
  std::size_t k_hat = 1;               // constant-factor guess, sets r
  double walks_scale = 8.0;
  std::optional<int> t_min;
  std::optional<int> degree;
  double admissibility_constant = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;

  void check() const;
  std::size_t resolved_samples() const;      // max(16, ceil(1e-3 sqrt(phi^2/eps)))
  std::uint64_t resolved_boost() const;      // 1 / (p2 eps2^2), eps2 = eps_apx/2, p2 = 1e-3/(2L)
  std::size_t walks(std::size_t n) const;    // ceil(C_r sqrt(n / k_hat))
};

struct ApproxKResult {
  double k_over_n = 0;
  double k = 0;
  std::size_t samples = 0;
  std::uint64_t boost = 0;
  std::vector<Vertex> sampled;
  std::vector<double> products;
  std::vector<std::string> warnings;
};

// Boost factor for precision eps2 and failure probability p2.
std::uint64_t boost_factor(double p2, double eps2);

ApproxKResult approx_k(const Graph& g, const ApproxKConfig& cfg);
ApproxKResult approx_k(const Graph& g, const ApproxKConfig& cfg, const WalkPolynomial& poly);
// Same estimator with the per-vertex self-estimate supplied by the caller.
ApproxKResult approx_k_with(const Graph& g, const ApproxKConfig& cfg, const std::function<double(Vertex)>& norm);

}  // namespace subcluster
