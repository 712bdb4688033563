#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "subcluster/chebyshev.hpp"
#include "subcluster/graph.hpp"
#include "subcluster/sparse.hpp"
#include "subcluster/walks.hpp"

namespace subcluster {

struct SketchParams {
  WalkPolynomial poly;
  std::size_t r = 1;
  WalkSource source;
  // Boosted sketches switch to multinomial count propagation above this
  // many walks per lane (counter mode only).
  std::uint64_t batch_threshold = 1u << 16;

  void check() const;
};

struct SketchVector {
  SparseVector v;
  std::vector<std::int8_t> signs;  // sigma per element of S, in order
  std::size_t set_size = 0;
  std::uint64_t poly_digest = 0;

  bool operator==(const SketchVector&) const = default;
};

// sum_{x in S} sigma_x sum_t c_t phat^t_x with sigma keyed by (seed, trial, x).
SketchVector sketch(const Graph& g, std::span<const Vertex> S, const SketchParams& params, std::uint64_t trial);
// Same with caller-chosen signs (one per element of S).
SketchVector sketch_with_signs(const Graph& g, std::span<const Vertex> S, std::span<const std::int8_t> signs,
                               const SketchParams& params, std::uint64_t trial);
// Singleton sketch with boost * r walks per length.
SketchVector boosted_sketch(const Graph& g, Vertex x, const SketchParams& params, std::uint64_t boost,
                            std::uint64_t trial);

int sketch_sign(const SketchParams& params, std::uint64_t trial, Vertex x);

// Throws ContractViolation when the two sketches come from different polynomials.
double sketch_dot(const SketchVector& a, const SketchVector& b);

// Sign-corrected product of two independent singleton sketches of x,
// an estimate of |f_x|^2.
double sketch_self_estimate(const Graph& g, Vertex x, const SketchParams& params, std::uint64_t trial_a,
                            std::uint64_t trial_b);
double self_product(const SketchVector& a, const SketchVector& b);

}  // namespace subcluster
