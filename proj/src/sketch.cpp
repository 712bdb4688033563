#include "subcluster/sketch.hpp"

#include <cmath>

#include "subcluster/errors.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

constexpr std::uint64_t kSignTag = 0x7369676eULL;
constexpr std::uint64_t kBoostTag = 0x626f6f73ULL;

void add_walks(std::vector<SparseEntry>& out, const EmpiricalDistribution& p, double coeff) {
  const double unit = coeff / static_cast<double>(p.r);
  for (const auto& c : p.counts) out.push_back({c.id, unit * static_cast<double>(c.count)});
}

}  // namespace

void SketchParams::check() const {
  if (r < 1) throw ConfigError("sketch needs r >= 1");
  if (poly.coeffs.empty()) throw ConfigError("sketch needs a walk polynomial");
  for (double c : poly.coeffs)
    if (!std::isfinite(c)) throw NumericError("walk polynomial coefficient is not finite in double precision");
  if (source.mode == WalkMode::table && !source.table) throw ConfigError("table walk mode without a walk table");
}

int sketch_sign(const SketchParams& params, std::uint64_t trial, Vertex x) {
  return Stream(derive_key({params.source.seed, kSignTag, trial, x})).rademacher();
}

SketchVector sketch_with_signs(const Graph& g, std::span<const Vertex> S, std::span<const std::int8_t> signs,
                               const SketchParams& params, std::uint64_t trial) {
  params.check();
  if (signs.size() != S.size()) throw ContractViolation("one sign per element of S is required");
  const auto& wp = params.poly;
  const std::size_t lanes = wp.coeffs.size();
  std::vector<SparseEntry> items;
  items.reserve(S.size() * lanes * params.r);
  for (std::size_t s = 0; s < S.size(); ++s) {
    if (S[s] >= g.n()) throw ContractViolation("vertex " + std::to_string(S[s]) + " out of range");
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      const double c = wp.coeffs[lane];
      if (c == 0.0) continue;
      auto p = random_walks(g, params.r, static_cast<std::size_t>(wp.t_min) + lane, S[s], params.source,
                            WalkBatch{trial, lane, lanes});
      add_walks(items, p, signs[s] * c);
    }
  }
  SketchVector out;
  out.v = SparseVector::from_unsorted(std::move(items));
  out.signs.assign(signs.begin(), signs.end());
  out.set_size = S.size();
  out.poly_digest = wp.digest();
  return out;
}

SketchVector sketch(const Graph& g, std::span<const Vertex> S, const SketchParams& params, std::uint64_t trial) {
  std::vector<std::int8_t> signs(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) signs[i] = static_cast<std::int8_t>(sketch_sign(params, trial, S[i]));
  return sketch_with_signs(g, S, signs, params, trial);
}

SketchVector boosted_sketch(const Graph& g, Vertex x, const SketchParams& params, std::uint64_t boost,
                            std::uint64_t trial) {
  if (boost < 1) throw ContractViolation("boost factor must be at least 1");
  params.check();
  if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  const std::uint64_t total = boost * params.r;
  if (total / boost != params.r) throw CapacityError("boosted walk count overflows");
  const bool batched = params.source.mode == WalkMode::counter && total > params.batch_threshold;
  if (!batched) {
    SketchParams p = params;
    p.r = static_cast<std::size_t>(total);
    return sketch(g, std::span<const Vertex>(&x, 1), p, trial);
  }
  const auto& wp = params.poly;
  const int sign = sketch_sign(params, trial, x);
  std::vector<SparseEntry> items;
  for (std::size_t lane = 0; lane < wp.coeffs.size(); ++lane) {
    const double c = wp.coeffs[lane];
    if (c == 0.0) continue;
    auto p = batched_walks(g, total, static_cast<std::size_t>(wp.t_min) + lane, x,
                           derive_key({params.source.seed, kBoostTag, trial, x, lane}));
    add_walks(items, p, sign * c);
  }
  SketchVector out;
  out.v = SparseVector::from_unsorted(std::move(items));
  out.signs = {static_cast<std::int8_t>(sign)};
  out.set_size = 1;
  out.poly_digest = wp.digest();
  return out;
}

double sketch_dot(const SketchVector& a, const SketchVector& b) {
  if (a.poly_digest != b.poly_digest) throw ContractViolation("sketches were built with different walk polynomials");
  return sparse_dot(a.v, b.v);
}

double self_product(const SketchVector& a, const SketchVector& b) {
  if (a.set_size != 1 || b.set_size != 1) throw ContractViolation("self estimate needs singleton sketches");
  return a.signs[0] * b.signs[0] * sketch_dot(a, b);
}

double sketch_self_estimate(const Graph& g, Vertex x, const SketchParams& params, std::uint64_t trial_a,
                            std::uint64_t trial_b) {
  if (trial_a == trial_b) throw ContractViolation("self estimate needs two distinct trials");
  auto a = sketch(g, std::span<const Vertex>(&x, 1), params, trial_a);
  auto b = sketch(g, std::span<const Vertex>(&x, 1), params, trial_b);
  return self_product(a, b);
}

}  // namespace subcluster
