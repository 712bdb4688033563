#include "subcluster/approx_k.hpp"

#include <cmath>
#include <sstream>

#include "subcluster/errors.hpp"
#include "subcluster/parallel.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

constexpr std::uint64_t kSampleTag = 0x6170786bULL;

std::vector<Vertex> draw_samples(std::size_t n, std::size_t L, std::uint64_t seed) {
  Stream rng(derive_key({seed, kSampleTag}));
  std::vector<Vertex> xs(L);
  for (auto& x : xs) x = static_cast<Vertex>(rng.below(n));
  return xs;
}

void finish(ApproxKResult& res, std::size_t n) {
  double sum = 0;
  for (double v : res.products) sum += v;
  res.k_over_n = sum / static_cast<double>(res.products.size());
  res.k = static_cast<double>(n) * res.k_over_n;
}

}  // namespace

std::uint64_t boost_factor(double p2, double eps2) {
  if (!(p2 > 0 && p2 <= 1) || !(eps2 > 0)) throw ConfigError("boost factor needs p2 in (0,1] and eps2 > 0");
  return static_cast<std::uint64_t>(std::ceil(1.0 / (p2 * eps2 * eps2) - 1e-9));
}

void ApproxKConfig::check() const {
  if (!(eps_apx > 0)) throw ConfigError("precision must be positive");
  if (!(phi > 0 && phi <= 1)) throw ConfigError("phi must lie in (0, 1]");
  if (!(eps > 0 && eps < 1)) throw ConfigError("eps must lie in (0, 1)");
  if (samples && *samples < 1) throw ConfigError("sample count must be at least 1");
  if (boost && *boost < 1) throw ConfigError("boost must be at least 1");
  if (k_hat < 1) throw ConfigError("k_hat must be at least 1");
  if (!(walks_scale > 0)) throw ConfigError("walks scale must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::size_t ApproxKConfig::resolved_samples() const {
  if (samples) return *samples;
  const double L = std::ceil(1e-3 * std::sqrt(phi * phi / eps));
  return std::max<std::size_t>(16, static_cast<std::size_t>(L));
}

std::uint64_t ApproxKConfig::resolved_boost() const {
  if (boost) return *boost;
  const double p2 = 1e-3 / (2.0 * static_cast<double>(resolved_samples()));
  return boost_factor(p2, eps_apx / 2.0);
}

std::size_t ApproxKConfig::walks(std::size_t n) const {
  return static_cast<std::size_t>(std::ceil(walks_scale * std::sqrt(static_cast<double>(n) / static_cast<double>(k_hat))));
}

ApproxKResult approx_k_with(const Graph& g, const ApproxKConfig& cfg, const std::function<double(Vertex)>& norm) {
  cfg.check();
  ApproxKResult res;
  res.samples = cfg.resolved_samples();
  res.boost = cfg.resolved_boost();
  res.sampled = draw_samples(g.n(), res.samples, cfg.seed);
  res.products.resize(res.samples);
  for (std::size_t l = 0; l < res.samples; ++l) res.products[l] = norm(res.sampled[l]);
  finish(res, g.n());
  return res;
}

ApproxKResult approx_k(const Graph& g, const ApproxKConfig& cfg, const WalkPolynomial& poly) {
  cfg.check();
  ApproxKResult res;
  const double admissible = cfg.admissibility_constant * std::pow(cfg.eps / (cfg.phi * cfg.phi), 0.25);
  if (cfg.eps_apx < admissible) {
    std::ostringstream os;
    os << "precision " << cfg.eps_apx << " is below C (eps/phi^2)^(1/4) = " << admissible;
    res.warnings.push_back(os.str());
  }
  res.samples = cfg.resolved_samples();
  res.boost = cfg.resolved_boost();
  res.sampled = draw_samples(g.n(), res.samples, cfg.seed);
  SketchParams params;
  params.poly = poly;
  params.r = cfg.walks(g.n());
  params.source.seed = derive_key({cfg.seed, 0x626f6f7374ULL});
  res.products.resize(res.samples);
  parallel_for(res.samples, cfg.threads, [&](std::size_t l) {
    const Vertex x = res.sampled[l];
    auto a = boosted_sketch(g, x, params, res.boost, 2 * l);
    auto b = boosted_sketch(g, x, params, res.boost, 2 * l + 1);
    res.products[l] = self_product(a, b);
  });
  finish(res, g.n());
  return res;
}

ApproxKResult approx_k(const Graph& g, const ApproxKConfig& cfg) {
  cfg.check();
  PolyParams p;
  p.n = g.n();
  p.phi = cfg.phi;
  p.eps = cfg.eps;
  p.t_min = cfg.t_min;
  p.degree = cfg.degree;
  PolyBuildOptions opts;
  opts.validate = false;
  auto res = approx_k(g, cfg, build_walk_polynomial(p, opts));
  return res;
}

}  // namespace subcluster
