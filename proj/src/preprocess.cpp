#include "subcluster/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "subcluster/errors.hpp"
#include "subcluster/parallel.hpp"
#include "subcluster/rng.hpp"
#include "subcluster/union_find.hpp"

namespace subcluster {

namespace {

constexpr std::uint64_t kTreeTag = 0x74726565ULL;
constexpr std::uint64_t kQueryTag = 0x71756572ULL;
constexpr std::uint64_t kSampleTag = 0x73616d70ULL;
constexpr std::uint64_t kTestTag = 0x74657374ULL;
constexpr std::uint64_t kNonceTag = 0x6e6f6e63ULL;
// Trial offsets keep the three trees' sketches independent.
constexpr std::uint64_t kCandidateTrials = std::uint64_t{1} << 40;
constexpr std::uint64_t kFinalTrials = std::uint64_t{2} << 40;

std::vector<Vertex> sample_vertices(std::size_t n, std::size_t count, std::uint64_t key) {
  Stream rng(key);
  std::vector<Vertex> S(count);
  for (auto& v : S) v = static_cast<Vertex>(rng.below(n));
  return S;
}

std::size_t walks_for(double scale, double ratio, double exponent) {
  return static_cast<std::size_t>(std::ceil(scale * std::pow(ratio, exponent)));
}

}  // namespace

void PreprocessConfig::check() const {
  if (k_hat < 1) throw ConfigError("k_hat must be at least 1");
  if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in (0, 1]");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (!(sample_multiplier > 0.0)) throw ConfigError("sample multiplier must be positive");
  if (!(walks_scale > 0.0)) throw ConfigError("walks scale must be positive");
  if (!(delta_exp >= 0.0 && delta_exp <= 1.0)) throw ConfigError("delta_exp must lie in [0, 1]");
  if (votes < 1) throw ConfigError("J must be at least 1");
  if (max_leaves && *max_leaves < 1) throw ConfigError("max_leaves must be at least 1");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (fresh_queries && query_walks == WalkMode::table)
    throw ConfigError("fresh query randomness needs counter-keyed query walks");
  QueryBudget b;
  b.vote_fraction = vote_fraction;
  b.dot_fraction = dot_fraction;
  b.check();
}

std::size_t PreprocessConfig::sample_size() const {
  const double s = std::ceil(sample_multiplier * static_cast<double>(k_hat) * std::log(phi * phi / eps));
  return std::max(k_hat, s > 0 ? static_cast<std::size_t>(s) : std::size_t{0});
}

std::size_t PreprocessConfig::stored_walks(std::size_t n) const {
  return walks_for(walks_scale, static_cast<double>(n) / static_cast<double>(k_hat), 1.0 - delta_exp);
}

std::size_t PreprocessConfig::query_walk_count(std::size_t n) const {
  return walks_for(walks_scale, static_cast<double>(n) / static_cast<double>(k_hat), delta_exp);
}

std::size_t PreprocessConfig::resolved_max_leaves() const {
  return max_leaves.value_or(std::max<std::size_t>(1, default_max_leaves(phi, eps)));
}

PolyParams PreprocessConfig::poly_params(std::size_t n) const {
  PolyParams p;
  p.n = n;
  p.phi = phi;
  p.eps = eps;
  p.t_min = t_min;
  p.degree = degree;
  return p;
}

QueryBudget OracleArtifact::budget() const {
  QueryBudget b;
  b.max_leaves = max_leaves;
  b.vote_fraction = config.vote_fraction;
  b.dot_fraction = config.dot_fraction;
  b.absolute_threshold = config.uses_absolute_threshold();
  b.eta = config.eta;
  b.k_hat = config.k_hat;
  return b;
}

void OracleArtifact::prepare() {
  auto p = std::make_shared<SketchParams>();
  p->poly = poly;
  p->r = r_query;
  p->source.seed = query_seed;
  p->source.mode = config.query_walks;
  if (config.query_walks == WalkMode::table) {
    const std::size_t steps = static_cast<std::size_t>(poly.t_min + poly.t_delta);
    const std::size_t width = (static_cast<std::size_t>(tree.votes) + 2) * poly.coeffs.size() * r_query;
    p->source.table = std::make_shared<WalkTable>(steps, width, d, query_seed, config.table_max_bytes);
  }
  query_params_ = std::move(p);
}

const SketchParams& OracleArtifact::query_params() const {
  if (!query_params_) throw ContractViolation("artifact not prepared for queries");
  return *query_params_;
}

OracleArtifact preprocess(const Graph& g, const PreprocessConfig& cfg, PreprocessTrace* trace) {
  cfg.check();
  const std::size_t n = g.n();
  if (n < 2) throw ConfigError("preprocessing needs at least two vertices");

  OracleArtifact a;
  a.config = cfg;
  a.graph_digest = g.digest();
  a.n = n;
  a.d = g.d();
  PolyBuildOptions popts;
  popts.strict = cfg.strict_poly;
  popts.validate = cfg.validate_poly;
  a.poly = build_walk_polynomial(cfg.poly_params(n), popts);
  a.r_stored = cfg.stored_walks(n);
  a.r_query = cfg.query_walk_count(n);
  a.max_leaves = cfg.resolved_max_leaves();
  a.tree_seed = derive_key({cfg.seed, kTreeTag});
  a.query_seed = derive_key({cfg.seed, kQueryTag});
  a.tree.votes = cfg.votes;
  a.prepare();

  SketchParams stored;
  stored.poly = a.poly;
  stored.r = a.r_stored;
  stored.source.seed = a.tree_seed;
  const SketchParams& qp = a.query_params();
  const QueryBudget budget = a.budget();
  const int J = cfg.votes;

  auto& diag = a.diag;
  const std::size_t s = cfg.sample_size();
  diag.sample_size = s;
  const auto S = sample_vertices(n, s, derive_key({cfg.seed, kSampleTag}));
  const SketchTree treeS = build_sketch_tree(g, S, stored, J, 0, cfg.threads);

  std::vector<NeighborResult> found(s);
  parallel_for(s, cfg.threads, [&](std::size_t i) {
    found[i] = find_neighbors(g, S[i], treeS, qp, budget, {cfg.fresh_queries, derive_key({cfg.seed, kNonceTag, 1, i})});
  });

  std::set<std::pair<std::size_t, std::size_t>> directed;
  for (std::size_t i = 0; i < s; ++i) {
    if (found[i].aborted) ++diag.aborted_queries;
    for (std::size_t j : found[i].leaves)
      if (j != i) directed.insert({i, j});
  }
  diag.directed_edges = directed.size();
  UnionFind uf(s);
  for (const auto& [i, j] : directed) {
    if (i < j && directed.count({j, i})) {
      ++diag.mutual_edges;
      uf.unite(i, j);
    }
  }
  std::map<std::size_t, Vertex> component_min;
  for (std::size_t i = 0; i < s; ++i) {
    auto [it, inserted] = component_min.try_emplace(uf.find(i), S[i]);
    if (!inserted) it->second = std::min(it->second, S[i]);
  }
  diag.components = component_min.size();
  std::vector<Vertex> candidates;
  for (const auto& [root, v] : component_min) candidates.push_back(v);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  diag.candidates = candidates.size();

  const SketchTree treeC = build_sketch_tree(g, candidates, stored, J, kCandidateTrials, cfg.threads);
  const auto test = sample_vertices(n, s, derive_key({cfg.seed, kTestTag}));
  std::vector<NeighborResult> hits(s);
  parallel_for(s, cfg.threads, [&](std::size_t i) {
    hits[i] = find_neighbors(g, test[i], treeC, qp, budget, {cfg.fresh_queries, derive_key({cfg.seed, kNonceTag, 2, i})});
  });
  std::vector<std::size_t> counter(candidates.size(), 0);
  for (const auto& h : hits) {
    if (h.aborted) ++diag.aborted_queries;
    if (h.leaves.size() == 1) {
      ++counter[h.leaves[0]];
      ++diag.singleton_hits;
    }
  }
  std::vector<Vertex> R;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (counter[c] > 0) R.push_back(candidates[c]);
  diag.representatives = R.size();
  if (trace) {
    trace->S = S;
    trace->S_test = test;
    trace->found = std::move(found);
    trace->directed.assign(directed.begin(), directed.end());
    trace->mutual.clear();
    for (const auto& [i, j] : directed)
      if (i < j && directed.count({j, i})) trace->mutual.push_back({i, j});
    trace->component.resize(s);
    for (std::size_t i = 0; i < s; ++i) trace->component[i] = uf.find(i);
    trace->candidates = candidates;
    trace->hits = std::move(hits);
    trace->counter = counter;
    trace->R = R;
  }
  if (R.empty())
    throw PreprocessingFailure("no candidate received a singleton hit (" + std::to_string(candidates.size()) +
                               " candidates); retry with another seed or larger walk counts");

  a.tree = build_sketch_tree(g, R, stored, J, kFinalTrials, cfg.threads);
  return a;
}

namespace {

int run_query(const Graph& g, const OracleArtifact& a, Vertex x, NeighborResult* detail) {
  if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  NeighborResult res = find_neighbors(g, x, a.tree, a.query_params(), a.budget(),
                                      {a.config.fresh_queries, derive_key({a.config.seed, kNonceTag, 3, x})});
  const int label = res.leaves.size() == 1 ? static_cast<int>(res.leaves[0]) : -1;
  if (detail) *detail = std::move(res);
  return label;
}

void check_graph(const Graph& g, const OracleArtifact& a) {
  if (g.n() != a.n || g.digest() != a.graph_digest) throw WrongGraphError("artifact was built for a different graph");
}

}  // namespace

int query(const Graph& g, const OracleArtifact& a, Vertex x, NeighborResult* detail) {
  check_graph(g, a);
  return run_query(g, a, x, detail);
}

std::vector<int> query_many(const Graph& g, const OracleArtifact& a, const std::vector<Vertex>& xs, int threads) {
  check_graph(g, a);
  std::vector<int> out(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t i) { out[i] = run_query(g, a, xs[i], nullptr); });
  return out;
}

}  // namespace subcluster
