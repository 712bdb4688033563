// Acceptance checks, one per criterion: `acceptance N` prints a single
// "PASS criterion N: ..." or "FAIL criterion N: ..." line and exits 0 / 1.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include <unistd.h>

#include "subcluster/approx_k.hpp"
#include "subcluster/errors.hpp"
#include "subcluster/eval.hpp"
#include "subcluster/exact_ref.hpp"
#include "subcluster/generator.hpp"
#include "subcluster/misclassification.hpp"
#include "subcluster/preprocess.hpp"
#include "subcluster/rng.hpp"

using namespace subcluster;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

// Desk-scale oracle settings shared by criteria 8, 9 and 11.
EvalConfig desk_eval(double delta_exp) {
  EvalConfig c;
  c.gen = {4000, 8, 10, 0.0002, 1};
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.pre.k_hat = 8;
  c.pre.phi = 0.2;
  c.pre.eps = 0.0012;
  c.pre.t_min = 25;
  c.pre.degree = 0;
  c.pre.votes = 49;
  c.pre.max_leaves = 40;
  c.pre.delta_exp = delta_exp;
  c.timings = true;
  return c;
}

// ---------------------------------------------------------------------------

Outcome polynomial_bounds() {
  Outcome o{true, ""};
  for (const PolyParams p : {PolyParams{2000, 0.6, 0.03}, PolyParams{5000, 0.5, 0.02}}) {
    const auto t0 = Clock::now();
    const WalkPolynomial wp = build_walk_polynomial(p);
    const double secs = since(t0);
    const auto& v = wp.validation;
    const bool ok = v.low_ok() && v.flat_ok() && v.agreement_ok() && secs < 10.0;
    o.pass &= ok;
    o.detail += "(n=" + std::to_string(p.n) + " phi=" + num(p.phi) + " eps=" + num(p.eps) + " t=" +
                std::to_string(wp.t_min) + " d=" + std::to_string(wp.t_delta) + ") low max " + num(v.max_abs_low) +
                " at x=" + num(v.worst_low_x) + " vs " + num(v.bound_low) + ", flat dev " + num(v.max_dev_flat) +
                " vs " + num(v.bound_flat) + ", Horner/Clenshaw " + num(v.max_rel_disagreement) + ", " +
                num(secs, 3) + " s; ";
  }
  return o;
}

Outcome chebyshev_truncation() {
  Outcome o{true, ""};
  for (auto [eps, t] : {std::pair{0.05, 200}, std::pair{0.02, 500}}) {
    const auto t0 = Clock::now();
    const int d = static_cast<int>(std::ceil(10 * eps * t)) + 6;
    const double err = chebyshev_truncation_error(eps, t, d);
    const double bound = 10.0 * d * std::exp(-d);
    const double secs = since(t0);
    o.pass &= err <= bound && secs < 5.0;
    o.detail += "(eps=" + num(eps) + " t=" + std::to_string(t) + " d=" + std::to_string(d) + ") err " + num(err) +
                " vs " + num(bound) + ", " + num(secs, 3) + " s; ";
  }
  return o;
}

Outcome projector() {
  Outcome o{true, ""};
  const auto t0 = Clock::now();
  const PolyParams p{400, 0.6, 0.001};
  const WalkPolynomial wp = build_walk_polynomial(p);
  const double bound = p.eps / (p.phi * p.phi) + std::pow(400.0, -3.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = generate_clusterable({400, 4, 8, 0.0005, seed});
    const auto ref = build_reference(inst.graph, inst.truth);
    const auto w = ref.walk_eigenvalues();
    // The instance must sit inside the spectral premise the bound assumes.
    const double top = w[ref.k - 1], next = w[ref.k];
    const bool premise = top >= 1 - p.eps && next <= 1 - p.phi * p.phi / 4;
    const auto dist = dense_p_of_M(ref, wp);
    const bool ok = premise && dist.spectral <= bound && std::abs(dist.power - dist.spectral) <= 1e-6 * std::max(1.0, dist.spectral);
    o.pass &= ok;
    o.detail += "seed " + std::to_string(seed) + ": walk eig k=" + num(top, 6) + " k+1=" + num(next, 4) +
                (premise ? "" : " (premise violated)") + ", |p(M)-UU^T| " + num(dist.spectral) + " (power " +
                num(dist.power) + ") vs " + num(bound) + "; ";
  }
  const double secs = since(t0);
  o.pass &= secs < 30.0;
  o.detail += num(secs, 3) + " s";
  return o;
}

Outcome spectral_structure() {
  Outcome o{true, ""};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = generate_clusterable({2000, 4, 8, 0.0004, seed});
    const auto ref = build_reference(inst.graph, inst.truth);
    const auto m = measure_parameters(inst.graph, inst.truth);
    const double ratio = m.eps / (m.phi * m.phi);
    const auto e = eigengap_check(ref, m);
    const auto c = cluster_mean_checks(ref, inst.truth, m);
    const bool ok = ratio <= 0.05 && e.all_pass() && c.all_pass();
    o.pass &= ok;
    o.detail += "seed " + std::to_string(seed) + " eps/phi^2=" + num(ratio, 3) + " slack " +
                num(std::max(e.worst_slack(), c.worst_slack()), 3) + (ok ? "" : " FAILED") + "; ";
  }
  for (std::uint64_t seed : {11, 12}) {
    const auto inst = generate_clusterable({2000, 4, 8, 0.0, seed});
    const auto ref = build_reference(inst.graph, inst.truth);
    const auto m = measure_parameters(inst.graph, inst.truth);
    const double slack = std::max(eigengap_check(ref, m).worst_slack(), cluster_mean_checks(ref, inst.truth, m).worst_slack());
    o.pass &= slack <= 1e-9;
    o.detail += "eps=0 seed " + std::to_string(seed) + " slack " + num(slack, 3) + "; ";
  }
  return o;
}

Outcome collision_counting() {
  const auto t0 = Clock::now();
  const std::size_t m = 100;
  const auto inst = disjoint_cliques(2, m);
  const Graph& g = inst.graph;
  const Vertex x = 7;
  const std::vector<Vertex> S{1, 2, 101, 102};
  const int t1 = 5, t2 = 5;
  const double rho = 0.1, xi = 0.5;
  // One fixed sign pattern; the statistic is sum_y sigma_y <phat_x, phat_y>.
  const std::vector<std::int8_t> sigma{1, 1, -1, 1};
  const auto c = measure_collision_conditions(g, 2, x, S, t1, t2, xi, rho, sigma);
  const int reps = 2000;
  std::vector<double> stat(reps);
  const WalkSource src{WalkMode::counter, 0x636f6c6cULL, nullptr};
  for (int rep = 0; rep < reps; ++rep) {
    const auto px = random_walks(g, c.Q, t1, x, src, {static_cast<std::uint64_t>(rep), 0, 2}).to_sparse(1.0);
    double s = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
      const auto py = random_walks(g, c.R, t2, S[i], src, {static_cast<std::uint64_t>(rep), 1, 2}).to_sparse(1.0);
      s += sigma[i] * sparse_dot(px, py);
    }
    stat[rep] = s;
  }
  const double mean = std::accumulate(stat.begin(), stat.end(), 0.0) / reps;
  double var = 0;
  for (double v : stat) var += (v - mean) * (v - mean);
  var /= reps - 1;
  const double se = std::sqrt(var / reps);
  const double secs = since(t0);
  Outcome o;
  o.pass = var <= c.variance_bound && std::abs(mean - c.mean) <= 5 * se && secs < 60.0;
  o.detail = "beta=" + num(c.beta_raw) + " gamma=" + num(c.gamma_raw) + " Q=R=" + std::to_string(c.Q) + ", MC variance " +
             num(var) + " vs bound " + num(c.variance_bound) + ", mean " + num(mean) + " vs exact " + num(c.mean) +
             " (se " + num(se, 2) + "), " + num(secs, 3) + " s";
  return o;
}

SketchParams desk_sketch(std::size_t n, std::size_t k, std::uint64_t seed) {
  PolyParams pp{n, 0.2, 0.0012};
  pp.t_min = 25;
  pp.degree = 0;
  SketchParams s;
  s.poly = build_walk_polynomial(pp);
  s.r = static_cast<std::size_t>(std::ceil(8.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(k))));
  s.source = {WalkMode::counter, seed, nullptr};
  return s;
}

Outcome sketch_fidelity() {
  Outcome o{true, ""};
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = generate_clusterable({400, 4, 8, 0.0, seed});
    const Graph& g = inst.graph;
    const auto ref = build_reference(g, inst.truth);
    const auto p = desk_sketch(400, 4, 100 + seed);
    Stream rng(derive_key({seed, 0x70616972ULL}));
    int good = 0, same = 0, same_good = 0;
    std::uint64_t trial = 0;
    for (int i = 0; i < 100; ++i) {
      const Vertex x = static_cast<Vertex>(rng.below(400)), y = static_cast<Vertex>(rng.below(400));
      const auto a = sketch(g, std::span<const Vertex>(&x, 1), p, trial++);
      const auto b = sketch(g, std::span<const Vertex>(&y, 1), p, trial++);
      const double est = self_product(a, b);
      const bool ok = std::abs(est - ref.dot(x, y)) <= 0.2 * 4 / 400.0;
      good += ok;
      if (inst.truth.labels[x] == inst.truth.labels[y]) ++same, same_good += ok;
    }
    int self_ok = 0;
    for (Vertex x = 0; x < 400; ++x) {
      const double e = sketch_self_estimate(g, x, p, trial, trial + 1);
      trial += 2;
      self_ok += std::abs(e - ref.norm2(x)) <= 0.25 * ref.norm2(x);
    }
    const bool ok = good >= 80 && self_ok >= 320;
    o.pass &= ok;
    o.detail += "seed " + std::to_string(seed) + ": pairs " + std::to_string(good) + "/100 (same-cluster " +
                std::to_string(same_good) + "/" + std::to_string(same) + "), self-estimates " +
                std::to_string(self_ok) + "/400; ";
  }
  return o;
}

Outcome find_neighbors_exactness() {
  Outcome o{true, ""};
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = generate_clusterable({400, 4, 8, 0.0, seed});
    const Graph& g = inst.graph;
    const auto members = inst.truth.members();
    std::vector<Vertex> S;
    for (const auto& C : members) S.push_back(C[seed % C.size()]);
    const auto stored = desk_sketch(400, 4, 200 + seed), qp = desk_sketch(400, 4, 300 + seed);
    const auto tree = build_sketch_tree(g, S, stored, 25);
    QueryBudget b;
    b.max_leaves = default_max_leaves(0.2, 0.0012);
    Stream rng(derive_key({seed, 0x71756572ULL}));
    int exact = 0, sound = 0;
    for (int i = 0; i < 200; ++i) {
      const Vertex x = static_cast<Vertex>(rng.below(400));
      const auto res = find_neighbors(g, x, tree, qp, b);
      std::vector<Vertex> want;
      for (Vertex s : S)
        if (inst.truth.labels[s] == inst.truth.labels[x]) want.push_back(s);
      exact += res.vertices == want;
      sound += std::all_of(res.vertices.begin(), res.vertices.end(),
                           [&](Vertex y) { return inst.truth.labels[y] == inst.truth.labels[x]; });
    }
    const bool ok = exact >= 190 && sound == 200;
    o.pass &= ok;
    o.detail += "seed " + std::to_string(seed) + ": exact " + std::to_string(exact) + "/200, within cluster " +
                std::to_string(sound) + "/200; ";
  }
  return o;
}

// Shared by criteria 8 and 11: rows of one eval run plus the per-seed
// measured eps/phi^2 of the generated instances.
struct EndToEnd {
  EvalReport report;
  std::vector<double> ratio;
  int within = 0;
  double worst_seconds = 0;
};

EndToEnd end_to_end(double delta_exp) {
  const EvalConfig c = desk_eval(delta_exp);
  EndToEnd e;
  for (auto seed : c.seeds) {
    GeneratorConfig gc = c.gen;
    gc.seed = seed;
    const auto inst = generate_clusterable(gc);
    const auto m = measure_parameters(inst.graph, inst.truth);
    e.ratio.push_back(m.eps / (m.phi * m.phi));
  }
  e.report = run_eval(c);
  for (const auto& r : e.report.rows) {
    e.within += r.rate <= 0.10;
    e.worst_seconds = std::max(e.worst_seconds, r.preprocess_seconds + r.query_seconds_mean * static_cast<double>(r.queried));
  }
  return e;
}

std::string describe(const EndToEnd& e) {
  std::string s;
  for (std::size_t i = 0; i < e.report.rows.size(); ++i) {
    const auto& r = e.report.rows[i];
    s += "seed " + std::to_string(r.seed) + " eps/phi^2=" + num(e.ratio[i], 3) + " rate=" + num(r.rate, 3) +
         " |R|=" + std::to_string(r.representatives) + "; ";
  }
  return s;
}

bool instances_ok(const EndToEnd& e) {
  return std::all_of(e.ratio.begin(), e.ratio.end(), [](double r) { return r <= 0.03; });
}

Outcome end_to_end_oracle() {
  const auto e = end_to_end(0.5);
  Outcome o;
  o.pass = instances_ok(e) && e.within >= 8 && e.worst_seconds < 300.0;
  o.detail = std::to_string(e.within) + "/10 seeds within rate 0.10, slowest seed " + num(e.worst_seconds, 3) +
             " s; " + describe(e);
  return o;
}

Outcome approx_k_counts() {
  Outcome o{true, ""};
  int small_ok = 0;
  std::string small;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_clusterable({400, 4, 8, 0.0, seed});
    ApproxKConfig c;
    c.eps_apx = 0.5;
    c.phi = 0.2;
    c.eps = 0.0012;
    c.samples = 32;
    c.t_min = 25;
    c.degree = 0;
    c.seed = seed;
    const double k = approx_k(inst.graph, c).k;
    small_ok += k >= 4 / 1.5 && k <= 4 * 1.5;
    small += num(k, 3) + " ";
  }
  int big_ok = 0;
  std::string big;
  const auto desk = desk_eval(0.5);
  for (auto seed : desk.seeds) {
    GeneratorConfig gc = desk.gen;
    gc.seed = seed;
    const auto inst = generate_clusterable(gc);
    ApproxKConfig c;
    c.eps_apx = 0.5;
    c.phi = desk.pre.phi;
    c.eps = desk.pre.eps;
    c.t_min = desk.pre.t_min;
    c.degree = desk.pre.degree;
    c.seed = seed;
    const double k = approx_k(inst.graph, c).k;
    big_ok += k >= 8 / 2.0 && k <= 8 * 2.0;
    big += num(k, 3) + " ";
  }
  o.pass = small_ok >= 9 && big_ok >= 8;
  o.detail = "n=400 k=4 L=32: " + std::to_string(small_ok) + "/10 within [k/1.5, 1.5k] (" + small +
             "); n=4000 k=8: " + std::to_string(big_ok) + "/10 within [k/2, 2k] (" + big + ")";
  return o;
}

// One execution of the pipeline: artifact bytes, answers to 1000 queries,
// and the answers after a save/load round trip, written to `out`.
int determinism_child(const std::string& out) {
  const auto inst = generate_clusterable({1000, 4, 8, 0.001, 17});
  PreprocessConfig c;
  c.k_hat = 4;
  c.phi = 0.2;
  c.eps = 0.0012;
  c.t_min = 25;
  c.degree = 0;
  c.seed = 99;
  c.query_walks = WalkMode::table;
  const auto a = preprocess(inst.graph, c);
  std::vector<Vertex> xs(1000);
  Stream rng(5);
  for (auto& x : xs) x = static_cast<Vertex>(rng.below(1000));
  const auto answers = query_many(inst.graph, a, xs);
  const auto file = out + ".artifact";
  save_artifact(a, file);
  const auto loaded = load_artifact(file);
  std::filesystem::remove(file);
  const auto again = query_many(inst.graph, loaded, xs);
  const std::string bytes = serialize_artifact(a);
  std::ofstream f(out, std::ios::binary);
  f << bytes.size() << '\n' << bytes << '\n';
  for (int v : answers) f << v << ' ';
  f << '\n' << (serialize_artifact(loaded) == bytes) << ' ' << (again == answers) << '\n';
  return f ? 0 : 1;
}

std::string self_path;

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string pid = std::to_string(::getpid());
  std::string text[2];
  for (int run = 0; run < 2; ++run) {
    const auto path = (dir / ("subcluster_det_" + pid + "_" + std::to_string(run))).string();
    const std::string cmd = "\"" + self_path + "\" determinism-child \"" + path + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "child execution " + std::to_string(run) + " failed"};
    std::ifstream in(path, std::ios::binary);
    text[run].assign(std::istreambuf_iterator<char>(in), {});
    std::filesystem::remove(path);
  }
  const bool same = !text[0].empty() && text[0] == text[1];
  const bool roundtrip = text[0].size() >= 4 && text[0].substr(text[0].size() - 4) == "1 1\n";
  return {same && roundtrip, std::string("two executions ") + (same ? "byte-identical" : "DIFFER") + " (" +
                                 std::to_string(text[0].size()) + " bytes of artifact and answers), save/load " +
                                 (roundtrip ? "identical" : "DIFFERS")};
}

Outcome tradeoff() {
  ScalingConfig s;
  const auto base = desk_eval(0.5);
  s.gen = base.gen;
  s.pre = base.pre;
  s.ks = {8};
  s.delta_exps = {0.3, 0.5, 0.7};
  s.build = false;
  const auto rep = run_scaling_probe(s);
  std::string products;
  for (const auto& r : rep.rows)
    if (r.sweep == "delta") products += num(r.delta_exp, 2) + ":" + std::to_string(r.query_walks) + "x" + std::to_string(r.stored_walks) + " ";
  Outcome o;
  o.pass = rep.product_spread <= 2.0;
  o.detail = "product spread " + num(rep.product_spread, 4) + " (" + products + "); ";
  for (double dexp : {0.3, 0.7}) {
    const auto e = end_to_end(dexp);
    const bool ok = instances_ok(e) && e.within >= 8;
    o.pass &= ok;
    o.detail += "delta_exp=" + num(dexp, 2) + ": " + std::to_string(e.within) + "/10 seeds within 0.10 (" +
                describe(e) + ") ";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  self_path = std::filesystem::absolute(argv[0]).string();
  if (argc == 3 && std::string(argv[1]) == "determinism-child") return determinism_child(argv[2]);
  if (argc != 2) {
    std::cerr << "usage: acceptance <criterion 1-11>\n";
    return 2;
  }
  const int n = std::atoi(argv[1]);
  const std::vector<std::function<Outcome()>> checks{polynomial_bounds, chebyshev_truncation, projector,
                                                      spectral_structure, collision_counting, sketch_fidelity,
                                                      find_neighbors_exactness, end_to_end_oracle, approx_k_counts,
                                                      determinism, tradeoff};
  if (n < 1 || n > static_cast<int>(checks.size())) {
    std::cerr << "criterion must be 1-11\n";
    return 2;
  }
  Outcome o;
  try {
    o = checks[n - 1]();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail << std::endl;
  return o.pass ? 0 : 1;
}
