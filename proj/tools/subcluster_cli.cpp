// subcluster: command-line front end.
//
// Exit codes: 0 success, 2 usage or configuration, 3 data, 4 numeric.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "subcluster/approx_k.hpp"
#include "subcluster/bytes.hpp"
#include "subcluster/chebyshev.hpp"
#include "subcluster/errors.hpp"
#include "subcluster/eval.hpp"
#include "subcluster/exact_ref.hpp"
#include "subcluster/generator.hpp"
#include "subcluster/graph.hpp"
#include "subcluster/preprocess.hpp"

using namespace subcluster;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

// Every CSV opens with the artifact format version and a digest of the
// configuration that produced it.
void csv_header(std::ostream& os, std::uint64_t digest) {
  os << "# artifact_version=" << OracleArtifact::kVersion << "\n# config_digest=" << std::hex << std::setw(16)
     << std::setfill('0') << digest << std::dec << std::setfill(' ') << "\n";
}

// Writes to the named file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ParseError("cannot open " + path + " for writing");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct PolyFlags {
  std::optional<int> t_min, degree;
  void add(CLI::App* c) {
    c->add_option("--t-min", t_min, "override the walk length floor t")->check(CLI::PositiveNumber);
    c->add_option("--degree", degree, "override the degree of q")->check(CLI::NonNegativeNumber);
  }
};

void add_preprocess_options(CLI::App* c, PreprocessConfig& p, PolyFlags& pf, std::string& query_walks) {
  c->add_option("--khat", p.k_hat, "constant-factor estimate of k")->required()->check(CLI::PositiveNumber);
  c->add_option("--phi", p.phi, "inner conductance")->required()->check(CLI::Range(1e-9, 1.0));
  c->add_option("--eps", p.eps, "outer conductance")->required()->check(CLI::Range(1e-12, 1.0));
  c->add_option("--walks-scale", p.walks_scale, "C_r in r = C_r (n/k)^e")->check(CLI::PositiveNumber);
  c->add_option("--delta-exp", p.delta_exp, "query walks exponent")->check(CLI::Range(0.0, 1.0));
  c->add_option("--j", p.votes, "sketches per tree node")->check(CLI::PositiveNumber);
  c->add_option("--max-leaves", p.max_leaves, "leaf cap per neighbor search");
  c->add_option("--sample-multiplier", p.sample_multiplier, "C_s in |S| = C_s k ln(phi^2/eps)")
      ->check(CLI::PositiveNumber);
  c->add_option("--vote-fraction", p.vote_fraction)->check(CLI::Range(0.0, 1.0));
  c->add_option("--dot-fraction", p.dot_fraction)->check(CLI::Range(0.0, 1.0));
  c->add_option("--eta", p.eta, "cluster size ratio used by the absolute threshold")->check(CLI::PositiveNumber);
  c->add_option("--absolute-threshold", p.absolute_threshold, "compare dots against (1/eta)(k/n)");
  c->add_flag("--fresh-queries", p.fresh_queries, "fresh query walks instead of the derandomized table");
  c->add_option("--query-walks", query_walks, "query walk source")->check(CLI::IsMember({"table", "counter"}));
  c->add_flag("--strict-poly", p.strict_poly, "fail when the polynomial misses its bounds");
  pf.add(c);
}

void finish_preprocess(PreprocessConfig& p, const PolyFlags& pf, const std::string& query_walks) {
  p.t_min = pf.t_min;
  p.degree = pf.degree;
  p.query_walks = query_walks == "counter" ? WalkMode::counter : WalkMode::table;
}

std::vector<Vertex> read_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<Vertex> xs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    long long v;
    if (!(s >> v) || v < 0) throw ParseError(path + " line " + std::to_string(lineno) + ": expected a vertex id");
    xs.push_back(static_cast<Vertex>(v));
  }
  return xs;
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering oracle for bounded-degree graphs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; subcommand keys go under a [subcommand] section");
  int threads = 1;
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic clusterable graph and its labels");
  GeneratorConfig gc;
  std::string gen_graph, gen_labels, gen_kind = "expander";
  std::size_t clique_size = 0;
  gen->add_option("--n", gc.n, "vertices")->check(CLI::PositiveNumber);
  gen->add_option("--k", gc.k, "clusters")->required()->check(CLI::PositiveNumber);
  gen->add_option("--d", gc.d, "degree bound")->check(CLI::Range(1, 1 << 20));
  gen->add_option("--cross", gc.cross_edge_budget, "fraction of slots used by cross edges")
      ->check(CLI::Range(0.0, 0.999999));
  gen->add_option("--seed", gc.seed);
  gen->add_option("--reserved-slots", gc.reserved_slots)->check(CLI::NonNegativeNumber);
  gen->add_option("--kind", gen_kind)->check(CLI::IsMember({"expander", "cliques"}));
  gen->add_option("--clique-size", clique_size, "clique size for --kind cliques");
  gen->add_option("--graph", gen_graph, "graph output path")->required();
  gen->add_option("--labels", gen_labels, "labels output path")->required();

  // poly
  auto* poly = app.add_subcommand("poly", "build the walk polynomial and print its coefficients");
  PolyParams pp;
  PolyFlags poly_flags;
  std::string poly_out;
  bool poly_strict = false;
  poly->add_option("--n", pp.n)->required()->check(CLI::Range(2ULL, 1ULL << 62));
  poly->add_option("--phi", pp.phi)->required()->check(CLI::Range(1e-9, 1.0));
  poly->add_option("--eps", pp.eps)->required()->check(CLI::Range(1e-12, 1.0));
  poly->add_flag("--strict", poly_strict, "exit 4 when a bound fails");
  poly->add_option("--out", poly_out);
  poly_flags.add(poly);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "build the oracle artifact");
  PreprocessConfig pc;
  PolyFlags pre_flags;
  std::string pre_graph, pre_out, pre_walks = "table";
  pre->add_option("--graph", pre_graph)->required();
  pre->add_option("--seed", pc.seed);
  pre->add_option("--out", pre_out)->required();
  add_preprocess_options(pre, pc, pre_flags, pre_walks);

  // query
  auto* qry = app.add_subcommand("query", "label vertices with an artifact");
  std::string q_oracle, q_graph, q_batch;
  std::optional<long long> q_vertex;
  qry->add_option("--oracle", q_oracle)->required();
  qry->add_option("--graph", q_graph)->required();
  auto* qv = qry->add_option("--vertex", q_vertex);
  auto* qb = qry->add_option("--batch", q_batch, "file with one vertex id per line");
  qv->excludes(qb);
  qb->excludes(qv);

  // approxk
  auto* apx = app.add_subcommand("approxk", "estimate the number of clusters");
  ApproxKConfig ac;
  PolyFlags apx_flags;
  std::string apx_graph;
  apx->add_option("--graph", apx_graph)->required();
  apx->add_option("--khat", ac.k_hat)->required()->check(CLI::PositiveNumber);
  apx->add_option("--phi", ac.phi)->required()->check(CLI::Range(1e-9, 1.0));
  apx->add_option("--eps", ac.eps)->required()->check(CLI::Range(1e-12, 1.0));
  apx->add_option("--precision", ac.eps_apx)->required()->check(CLI::Range(1e-6, 1.0));
  apx->add_option("--seed", ac.seed);
  apx->add_option("--samples", ac.samples)->check(CLI::PositiveNumber);
  apx->add_option("--boost", ac.boost)->check(CLI::PositiveNumber);
  apx->add_option("--walks-scale", ac.walks_scale)->check(CLI::PositiveNumber);
  apx->add_option("--admissibility-constant", ac.admissibility_constant)->check(CLI::PositiveNumber);
  apx_flags.add(apx);

  // eval
  auto* ev = app.add_subcommand("eval", "generate, preprocess, query and score over seeds");
  EvalConfig ec;
  PolyFlags ev_flags;
  std::string ev_out, ev_walks = "table";
  std::vector<std::uint64_t> ev_seeds;
  ev->add_option("--n", ec.gen.n)->required()->check(CLI::PositiveNumber);
  ev->add_option("--k", ec.gen.k)->required()->check(CLI::PositiveNumber);
  ev->add_option("--d", ec.gen.d)->check(CLI::Range(1, 1 << 20));
  ev->add_option("--cross", ec.gen.cross_edge_budget)->check(CLI::Range(0.0, 0.999999));
  ev->add_option("--seeds", ev_seeds, "seed list")->delimiter(',');
  ev->add_option("--queries", ec.queries, "vertices queried per seed (0 = all)");
  ev->add_flag("--timings", ec.timings, "add wall-time columns (breaks byte-identical output)");
  ev->add_option("--out", ev_out);
  add_preprocess_options(ev, ec.pre, ev_flags, ev_walks);

  // exact-check
  auto* ex = app.add_subcommand("exact-check", "dense spectral invariant checks");
  std::string ex_graph, ex_labels, ex_out;
  double ex_phi = 0, ex_eps = 0;
  std::optional<double> ex_delta;
  PolyFlags ex_flags;
  ex->add_option("--graph", ex_graph)->required();
  ex->add_option("--labels", ex_labels)->required();
  ex->add_option("--phi", ex_phi)->required()->check(CLI::Range(1e-9, 1.0));
  ex->add_option("--eps", ex_eps)->required()->check(CLI::Range(1e-12, 1.0));
  ex->add_option("--delta", ex_delta, "B_delta threshold; default (eps/phi^2)^(2/3)")->check(CLI::PositiveNumber);
  ex->add_option("--out", ex_out);
  ex_flags.add(ex);

  // scaling-probe
  auto* sp = app.add_subcommand("scaling-probe", "walk counts and artifact size across k and delta_exp");
  ScalingConfig sc;
  PolyFlags sp_flags;
  std::string sp_out, sp_walks = "table";
  bool sp_no_build = false;
  sc.gen.n = 4096;
  sp->add_option("--n", sc.gen.n)->check(CLI::PositiveNumber);
  sp->add_option("--k", sc.gen.k, "cluster count for the delta sweep")->check(CLI::PositiveNumber);
  sp->add_option("--d", sc.gen.d)->check(CLI::Range(1, 1 << 20));
  sp->add_option("--cross", sc.gen.cross_edge_budget)->check(CLI::Range(0.0, 0.999999));
  sp->add_option("--seed", sc.gen.seed);
  sp->add_option("--ks", sc.ks)->delimiter(',');
  sp->add_option("--delta-exps", sc.delta_exps)->delimiter(',');
  sp->add_flag("--no-build", sp_no_build, "skip preprocessing (walk counts only)");
  sp->add_option("--out", sp_out);
  add_preprocess_options(sp, sc.pre, sp_flags, sp_walks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      Instance inst;
      if (gen_kind == "cliques") {
        if (!clique_size) throw ConfigError("--kind cliques needs --clique-size");
        inst = disjoint_cliques(gc.k, clique_size, gen->count("--d") ? gc.d : -1);
      } else {
        if (!gc.n) throw ConfigError("--n is required for expander instances");
        inst = generate_clusterable(gc);
      }
      save_graph(inst.graph, gen_graph);
      save_labels(inst.truth, gen_labels);
      std::cerr << "n=" << inst.graph.n() << " d=" << inst.graph.d() << " edges=" << inst.graph.edge_count()
                << " eta=" << inst.truth.eta() << "\n";
    } else if (*poly) {
      pp.t_min = poly_flags.t_min;
      pp.degree = poly_flags.degree;
      PolyBuildOptions o;
      o.strict = poly_strict;
      const WalkPolynomial wp = build_walk_polynomial(pp, o);
      const auto& v = wp.validation;
      Output out(poly_out);
      auto& os = out.get();
      csv_header(os, wp.digest());
      os << "# n=" << pp.n << " phi=" << num(pp.phi) << " eps=" << num(pp.eps) << " t_min=" << wp.t_min
         << " t_delta=" << wp.t_delta << " precision_bits=" << wp.precision_bits() << "\n";
      os << "# logarithms: natural\n";
      os << "# max_abs_low=" << num(v.max_abs_low) << " at x=" << num(v.worst_low_x)
         << " bound=" << num(v.bound_low) << (v.low_ok() ? " ok" : " FAIL") << "\n";
      os << "# max_dev_flat=" << num(v.max_dev_flat) << " at x=" << num(v.worst_flat_x)
         << " bound=" << num(v.bound_flat) << (v.flat_ok() ? " ok" : " FAIL") << "\n";
      os << "# horner_clenshaw_rel=" << num(v.max_rel_disagreement) << " tol=" << num(v.agreement_tol) << "\n";
      os << "# p(1)=" << num(v.p_at_one) << " log10_max_coeff=" << num(v.log10_max_coeff)
         << " log10_cap=" << num(v.log10_coeff_cap) << "\n";
      for (const auto& w : wp.warnings) os << "# warning: " << w << "\n";
      os << "t,c_t\n";
      for (std::size_t i = 0; i < wp.coeffs.size(); ++i)
        os << wp.t_min + static_cast<int>(i) << ',' << std::setprecision(17) << wp.coeffs[i] << "\n";
      print_warnings(wp.warnings);
    } else if (*pre) {
      finish_preprocess(pc, pre_flags, pre_walks);
      pc.threads = threads;
      const Graph g = load_graph(pre_graph);
      const OracleArtifact a = preprocess(g, pc);
      print_warnings(a.poly.warnings);
      save_artifact(a, pre_out);
      const auto& d = a.diag;
      std::cerr << "sample=" << d.sample_size << " mutual_edges=" << d.mutual_edges << " components=" << d.components
                << " candidates=" << d.candidates << " representatives=" << d.representatives
                << " aborted=" << d.aborted_queries << "\n";
    } else if (*qry) {
      if (!q_vertex && q_batch.empty()) throw ConfigError("query needs --vertex or --batch");
      const OracleArtifact a = load_artifact(q_oracle);
      const Graph g = load_graph(q_graph);
      std::vector<Vertex> xs;
      if (q_vertex) {
        if (*q_vertex < 0 || static_cast<unsigned long long>(*q_vertex) >= g.n())
          throw ContractViolation("vertex " + std::to_string(*q_vertex) + " out of range");
        xs.push_back(static_cast<Vertex>(*q_vertex));
      } else {
        xs = read_batch(q_batch);
      }
      const auto labels = query_many(g, a, xs, threads);
      csv_header(std::cout, fnv1a(serialize_artifact(a)));
      std::cout << "vertex,label\n";
      for (std::size_t i = 0; i < xs.size(); ++i) std::cout << xs[i] << ',' << labels[i] << "\n";
    } else if (*apx) {
      ac.t_min = apx_flags.t_min;
      ac.degree = apx_flags.degree;
      ac.threads = threads;
      const Graph g = load_graph(apx_graph);
      const auto r = approx_k(g, ac);
      print_warnings(r.warnings);
      std::ostringstream key;
      key << "precision=" << num(ac.eps_apx) << " phi=" << num(ac.phi) << " eps=" << num(ac.eps) << " L=" << r.samples
          << " T=" << r.boost << " k_hat=" << ac.k_hat << " t_min=" << ac.t_min.value_or(0)
          << " degree=" << ac.degree.value_or(-1) << " seed=" << ac.seed << " graph=" << g.digest();
      csv_header(std::cout, fnv1a(key.str()));
      std::cout << "estimate_k_over_n,estimate_k,L,T\n"
                << std::setprecision(12) << r.k_over_n << ',' << r.k << ',' << r.samples << ',' << r.boost << "\n";
    } else if (*ev) {
      finish_preprocess(ec.pre, ev_flags, ev_walks);
      if (!ev_seeds.empty()) ec.seeds = ev_seeds;
      ec.threads = threads;
      const auto rep = run_eval(ec);
      Output out(ev_out);
      write_eval_csv(out.get(), rep, ec.timings);
    } else if (*ex) {
      const Graph g = load_graph(ex_graph);
      const Clustering labels = load_labels(ex_labels, g.n());
      const auto ref = build_reference(g, labels);
      const auto m = measure_parameters(g, labels);
      std::vector<CheckRow> rows;
      rows.push_back({"eps_given", ex_eps, 0, true});
      rows.push_back({"phi_given", ex_phi, 0, true});
      rows.push_back({"eps_measured", m.eps, 0, true});
      rows.push_back({"phi_estimated", m.phi, 0, true});
      for (auto& r : eigengap_check(ref, m).rows) rows.push_back(r);
      for (auto& r : cluster_mean_checks(ref, labels, m).rows) rows.push_back(r);
      const double ratio = m.phi > 0 ? m.eps / (m.phi * m.phi) : 1.0;
      const double delta = ex_delta.value_or(ratio > 0 ? std::pow(ratio, 2.0 / 3.0) : 1.0);
      const auto bd = b_delta(ref, labels, delta, m);
      rows.push_back({"B_delta size", static_cast<double>(bd.size), bd.bound, bd.within_bound()});
      PolyParams p;
      p.n = g.n();
      p.phi = ex_phi;
      p.eps = ex_eps;
      p.t_min = ex_flags.t_min;
      p.degree = ex_flags.degree;
      const int t = p.walk_length();
      const double cb = walk_norm_constant(ref, t);
      rows.push_back({"walk norm constant C_B at t=" + std::to_string(t), cb, 10.0, cb <= 10.0});
      const auto sep = dot_separation(ref, labels, bd.member);
      rows.push_back({"dot separation (max cross - min same)", sep.max_cross - sep.min_same, 0.0, sep.separated()});
      if (ex_flags.t_min || ex_flags.degree || g.n() <= 400) {
        PolyBuildOptions o;
        o.validate = false;
        const auto wp = build_walk_polynomial(p, o);
        const auto pd = dense_p_of_M(ref, wp);
        const double bound = ex_eps / (ex_phi * ex_phi) + std::pow(static_cast<double>(g.n()), -3.0);
        rows.push_back({"projector distance", pd.power, bound, pd.power <= bound});
      }
      Output out(ex_out);
      auto& os = out.get();
      std::ostringstream key;
      key << "phi=" << num(ex_phi) << " eps=" << num(ex_eps) << " delta=" << num(delta) << " t=" << t
          << " graph=" << g.digest();
      csv_header(os, fnv1a(key.str()));
      os << "# phi estimated as min over clusters of lambda_2(cluster)/2 (Cheeger lower bound)\n";
      os << "invariant,value,bound,pass\n";
      for (const auto& r : rows)
        os << '"' << r.name << "\"," << num(r.value) << ',' << num(r.bound) << ',' << (r.pass ? "pass" : "fail")
           << "\n";
    } else if (*sp) {
      finish_preprocess(sc.pre, sp_flags, sp_walks);
      sc.pre.threads = threads;
      sc.build = !sp_no_build;
      const auto rep = run_scaling_probe(sc);
      Output out(sp_out);
      write_scaling_csv(out.get(), rep);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kNumeric;
  } catch (const PreprocessingFailure& e) {
    std::cerr << "preprocessing failed: " << e.what() << "\n";
    return kData;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const WrongGraphError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const ContractViolation& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
