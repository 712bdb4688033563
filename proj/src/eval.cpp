#include "subcluster/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "subcluster/bytes.hpp"
#include "subcluster/errors.hpp"
#include "subcluster/misclassification.hpp"
#include "subcluster/parallel.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Rethrows with the failing stage named; PreprocessingFailure passes through.
template <class F>
auto staged(const char* stage, std::uint64_t seed, F&& f) {
  try {
    return f();
  } catch (const PreprocessingFailure&) {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(std::string("stage ") + stage + " (seed " + std::to_string(seed) + "): " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("stage ") + stage + " (seed " + std::to_string(seed) + "): " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string("stage ") + stage + " (seed " + std::to_string(seed) + "): " + e.what());
  } catch (const CapacityError& e) {
    throw CapacityError(std::string("stage ") + stage + " (seed " + std::to_string(seed) + "): " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "auto"; }

}  // namespace

std::string describe_config(const GeneratorConfig& gen, const PreprocessConfig& p) {
  std::ostringstream s;
  s << "n=" << gen.n << "\nk=" << gen.k << "\nd=" << gen.d << "\ncross=" << fmt(gen.cross_edge_budget)
    << "\nreserved_slots=" << gen.reserved_slots << "\nk_hat=" << p.k_hat << "\nphi=" << fmt(p.phi)
    << "\neps=" << fmt(p.eps) << "\nsample_multiplier=" << fmt(p.sample_multiplier)
    << "\nwalks_scale=" << fmt(p.walks_scale) << "\ndelta_exp=" << fmt(p.delta_exp) << "\nvotes=" << p.votes
    << "\nmax_leaves=" << (p.max_leaves ? std::to_string(*p.max_leaves) : "auto")
    << "\nvote_fraction=" << fmt(p.vote_fraction) << "\ndot_fraction=" << fmt(p.dot_fraction)
    << "\neta=" << fmt(p.eta) << "\nabsolute_threshold=" << p.uses_absolute_threshold()
    << "\nt_min=" << opt(p.t_min) << "\ndegree=" << opt(p.degree) << "\nfresh_queries=" << p.fresh_queries
    << "\nquery_walks=" << (p.query_walks == WalkMode::table ? "table" : "counter") << "\n";
  return s.str();
}

std::uint64_t config_digest(const GeneratorConfig& gen, const PreprocessConfig& pre) {
  return fnv1a(describe_config(gen, pre));
}

EvalReport run_eval(const EvalConfig& cfg) {
  cfg.pre.check();
  EvalReport rep;
  rep.digest = config_digest(cfg.gen, cfg.pre);
  auto seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (const auto seed : seeds) {
    EvalRow row;
    row.seed = seed;
    GeneratorConfig gc = cfg.gen;
    gc.seed = seed;
    const Instance inst = staged("generate", seed, [&] { return generate_clusterable(gc); });
    const Graph& g = inst.graph;
    row.n = g.n();
    row.k = inst.truth.k;
    row.d = g.d();
    row.cross = gc.cross_edge_budget;
    for (const auto& C : inst.truth.members())
      row.eps_measured = std::max(row.eps_measured, outer_conductance(g, C));

    PreprocessConfig pc = cfg.pre;
    pc.seed = seed;
    pc.threads = cfg.threads;
    row.stored_walks = pc.stored_walks(g.n());
    row.query_walks = pc.query_walk_count(g.n());

    std::vector<Vertex> xs(g.n());
    std::iota(xs.begin(), xs.end(), Vertex{0});
    if (cfg.queries && cfg.queries < g.n()) {
      Stream rng(derive_key({seed, 0x6576616cULL}));
      rng.shuffle(xs);
      xs.resize(cfg.queries);
      std::sort(xs.begin(), xs.end());
    }
    row.queried = xs.size();
    std::vector<int> sub(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sub[i] = inst.truth.labels[xs[i]];
    const Clustering truth(sub, inst.truth.k);

    const auto t0 = Clock::now();
    OracleArtifact a;
    bool ok = true;
    try {
      a = staged("preprocess", seed, [&] { return preprocess(g, pc); });
    } catch (const PreprocessingFailure&) {
      ok = false;
    }
    row.preprocess_seconds = seconds_since(t0);
    if (!ok) {
      row.status = "preprocess-failed";
      row.errors = row.unclassified = xs.size();
      row.rate = 1.0;
      rep.rows.push_back(row);
      continue;
    }
    row.candidates = a.diag.candidates;
    row.representatives = a.diag.representatives;
    row.artifact_bytes = serialize_artifact(a).size();

    std::vector<int> labels(xs.size());
    std::vector<NeighborResult> details(xs.size());
    std::vector<double> secs(xs.size());
    staged("query", seed, [&] {
      parallel_for(xs.size(), cfg.threads, [&](std::size_t i) {
        const auto q0 = Clock::now();
        labels[i] = query(g, a, xs[i], &details[i]);
        secs[i] = seconds_since(q0);
      });
      return 0;
    });
    double calls = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      calls += static_cast<double>(details[i].is_covered_calls);
      row.query_seconds_mean += secs[i];
      row.query_seconds_max = std::max(row.query_seconds_max, secs[i]);
    }
    if (!xs.empty()) {
      row.mean_is_covered = calls / static_cast<double>(xs.size());
      row.query_seconds_mean /= static_cast<double>(xs.size());
    }
    const auto m = misclassification(truth, labels);
    row.errors = m.errors;
    row.rate = m.rate;
    row.unclassified = m.unclassified;
    rep.rows.push_back(row);
  }
  return rep;
}

void write_eval_csv(std::ostream& out, const EvalReport& r, bool timings) {
  out << "# artifact_version=" << OracleArtifact::kVersion << "\n";
  out << "# config_digest=" << std::hex << std::setw(16) << std::setfill('0') << r.digest << std::dec
      << std::setfill(' ') << "\n";
  out << "seed,n,k,d,cross,eps_measured,status,candidates,representatives,queried,errors,rate,unclassified,"
         "stored_walks,query_walks,artifact_bytes,mean_is_covered";
  if (timings) out << ",preprocess_seconds,query_seconds_mean,query_seconds_max";
  out << "\n";
  for (const auto& w : r.rows) {
    out << w.seed << ',' << w.n << ',' << w.k << ',' << w.d << ',' << fmt(w.cross) << ',' << fmt(w.eps_measured)
        << ',' << w.status << ',' << w.candidates << ',' << w.representatives << ',' << w.queried << ','
        << w.errors << ',' << fmt(w.rate) << ',' << w.unclassified << ',' << w.stored_walks << ','
        << w.query_walks << ',' << w.artifact_bytes << ',' << fmt(w.mean_is_covered);
    if (timings)
      out << ',' << fmt(w.preprocess_seconds) << ',' << fmt(w.query_seconds_mean) << ','
          << fmt(w.query_seconds_max);
    out << "\n";
  }
}

ScalingReport run_scaling_probe(const ScalingConfig& cfg) {
  ScalingReport rep;
  rep.digest = config_digest(cfg.gen, cfg.pre);
  auto point = [&](const char* sweep, int k, double dexp) {
    ScalingRow row;
    row.sweep = sweep;
    row.n = cfg.gen.n;
    row.k = k;
    row.delta_exp = dexp;
    PreprocessConfig pc = cfg.pre;
    pc.k_hat = static_cast<std::size_t>(k);
    pc.delta_exp = dexp;
    pc.check();
    row.query_walks = pc.query_walk_count(row.n);
    row.stored_walks = pc.stored_walks(row.n);
    row.product = static_cast<double>(row.query_walks) * static_cast<double>(row.stored_walks);
    if (cfg.build) {
      GeneratorConfig gc = cfg.gen;
      gc.k = k;
      const Instance inst = staged("generate", gc.seed, [&] { return generate_clusterable(gc); });
      try {
        const OracleArtifact a =
            staged("preprocess", gc.seed, [&] { return preprocess(inst.graph, pc); });
        row.representatives = a.diag.representatives;
        row.artifact_bytes = serialize_artifact(a).size();
      } catch (const PreprocessingFailure&) {
      }
    }
    rep.rows.push_back(row);
  };
  for (int k : cfg.ks) point("k", k, cfg.pre.delta_exp);
  for (double dexp : cfg.delta_exps) point("delta", cfg.gen.k, dexp);

  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (const auto& r : rep.rows) {
    if (r.sweep == "k") {
      if (r.query_walks >= prev) rep.query_walks_decreasing = false;
      prev = r.query_walks;
    } else {
      lo = std::min(lo, r.product);
      hi = std::max(hi, r.product);
    }
  }
  rep.product_spread = hi > 0 ? hi / lo : 1.0;
  return rep;
}

void write_scaling_csv(std::ostream& out, const ScalingReport& r) {
  out << "# artifact_version=" << OracleArtifact::kVersion << "\n";
  out << "# config_digest=" << std::hex << std::setw(16) << std::setfill('0') << r.digest << std::dec
      << std::setfill(' ') << "\n";
  out << "# query_walks_decreasing_in_k=" << (r.query_walks_decreasing ? "yes" : "no")
      << " product_spread=" << fmt(r.product_spread) << "\n";
  out << "sweep,n,k,n_over_k,delta_exp,query_walks,stored_walks,product,representatives,artifact_bytes\n";
  for (const auto& w : r.rows)
    out << w.sweep << ',' << w.n << ',' << w.k << ',' << fmt(static_cast<double>(w.n) / w.k) << ','
        << fmt(w.delta_exp) << ',' << w.query_walks << ',' << w.stored_walks << ',' << fmt(w.product) << ','
        << w.representatives << ',' << w.artifact_bytes << "\n";
}

}  // namespace subcluster
