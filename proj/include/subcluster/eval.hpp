#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subcluster/generator.hpp"
#include "subcluster/preprocess.hpp"

namespace subcluster {

// Canonical key=value rendering; the config digest hashes this text.
std::string describe_config(const GeneratorConfig& gen, const PreprocessConfig& pre);
std::uint64_t config_digest(const GeneratorConfig& gen, const PreprocessConfig& pre);

struct EvalConfig {
  GeneratorConfig gen;            // seed is replaced per run
  std::vector<std::uint64_t> seeds{1};
  PreprocessConfig pre;           // seed is replaced per run
  std::size_t queries = 0;        // vertices queried per run; 0 = all
  bool timings = false;
  int threads = 1;
};

struct EvalRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  int k = 0, d = 0;
  double cross = 0;
  double eps_measured = 0;  // max outer conductance of the true clusters
  std::string status = "ok";
  std::size_t candidates = 0, representatives = 0;
  std::size_t queried = 0;
  std::size_t errors = 0;
  double rate = 0;
  std::size_t unclassified = 0;
  std::size_t stored_walks = 0, query_walks = 0;
  std::size_t artifact_bytes = 0;
  double mean_is_covered = 0;
  double preprocess_seconds = 0, query_seconds_mean = 0, query_seconds_max = 0;
};

struct EvalReport {
  std::uint64_t digest = 0;
  std::vector<EvalRow> rows;  // sorted by seed
};

// Generate, preprocess, query and score one instance per seed.  A seed whose
// preprocessing finds no representative is reported with status
// "preprocess-failed" and every vertex unclassified; other errors propagate
// with the failing stage named.
EvalReport run_eval(const EvalConfig& cfg);
void write_eval_csv(std::ostream& out, const EvalReport& r, bool timings);

struct ScalingConfig {
  GeneratorConfig gen;
  std::vector<int> ks{2, 4, 8, 16};
  std::vector<double> delta_exps{0.3, 0.5, 0.7};
  PreprocessConfig pre;
  bool build = true;  // preprocess each point to measure artifact size
};

struct ScalingRow {
  std::string sweep;  // "k" or "delta"
  std::size_t n = 0;
  int k = 0;
  double delta_exp = 0;
  std::size_t query_walks = 0, stored_walks = 0;
  double product = 0;  // query walks x stored walks per representative
  std::size_t representatives = 0;
  std::size_t artifact_bytes = 0;
};

struct ScalingReport {
  std::uint64_t digest = 0;
  std::vector<ScalingRow> rows;
  bool query_walks_decreasing = true;  // along the k sweep
  double product_spread = 1;           // max/min product along the delta sweep
};

ScalingReport run_scaling_probe(const ScalingConfig& cfg);
void write_scaling_csv(std::ostream& out, const ScalingReport& r);

}  // namespace subcluster
