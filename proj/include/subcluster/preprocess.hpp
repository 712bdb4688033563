#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subcluster/sketch_tree.hpp"

namespace subcluster {

struct PreprocessConfig {
  std::size_t k_hat = 1;
  double phi = 0.5;
  double eps = 0.01;
  double sample_multiplier = 4.0;  // |S| = ceil(C_s k_hat ln(phi^2/eps))
  double walks_scale = 8.0;        // C_r
  double delta_exp = 0.5;          // query walks C_r (n/k)^delta, stored walks C_r (n/k)^(1-delta)
  int votes = 25;                  // J
  std::optional<std::size_t> max_leaves;
  double vote_fraction = 0.3;
  double dot_fraction = 0.5;
  double eta = 2.0;
  std::optional<bool> absolute_threshold;  // defaults to delta_exp < 0.5
  std::optional<int> t_min;
  std::optional<int> degree;
  std::uint64_t seed = 1;
  bool fresh_queries = false;
  WalkMode query_walks = WalkMode::table;
  std::size_t table_max_bytes = WalkTable::kDefaultMaxBytes;
  bool strict_poly = false;
  bool validate_poly = true;
  int threads = 1;

  void check() const;
  std::size_t sample_size() const;
  std::size_t stored_walks(std::size_t n) const;
  std::size_t query_walk_count(std::size_t n) const;
  std::size_t resolved_max_leaves() const;
  bool uses_absolute_threshold() const { return absolute_threshold.value_or(delta_exp < 0.5); }
  PolyParams poly_params(std::size_t n) const;
};

struct PreprocessDiagnostics {
  std::size_t sample_size = 0;
  std::size_t directed_edges = 0;
  std::size_t mutual_edges = 0;
  std::size_t components = 0;
  std::size_t candidates = 0;
  std::size_t representatives = 0;
  std::size_t aborted_queries = 0;
  std::size_t singleton_hits = 0;
  bool operator==(const PreprocessDiagnostics&) const = default;
};

struct OracleArtifact {
  static constexpr std::uint32_t kVersion = 1;

  PreprocessConfig config;
  std::uint64_t graph_digest = 0;
  std::size_t n = 0;
  int d = 0;
  WalkPolynomial poly;
  std::size_t r_stored = 0, r_query = 0;
  std::size_t max_leaves = 0;
  std::uint64_t tree_seed = 0, query_seed = 0;
  SketchTree tree;  // over R
  PreprocessDiagnostics diag;

  const std::vector<Vertex>& representatives() const { return tree.order; }
  QueryBudget budget() const;
  // Builds the query-side walk table from query_seed.
  void prepare();
  const SketchParams& query_params() const;

 private:
  std::shared_ptr<const SketchParams> query_params_;
};

// Intermediate state of one preprocessing run, for tests and diagnostics.
struct PreprocessTrace {
  std::vector<Vertex> S, S_test;
  std::vector<NeighborResult> found;  // per position of S, against the tree of S
  std::vector<std::pair<std::size_t, std::size_t>> directed, mutual;  // positions in S
  std::vector<std::size_t> component;  // union-find root per position of S
  std::vector<Vertex> candidates;
  std::vector<NeighborResult> hits;   // per position of S_test, against the candidate tree
  std::vector<std::size_t> counter;   // per candidate
  std::vector<Vertex> R;
};

OracleArtifact preprocess(const Graph& g, const PreprocessConfig& cfg, PreprocessTrace* trace = nullptr);

// Index of x's representative in R, or -1 when the neighbor search does not
// end in exactly one leaf.
int query(const Graph& g, const OracleArtifact& a, Vertex x, NeighborResult* detail = nullptr);
std::vector<int> query_many(const Graph& g, const OracleArtifact& a, const std::vector<Vertex>& xs, int threads = 1);

std::string serialize_artifact(const OracleArtifact& a);
OracleArtifact deserialize_artifact(const std::string& bytes);
void save_artifact(const OracleArtifact& a, const std::string& path);
OracleArtifact load_artifact(const std::string& path);

}  // namespace subcluster
