#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subcluster/sketch.hpp"

namespace subcluster {

struct TreeNode {
  std::size_t begin = 0, end = 0;  // label = order[begin, end)
  int left = -1, right = -1;
  std::vector<SketchVector> sketches;

  bool leaf() const { return left < 0; }
  std::size_t size() const { return end - begin; }
  bool operator==(const TreeNode&) const = default;
};

// Complete binary tree over an ordered vertex list; node 0 is the root and
// nodes are numbered in preorder.  The left child takes ceil(|S_u| / 2).
struct SketchTree {
  std::vector<Vertex> order;
  std::vector<TreeNode> nodes;
  int votes = 0;  // J sketches per node

  std::size_t stored_support() const;
  bool operator==(const SketchTree&) const = default;
};

// Node u's j-th sketch uses trial trial_base + u * J + j.
SketchTree build_sketch_tree(const Graph& g, std::vector<Vertex> S, const SketchParams& params, int J,
                             std::uint64_t trial_base = 0, int threads = 1);

struct QueryBudget {
  std::size_t max_leaves = 1;
  double vote_fraction = 0.3;
  double dot_fraction = 0.5;
  // Compare against dot_fraction * (1/eta) * (k_hat/n) instead of the
  // self-estimate.
  bool absolute_threshold = false;
  double eta = 2.0;
  std::size_t k_hat = 1;

  void check() const;
};

std::size_t default_max_leaves(double phi, double eps);

// Query-side sketches of x.  In derandomized mode the J vote sketches and the
// self-estimate pair use fixed trials and are computed once and reused; in
// fresh mode every is_covered call draws new trials from a call counter.
class QuerySketches {
 public:
  QuerySketches(const Graph& g, Vertex x, const SketchParams& params, int J, bool fresh = false,
                std::uint64_t nonce = 0);

  // Prepare sketches for the next is_covered call.
  void next_call();
  const SketchVector& vote(int j) const { return votes_[static_cast<std::size_t>(j)]; }
  double self_estimate() const { return self_; }
  bool ready() const { return ready_; }
  Vertex vertex() const { return x_; }
  int J() const { return J_; }
  std::size_t graph_n() const { return g_.n(); }
  std::uint64_t sketches_built() const { return built_; }

 private:
  void draw(std::uint64_t base);

  const Graph& g_;
  Vertex x_;
  const SketchParams& params_;
  int J_;
  bool fresh_;
  std::uint64_t nonce_;
  std::uint64_t calls_ = 0;
  std::uint64_t built_ = 0;
  bool ready_ = false;
  std::vector<SketchVector> votes_;
  double self_ = 0.0;
};

struct CoverVotes {
  int votes = 0;
  double threshold = 0.0;
  bool covered = false;
};

CoverVotes is_covered_votes(QuerySketches& q, const TreeNode& node, const QueryBudget& budget);
bool is_covered(QuerySketches& q, const TreeNode& node, const QueryBudget& budget);

struct NeighborResult {
  std::vector<Vertex> vertices;    // labels of the reached leaves, in tree order
  std::vector<std::size_t> leaves; // positions in tree.order
  bool aborted = false;
  std::size_t is_covered_calls = 0;
  std::size_t leaves_visited = 0;
};

struct QueryMode {
  bool fresh = false;
  std::uint64_t nonce = 0;
};

NeighborResult find_neighbors(const Graph& g, Vertex x, const SketchTree& tree, const SketchParams& query_params,
                              const QueryBudget& budget, const QueryMode& mode = {});

}  // namespace subcluster
