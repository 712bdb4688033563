#include "subcluster/sketch_tree.hpp"

#include <cmath>

#include "subcluster/errors.hpp"
#include "subcluster/parallel.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

int build_nodes(std::vector<TreeNode>& nodes, std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back({begin, end, -1, -1, {}});
  const std::size_t size = end - begin;
  if (size > 1) {
    const std::size_t mid = begin + (size + 1) / 2;
    const int l = build_nodes(nodes, begin, mid);
    const int r = build_nodes(nodes, mid, end);
    nodes[static_cast<std::size_t>(id)].left = l;
    nodes[static_cast<std::size_t>(id)].right = r;
  }
  return id;
}

}  // namespace

std::size_t SketchTree::stored_support() const {
  std::size_t s = 0;
  for (const auto& node : nodes)
    for (const auto& sk : node.sketches) s += sk.v.size();
  return s;
}

SketchTree build_sketch_tree(const Graph& g, std::vector<Vertex> S, const SketchParams& params, int J,
                             std::uint64_t trial_base, int threads) {
  if (S.empty()) throw ContractViolation("sketch tree over an empty set");
  if (J < 1) throw ConfigError("sketch tree needs J >= 1");
  params.check();
  SketchTree tree;
  tree.order = std::move(S);
  tree.votes = J;
  build_nodes(tree.nodes, 0, tree.order.size());
  for (auto& node : tree.nodes) node.sketches.resize(static_cast<std::size_t>(J));
  const std::size_t tasks = tree.nodes.size() * static_cast<std::size_t>(J);
  parallel_for(tasks, threads, [&](std::size_t task) {
    const std::size_t u = task / static_cast<std::size_t>(J);
    const std::size_t j = task % static_cast<std::size_t>(J);
    auto& node = tree.nodes[u];
    std::span<const Vertex> label(tree.order.data() + node.begin, node.size());
    node.sketches[j] = sketch(g, label, params, trial_base + task);
  });
  return tree;
}

void QueryBudget::check() const {
  if (!(vote_fraction > 0.0 && vote_fraction < 1.0)) throw ConfigError("vote fraction must lie in (0,1)");
  if (!(dot_fraction > 0.0 && dot_fraction < 1.0)) throw ConfigError("dot fraction must lie in (0,1)");
  if (absolute_threshold && !(eta > 0.0)) throw ConfigError("eta must be positive");
  if (k_hat < 1) throw ConfigError("k_hat must be at least 1");
}

std::size_t default_max_leaves(double phi, double eps) {
  return static_cast<std::size_t>(std::ceil(4.0 * std::cbrt(phi * phi / eps)));
}

QuerySketches::QuerySketches(const Graph& g, Vertex x, const SketchParams& params, int J, bool fresh,
                             std::uint64_t nonce)
    : g_(g), x_(x), params_(params), J_(J), fresh_(fresh), nonce_(nonce) {
  if (J < 1) throw ConfigError("J must be at least 1");
  if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  if (fresh && params.source.mode == WalkMode::table)
    throw ConfigError("fresh query randomness needs counter-keyed walks, not a walk table");
}

void QuerySketches::draw(std::uint64_t base) {
  std::span<const Vertex> one(&x_, 1);
  votes_.resize(static_cast<std::size_t>(J_));
  for (int j = 0; j < J_; ++j) votes_[static_cast<std::size_t>(j)] = sketch(g_, one, params_, base + static_cast<std::uint64_t>(j));
  auto a = sketch(g_, one, params_, base + static_cast<std::uint64_t>(J_));
  auto b = sketch(g_, one, params_, base + static_cast<std::uint64_t>(J_) + 1);
  self_ = self_product(a, b);
  built_ += static_cast<std::uint64_t>(J_) + 2;
  ready_ = true;
}

void QuerySketches::next_call() {
  if (fresh_) {
    draw(derive_key({nonce_, x_, calls_}));
  } else if (!ready_) {
    draw(0);
  }
  ++calls_;
}

CoverVotes is_covered_votes(QuerySketches& q, const TreeNode& node, const QueryBudget& budget) {
  if (static_cast<int>(node.sketches.size()) != q.J())
    throw ContractViolation("node stores a different number of sketches than the query uses");
  if (!q.ready()) throw ContractViolation("query sketches not drawn; call next_call() first");
  CoverVotes out;
  out.threshold = budget.absolute_threshold
                      ? budget.dot_fraction / budget.eta * static_cast<double>(budget.k_hat) / static_cast<double>(q.graph_n())
                      : budget.dot_fraction * std::abs(q.self_estimate());
  for (int j = 0; j < q.J(); ++j) {
    const double dot = std::abs(sketch_dot(q.vote(j), node.sketches[static_cast<std::size_t>(j)]));
    if (dot >= out.threshold && dot > 0.0) ++out.votes;
  }
  out.covered = out.votes >= budget.vote_fraction * q.J();
  return out;
}

bool is_covered(QuerySketches& q, const TreeNode& node, const QueryBudget& budget) {
  return is_covered_votes(q, node, budget).covered;
}

NeighborResult find_neighbors(const Graph& g, Vertex x, const SketchTree& tree, const SketchParams& query_params,
                              const QueryBudget& budget, const QueryMode& mode) {
  budget.check();
  if (tree.nodes.empty()) throw ContractViolation("find_neighbors on an empty tree");
  QuerySketches q(g, x, query_params, tree.votes, mode.fresh, mode.nonce);
  NeighborResult res;
  auto visit = [&](auto&& self, int u) -> void {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(u)];
    if (node.leaf()) {
      if (++res.leaves_visited > budget.max_leaves)
        res.aborted = true;
      else
        res.leaves.push_back(node.begin);
      return;
    }
    for (int child : {node.left, node.right}) {
      if (res.aborted) return;
      q.next_call();
      ++res.is_covered_calls;
      if (is_covered(q, tree.nodes[static_cast<std::size_t>(child)], budget)) self(self, child);
    }
  };
  visit(visit, 0);
  if (res.aborted) {
    res.leaves.clear();
  } else {
    for (std::size_t pos : res.leaves) res.vertices.push_back(tree.order[pos]);
  }
  return res;
}

}  // namespace subcluster
