#include "subcluster/generator.hpp"

#include <algorithm>
#include <cmath>

#include "subcluster/errors.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

using Adjacency = std::vector<std::vector<Vertex>>;

bool adjacent(const Adjacency& adj, Vertex a, Vertex b) {
  return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
}

void add_edge(Adjacency& adj, Vertex a, Vertex b) {
  adj[a].push_back(b);
  adj[b].push_back(a);
}

bool cluster_connected(const Adjacency& adj, Vertex first, std::size_t size) {
  if (size <= 1) return true;
  std::vector<char> seen(size, 0);
  std::vector<Vertex> stack{first};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    for (Vertex y : adj[x]) {
      if (y < first || y >= first + size || seen[y - first]) continue;
      seen[y - first] = 1;
      ++reached;
      stack.push_back(y);
    }
  }
  return reached == size;
}

// One cluster on the contiguous id block [first, first+size).
void build_cluster(Adjacency& adj, Vertex first, std::size_t size, int rounds, Stream& rng) {
  std::vector<Vertex> perm(size);
  Vertex pending = 0;
  bool has_pending = false;
  for (int r = 0; r < rounds; ++r) {
    bool clean = false;
    for (int attempt = 0; attempt < 50 && !clean; ++attempt) {
      for (std::size_t i = 0; i < size; ++i) perm[i] = first + static_cast<Vertex>(i);
      rng.shuffle(perm);
      clean = true;
      for (std::size_t i = 0; i + 1 < size; i += 2)
        if (adjacent(adj, perm[i], perm[i + 1])) {
          clean = false;
          break;
        }
    }
    for (std::size_t i = 0; i + 1 < size; i += 2)
      if (!adjacent(adj, perm[i], perm[i + 1])) add_edge(adj, perm[i], perm[i + 1]);
    if (size % 2 == 1) {
      // The unmatched vertex of this round is paired with the one left over
      // by the previous round; both have a free slot from their missed match.
      Vertex left = perm.back();
      if (has_pending && pending != left && !adjacent(adj, pending, left)) {
        add_edge(adj, pending, left);
        has_pending = false;
      } else {
        pending = left;
        has_pending = true;
      }
    }
  }
}

}  // namespace

Instance generate_clusterable(const GeneratorConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("k must be positive");
  if (cfg.n < static_cast<std::size_t>(cfg.k)) throw ConfigError("n must be at least k");
  if (cfg.d < 3) throw ConfigError("d must be at least 3");
  if (!(cfg.cross_edge_budget >= 0.0 && cfg.cross_edge_budget < 1.0))
    throw ConfigError("cross_edge_budget must lie in [0,1)");
  if (cfg.reserved_slots < 0 || cfg.reserved_slots >= cfg.d) throw ConfigError("reserved_slots must lie in [0,d)");

  const std::size_t n = cfg.n;
  const auto k = static_cast<std::size_t>(cfg.k);
  const int rounds = cfg.cross_edge_budget > 0.0 ? cfg.d - cfg.reserved_slots : cfg.d;
  Stream rng(derive_key({cfg.seed, 0x67656e}));

  Adjacency adj(n);
  std::vector<int> labels(n);
  std::vector<Vertex> starts(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = n / k + (c < n % k ? 1 : 0);
    starts[c + 1] = starts[c] + static_cast<Vertex>(size);
    const Vertex first = starts[c];
    for (std::size_t i = 0; i < size; ++i) labels[first + i] = static_cast<int>(c);
    bool ok = false;
    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
      for (std::size_t i = 0; i < size; ++i) adj[first + i].clear();
      build_cluster(adj, first, size, rounds, rng);
      ok = cluster_connected(adj, first, size);
    }
    if (!ok) throw ConfigError("could not generate a connected cluster of size " + std::to_string(size));
  }

  const auto cross = static_cast<std::size_t>(std::llround(cfg.cross_edge_budget * static_cast<double>(n) * cfg.d / 2.0));
  if (cross > 0) {
    if (k < 2) throw ConfigError("cross edges need at least two clusters");
    std::size_t free_slots = 0;
    for (std::size_t x = 0; x < n; ++x) free_slots += static_cast<std::size_t>(cfg.d) - adj[x].size();
    if (2 * cross > free_slots)
      throw ConfigError("cross_edge_budget unachievable: needs " + std::to_string(2 * cross) +
                        " free degree slots, have " + std::to_string(free_slots));
    std::size_t placed = 0;
    const std::size_t max_attempts = 1000 * cross + 10000;
    for (std::size_t attempt = 0; placed < cross && attempt < max_attempts; ++attempt) {
      const std::size_t i = rng.below(k);
      std::size_t j = rng.below(k - 1);
      if (j >= i) ++j;
      const Vertex a = starts[i] + static_cast<Vertex>(rng.below(starts[i + 1] - starts[i]));
      const Vertex b = starts[j] + static_cast<Vertex>(rng.below(starts[j + 1] - starts[j]));
      if (adj[a].size() >= static_cast<std::size_t>(cfg.d) || adj[b].size() >= static_cast<std::size_t>(cfg.d)) continue;
      if (adjacent(adj, a, b)) continue;
      add_edge(adj, a, b);
      ++placed;
    }
    if (placed < cross)
      throw ConfigError("cross_edge_budget unachievable: placed " + std::to_string(placed) + " of " +
                        std::to_string(cross) + " cross edges without exceeding d");
  }

  return {Graph(n, cfg.d, adj), Clustering(std::move(labels), cfg.k)};
}


Instance disjoint_cliques(int k, std::size_t m, int d) {
  if (k < 1 || m < 1) throw ConfigError("disjoint_cliques needs k >= 1 and m >= 1");
  if (d < 0) d = std::max<int>(1, static_cast<int>(m) - 1);
  if (static_cast<std::size_t>(d) + 1 < m) throw ConfigError("degree bound too small for the clique size");
  const std::size_t n = static_cast<std::size_t>(k) * m;
  std::vector<std::vector<Vertex>> adj(n);
  std::vector<int> labels(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t c = x / m;
    labels[x] = static_cast<int>(c);
    for (std::size_t y = c * m; y < (c + 1) * m; ++y)
      if (y != x) adj[x].push_back(static_cast<Vertex>(y));
  }
  return {Graph(n, d, adj), Clustering(std::move(labels), k)};
}

}  // namespace subcluster
