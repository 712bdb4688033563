#include "subcluster/misclassification.hpp"

#include <algorithm>
#include <limits>

#include "subcluster/errors.hpp"

namespace subcluster {

// Shortest augmenting path with potentials, O(N^3).
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t N = cost.size();
  for (const auto& r : cost)
    if (r.size() != N) throw ContractViolation("cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(N + 1, 0), v(N + 1, 0);
  std::vector<std::size_t> p(N + 1, 0), way(N + 1, 0);
  for (std::size_t i = 1; i <= N; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(N + 1, inf);
    std::vector<char> used(N + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= N; ++j) {
        if (used[j]) u[p[j]] += delta, v[j] -= delta;
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(N, -1);
  for (std::size_t j = 1; j <= N; ++j)
    if (p[j]) col[p[j] - 1] = static_cast<int>(j - 1);
  return col;
}

Misclassification misclassification(const Clustering& truth, const std::vector<int>& predicted) {
  const std::size_t n = truth.labels.size();
  if (predicted.size() != n) throw ContractViolation("prediction length does not match the clustering");
  int kh = 0;
  for (int p : predicted) kh = std::max(kh, p + 1);
  const std::size_t k = static_cast<std::size_t>(truth.k), N = std::max<std::size_t>(k, kh);

  std::vector<std::vector<double>> overlap(k, std::vector<double>(kh, 0));
  std::vector<double> psize(kh, 0);
  Misclassification m;
  for (std::size_t x = 0; x < n; ++x) {
    if (predicted[x] < 0) {
      ++m.unclassified;
      continue;
    }
    overlap[truth.labels[x]][predicted[x]] += 1;
    psize[predicted[x]] += 1;
  }
  const auto tsize = truth.sizes();
  // Padding rows cost 0 (predicted clusters left unmatched are already counted
  // through the true clusters); padding columns cost |C_i|.
  std::vector<std::vector<double>> cost(N, std::vector<double>(N, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < N; ++j)
      cost[i][j] = j < static_cast<std::size_t>(kh) ? tsize[i] + psize[j] - 2 * overlap[i][j]
                                                    : static_cast<double>(tsize[i]);
  const auto col = hungarian(cost);
  double total = 0;
  m.assignment.assign(k, -1);
  for (std::size_t i = 0; i < k; ++i) {
    total += cost[i][col[i]];
    if (col[i] < kh) m.assignment[i] = col[i];
  }
  m.errors = static_cast<std::size_t>(total + 0.5);
  m.rate = n ? static_cast<double>(m.errors) / static_cast<double>(n) : 0.0;
  return m;
}

}  // namespace subcluster
