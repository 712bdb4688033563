#include "subcluster/exact_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "subcluster/errors.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

// Padded adjacency A with self-loops filling every row up to d.
Eigen::MatrixXd padded_adjacency(const Graph& g) {
  const std::size_t n = g.n();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Vertex x = 0; x < n; ++x)
    for (int i = 0; i < g.d(); ++i) A(x, g.neighbor_unchecked(x, i)) += 1.0;
  return A;
}

Eigen::VectorXd step(const Graph& g, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = 0.5 * v;
  const double w = 0.5 / g.d();
  for (Vertex x = 0; x < g.n(); ++x) {
    double s = 0;
    for (int i = 0; i < g.d(); ++i) s += v[g.neighbor_unchecked(x, i)];
    out[x] += w * s;
  }
  return out;
}

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw ConfigError("dense reference refused: n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap) +
                      "; use the sparse pipeline instead");
}

CheckRow row(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value <= bound + kCheckTolerance};
}

}  // namespace

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
  return Eigen::MatrixXd::Identity(g.n(), g.n()) - padded_adjacency(g) / g.d();
}

Eigen::MatrixXd lazy_walk_matrix(const Graph& g) {
  return 0.5 * Eigen::MatrixXd::Identity(g.n(), g.n()) + padded_adjacency(g) / (2.0 * g.d());
}

Eigen::VectorXd walk_power(const Graph& g, const Eigen::VectorXd& v, int t) {
  Eigen::VectorXd cur = v;
  for (int i = 0; i < t; ++i) cur = step(g, cur);
  return cur;
}

Eigen::VectorXd apply_walk_polynomial(const Graph& g, const WalkPolynomial& wp, const Eigen::VectorXd& v) {
  Eigen::VectorXd cur = walk_power(g, v, wp.t_min);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());
  for (std::size_t i = 0; i < wp.coeffs.size(); ++i) {
    if (i) cur = step(g, cur);
    if (wp.coeffs[i] != 0.0) acc += wp.coeffs[i] * cur;
  }
  return acc;
}

double SpectralReference::orthonormality_error() const {
  const Eigen::MatrixXd G = U.transpose() * U - Eigen::MatrixXd::Identity(k, k);
  return G.cwiseAbs().maxCoeff();
}

SpectralReference build_reference(const Graph& g, const Clustering& labels, std::size_t dense_cap) {
  check_cap(g.n(), dense_cap);
  if (labels.labels.size() != g.n()) throw ContractViolation("labels do not match the graph");
  if (labels.k < 1 || static_cast<std::size_t>(labels.k) > g.n()) throw ContractViolation("k out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normalized_laplacian(g));
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");

  SpectralReference r;
  r.n = g.n();
  r.k = labels.k;
  // Eigen returns ascending order; a stable sort keeps index order on ties.
  std::vector<Eigen::Index> idx(r.n);
  for (std::size_t i = 0; i < r.n; ++i) idx[i] = static_cast<Eigen::Index>(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return es.eigenvalues()[a] < es.eigenvalues()[b]; });
  r.eigenvalues.resize(r.n);
  r.vectors.resize(r.n, r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    r.eigenvalues[i] = es.eigenvalues()[idx[i]];
    r.vectors.col(i) = es.eigenvectors().col(idx[i]);
  }
  r.U = r.vectors.leftCols(r.k);
  r.means = Eigen::MatrixXd::Zero(r.k, r.k);
  const auto sizes = labels.sizes();
  for (Vertex x = 0; x < r.n; ++x) r.means.row(labels.labels[x]) += r.U.row(x);
  for (int i = 0; i < r.k; ++i)
    if (sizes[i]) r.means.row(i) /= static_cast<double>(sizes[i]);
  return r;
}

MeasuredParams measure_parameters(const Graph& g, const Clustering& labels) {
  MeasuredParams m;
  m.eta = labels.eta();
  const auto members = labels.members();
  m.phi = std::numeric_limits<double>::infinity();
  for (int c = 0; c < labels.k; ++c) {
    const auto& S = members[c];
    m.outer.push_back(S.empty() ? 0.0 : outer_conductance(g, S));
    m.eps = std::max(m.eps, m.outer.back());
    if (S.size() < 2) {
      m.cluster_lambda2.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    // Induced subgraph, every vertex still normalized by d (lost edges become loops).
    std::vector<int> local(g.n(), -1);
    for (std::size_t i = 0; i < S.size(); ++i) local[S[i]] = static_cast<int>(i);
    const auto s = static_cast<Eigen::Index>(S.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(s, s);
    for (std::size_t i = 0; i < S.size(); ++i) {
      for (int j = 0; j < g.d(); ++j) {
        const Vertex y = g.neighbor_unchecked(S[i], j);
        const int ly = local[y] >= 0 ? local[y] : static_cast<int>(i);
        L(i, ly) -= 1.0 / g.d();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    const double l2 = std::max(0.0, es.eigenvalues()[1]);
    m.cluster_lambda2.push_back(l2);
    m.phi = std::min(m.phi, l2 / 2.0);
  }
  if (!std::isfinite(m.phi)) m.phi = 1.0;  // every cluster is a singleton
  return m;
}

bool CheckReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

double CheckReport::worst_slack() const {
  double w = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) w = std::max(w, r.value - r.bound);
  return w;
}

CheckReport eigengap_check(const SpectralReference& ref, const MeasuredParams& m) {
  CheckReport rep;
  rep.rows.push_back(row("lambda_k <= 2 eps", ref.eigenvalues[ref.k - 1], 2.0 * m.eps));
  if (ref.n > static_cast<std::size_t>(ref.k)) {
    // Reported as -lambda_{k+1} <= -phi^2/2 so every row reads value <= bound.
    rep.rows.push_back(row("lambda_k+1 >= phi^2/2", -ref.eigenvalues[ref.k], -m.phi * m.phi / 2.0));
  }
  rep.rows.push_back(row("orthonormality", ref.orthonormality_error(), 1e-9));
  auto w = ref.walk_eigenvalues();
  rep.rows.push_back(row("walk eigenvalues >= 0", -w.minCoeff(), 0.0));
  rep.rows.push_back(row("walk eigenvalues <= 1", w.maxCoeff() - 1.0, 0.0));
  return rep;
}

CheckReport cluster_mean_checks(const SpectralReference& ref, const Clustering& labels, const MeasuredParams& m,
                                int alphas, std::uint64_t seed) {
  CheckReport rep;
  const auto sizes = labels.sizes();
  const double rt = m.phi > 0 ? std::sqrt(m.eps) / m.phi : std::numeric_limits<double>::infinity();
  double worst_a = 0, bound_a = 0, worst_b = 0, bound_b = 0;
  double slack_a = -std::numeric_limits<double>::infinity(), slack_b = slack_a;
  for (int i = 0; i < ref.k; ++i) {
    const double ci = static_cast<double>(sizes[i]);
    const double va = std::abs(ref.means.row(i).squaredNorm() - 1.0 / ci);
    const double ba = 4.0 * rt / ci;
    if (va - ba > slack_a) slack_a = va - ba, worst_a = va, bound_a = ba;
    for (int j = i + 1; j < ref.k; ++j) {
      const double vb = std::abs(ref.means.row(i).dot(ref.means.row(j)));
      const double bb = 8.0 * rt / std::sqrt(ci * static_cast<double>(sizes[j]));
      if (vb - bb > slack_b) slack_b = vb - bb, worst_b = vb, bound_b = bb;
    }
  }
  rep.rows.push_back(row("mean norms", worst_a, bound_a));
  if (ref.k > 1) rep.rows.push_back(row("mean cross products", worst_b, bound_b));

  Eigen::MatrixXd G = -Eigen::MatrixXd::Identity(ref.k, ref.k);
  for (int i = 0; i < ref.k; ++i)
    G += static_cast<double>(sizes[i]) * ref.means.row(i).transpose() * ref.means.row(i);
  Eigen::MatrixXd D = ref.U - ref.means(Eigen::VectorXi::Map(labels.labels.data(), ref.n), Eigen::all);

  Stream rng(derive_key({seed, 0x616c706861ULL}));
  std::normal_distribution<double> N(0.0, 1.0);
  double worst_c = 0, worst_v = 0;
  for (int a = 0; a < alphas; ++a) {
    Eigen::VectorXd al(ref.k);
    for (int i = 0; i < ref.k; ++i) al[i] = N(rng);
    al.normalize();
    worst_c = std::max(worst_c, std::abs(al.dot(G * al)));
    worst_v = std::max(worst_v, (D * al).squaredNorm());
  }
  rep.rows.push_back(row("quadratic form of means", worst_c, 4.0 * rt));
  rep.rows.push_back(row("variance around means", worst_v, 4.0 * rt * rt));
  return rep;
}

BDeltaReport b_delta(const SpectralReference& ref, const Clustering& labels, double delta, const MeasuredParams& m) {
  if (!(delta > 0)) throw ContractViolation("delta must be positive");
  BDeltaReport r;
  r.delta = delta;
  r.member.assign(ref.n, 0);
  const auto sizes = labels.sizes();
  for (Vertex x = 0; x < ref.n; ++x) {
    const int c = labels.labels[x];
    const double dev = (ref.U.row(x) - ref.means.row(c)).squaredNorm();
    if (dev > delta / static_cast<double>(sizes[c])) {
      r.member[x] = 1;
      ++r.size;
    }
  }
  r.bound = m.phi > 0 ? 8.0 * m.eta * static_cast<double>(ref.n) * m.eps / (m.phi * m.phi * delta)
                      : std::numeric_limits<double>::infinity();
  return r;
}

ProjectorDistance dense_p_of_M(const SpectralReference& ref, const WalkPolynomial& wp, bool keep_matrix, double tol) {
  const auto w = ref.walk_eigenvalues();
  std::vector<double> vals(ref.n);
  for (std::size_t i = 0; i < ref.n; ++i) vals[i] = wp.eval(std::clamp(w[i], 0.0, 1.0));
  return dense_p_of_M(ref, vals, keep_matrix, tol);
}

ProjectorDistance dense_p_of_M(const SpectralReference& ref, const std::vector<double>& values, bool keep_matrix,
                               double tol) {
  if (values.size() != ref.n) throw ContractViolation("one value per eigenvalue required");
  ProjectorDistance out;
  Eigen::VectorXd diff(ref.n);
  for (std::size_t i = 0; i < ref.n; ++i) {
    diff[i] = values[i] - (i < static_cast<std::size_t>(ref.k) ? 1.0 : 0.0);
    out.spectral = std::max(out.spectral, std::abs(diff[i]));
  }
  const Eigen::MatrixXd D = ref.vectors * diff.asDiagonal() * ref.vectors.transpose();
  if (keep_matrix) {
    Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(values.data(), ref.n);
    out.pM = ref.vectors * pv.asDiagonal() * ref.vectors.transpose();
  }

  // Power iteration on D^T D = D^2; deterministic start with all components present.
  Eigen::VectorXd v(ref.n);
  for (std::size_t i = 0; i < ref.n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i % 17);
  v.normalize();
  double est = 0;
  for (out.iterations = 1; out.iterations <= 20000; ++out.iterations) {
    Eigen::VectorXd u = D * (D * v);
    const double nu = u.norm();
    if (nu == 0.0) {
      est = 0;
      break;
    }
    const double next = std::sqrt(nu);
    v = u / nu;
    if (std::abs(next - est) <= tol * std::max(next, 1e-300)) {
      est = next;
      break;
    }
    est = next;
  }
  out.power = est;
  return out;
}

CollisionTestParams measure_collision_conditions(const Graph& g, int k, Vertex x, std::span<const Vertex> S, int t1,
                                                 int t2, double xi, double rho, std::span<const std::int8_t> signs) {
  check_cap(g.n(), kDenseCap);
  if (S.empty()) throw ContractViolation("S must be nonempty");
  if (!signs.empty() && signs.size() != S.size()) throw ContractViolation("one sign per element of S");
  if (!(xi > 0) || !(rho > 0)) throw ContractViolation("xi and rho must be positive");
  const std::size_t n = g.n();
  const double s = static_cast<double>(S.size());
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);

  Eigen::VectorXd ex = Eigen::VectorXd::Zero(n);
  ex[x] = 1.0;
  const Eigen::VectorXd px = walk_power(g, ex, t1);
  Eigen::VectorXd pS = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd signed_sum = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < S.size(); ++i) {
    Eigen::VectorXd ey = Eigen::VectorXd::Zero(n);
    ey[S[i]] = 1.0;
    const Eigen::VectorXd py = walk_power(g, ey, t2);
    pS += py;
    signed_sum += (signs.empty() ? 1.0 : static_cast<double>(signs[i])) * py;
  }
  pS /= s;

  CollisionTestParams c;
  c.xi = xi;
  c.rho = rho;
  c.beta_raw = px.dot(pS) * nn * s / kk;
  const double g1 = px.dot(pS.cwiseProduct(pS)) * nn * nn * s * s / (kk * kk);
  const double g2 = px.cwiseProduct(px).dot(pS) * nn * nn * s / (kk * kk);
  c.gamma_raw = std::max(g1, g2);
  c.beta = std::max(1.0, c.beta_raw);
  c.gamma = std::max(1.0, c.gamma_raw);
  const double m1 = 7.0 * c.beta / (rho * xi * xi) * nn / kk;
  const double m2 = 7.0 * (c.gamma + c.beta * c.beta) / (rho * xi * xi);
  const double q = std::ceil(std::max(std::sqrt(m1), m2) - 1e-9);
  c.Q = c.R = static_cast<std::size_t>(q);
  c.variance_bound = rho * xi * xi * kk * kk / (nn * nn);
  c.mean = px.dot(signed_sum);
  return c;
}

double walk_norm_constant(const SpectralReference& ref, int t) {
  const auto w = ref.walk_eigenvalues();
  Eigen::VectorXd pw = w.array().abs().pow(2.0 * t).matrix();
  const Eigen::VectorXd sq = ref.vectors.array().square().matrix() * pw;
  return std::sqrt(sq.maxCoeff()) / std::sqrt(static_cast<double>(ref.k) / static_cast<double>(ref.n));
}

DotSeparation dot_separation(const SpectralReference& ref, const Clustering& labels, const std::vector<char>& excluded) {
  DotSeparation d;
  d.min_same = std::numeric_limits<double>::infinity();
  d.max_cross = -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd Gram = ref.U * ref.U.transpose();
  for (std::size_t x = 0; x < ref.n; ++x) {
    if (!excluded.empty() && excluded[x]) continue;
    for (std::size_t y = x + 1; y < ref.n; ++y) {
      if (!excluded.empty() && excluded[y]) continue;
      const double v = Gram(x, y);
      if (labels.labels[x] == labels.labels[y]) d.min_same = std::min(d.min_same, v);
      else d.max_cross = std::max(d.max_cross, v);
    }
  }
  return d;
}

}  // namespace subcluster
