#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subcluster/chebyshev.hpp"
#include "subcluster/graph.hpp"

namespace subcluster {

// I - A/d with padding self-loops on the diagonal of A.
Eigen::MatrixXd normalized_laplacian(const Graph& g);
// 1/2 I + A/(2d), padded the same way.
Eigen::MatrixXd lazy_walk_matrix(const Graph& g);
// M^t v by repeated sparse products.
Eigen::VectorXd walk_power(const Graph& g, const Eigen::VectorXd& v, int t);
// sum_t c_t M^t v.
Eigen::VectorXd apply_walk_polynomial(const Graph& g, const WalkPolynomial& wp, const Eigen::VectorXd& v);

struct SpectralReference {
  std::size_t n = 0;
  int k = 0;
  Eigen::VectorXd eigenvalues;  // ascending, of the normalized Laplacian
  Eigen::MatrixXd vectors;      // matching orthonormal eigenvectors (columns)
  Eigen::MatrixXd U;            // first k columns; row x is f_x
  Eigen::MatrixXd means;        // row i is mu_i

  Eigen::VectorXd walk_eigenvalues() const { return (1.0 - eigenvalues.array() / 2.0).matrix(); }
  double dot(Vertex x, Vertex y) const { return U.row(x).dot(U.row(y)); }
  double norm2(Vertex x) const { return U.row(x).squaredNorm(); }
  double orthonormality_error() const;
};

constexpr std::size_t kDenseCap = 5000;

SpectralReference build_reference(const Graph& g, const Clustering& labels, std::size_t dense_cap = kDenseCap);

// Measured clusterability: eps = max outer conductance, phi = min over
// clusters of the Cheeger lower bound lambda_2(cluster) / 2.
struct MeasuredParams {
  double eps = 0;
  double phi = 0;
  std::vector<double> outer;
  std::vector<double> cluster_lambda2;
  double eta = 1;
};

MeasuredParams measure_parameters(const Graph& g, const Clustering& labels);

struct CheckRow {
  std::string name;
  double value = 0;
  double bound = 0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  bool all_pass() const;
  // Largest value - bound over all rows (negative when everything passes).
  double worst_slack() const;
};

// Absolute tolerance applied to every bound comparison.
constexpr double kCheckTolerance = 1e-9;

CheckReport eigengap_check(const SpectralReference& ref, const MeasuredParams& m);
CheckReport cluster_mean_checks(const SpectralReference& ref, const Clustering& labels, const MeasuredParams& m,
                                int alphas = 64, std::uint64_t seed = 1);

struct BDeltaReport {
  double delta = 0;
  std::vector<char> member;
  std::size_t size = 0;
  double bound = 0;  // 8 eta n eps / (phi^2 delta)
  bool within_bound() const { return static_cast<double>(size) <= bound + kCheckTolerance; }
};

BDeltaReport b_delta(const SpectralReference& ref, const Clustering& labels, double delta, const MeasuredParams& m);

struct ProjectorDistance {
  Eigen::MatrixXd pM;
  double spectral = 0;  // max_i |p(sigma_i) - [i < k]|
  double power = 0;     // power-iteration estimate of the same norm
  int iterations = 0;
};

// Distance between p(M) and U U^T; keep_matrix retains p(M).
ProjectorDistance dense_p_of_M(const SpectralReference& ref, const WalkPolynomial& wp, bool keep_matrix = false,
                               double tol = 1e-8);
ProjectorDistance dense_p_of_M(const SpectralReference& ref, const std::vector<double>& values, bool keep_matrix = false,
                               double tol = 1e-8);

struct CollisionTestParams {
  double beta_raw = 0, gamma_raw = 0;  // minimal values satisfying the two conditions
  double beta = 1, gamma = 1;          // floored at 1
  double xi = 0, rho = 0;
  std::size_t Q = 0, R = 0;
  double variance_bound = 0;  // rho xi^2 k^2 / n^2
  double mean = 0;            // <M^t1 1_x, sum_y sigma_y M^t2 1_y> for the given signs
};

CollisionTestParams measure_collision_conditions(const Graph& g, int k, Vertex x, std::span<const Vertex> S, int t1,
                                                 int t2, double xi, double rho,
                                                 std::span<const std::int8_t> signs = {});

// max_x |M^t 1_x| / sqrt(k/n), from the eigendecomposition.
double walk_norm_constant(const SpectralReference& ref, int t);

struct DotSeparation {
  double min_same = 0;
  double max_cross = 0;
  bool separated() const { return min_same > max_cross; }
};

DotSeparation dot_separation(const SpectralReference& ref, const Clustering& labels, const std::vector<char>& excluded);

}  // namespace subcluster
