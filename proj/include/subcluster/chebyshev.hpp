#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace subcluster {

using BigInt = boost::multiprecision::cpp_int;

// c_{v,eps,t} = 2 sum_{n >= v, n = v mod 2} eps^n 2^-n C(n-1+t, n) C(n, (n-v)/2),
// the Chebyshev coefficients of (1 - eps x)^-t, so that
// (1 - eps x)^-t = c_0 / 2 + sum_{v >= 1} c_v T_v(x) on [-1, 1].
// The series stops once three consecutive terms fall below tol * partial sum.
double cheb_coefficient(int v, double eps, int t, double tol = 1e-30);

// Coefficients of T_l in the monomial basis {1, x, ..., x^l}.
std::vector<BigInt> monic_cheb_standard_basis(int l);

// sup over a uniform grid on [-1, 1] of |c_0/2 + sum_{1 <= v <= d} c_v T_v(y) - (1 - eps y)^-t|.
double chebyshev_truncation_error(double eps, int t, int d, std::size_t grid = 10000);

struct PolyParams {
  std::size_t n = 2;
  double phi = 0.5;
  double eps = 0.01;
  // Explicit overrides of the walk length floor and the degree of q.
  std::optional<int> t_min;
  std::optional<int> degree;

  int walk_length() const;        // t = ceil(20 ln n / phi^2) unless overridden
  int truncation_degree() const;  // ceil(20 eps t + 2 ln(phi^2 / eps)) unless overridden, at least 0
  void check() const;             // throws ConfigError
};

struct AssumptionReport {
  double lhs1 = 0, rhs1 = 0;  // (eps/phi^2) ln(1/eps) <= c1
  double lhs2 = 0, rhs2 = 0;  // ln(1/eps) ln(phi^2/eps) <= c2 ln n
  bool ok() const { return lhs1 <= rhs1 && lhs2 <= rhs2; }
  std::vector<std::string> warnings;
};

AssumptionReport check_assumptions(const PolyParams& p, double c1 = 0.25, double c2 = 1.0);

struct PolyValidation {
  std::size_t grid_points = 0;
  double max_abs_low = 0, worst_low_x = 0, bound_low = 0;     // |p| on [0, 1 - phi^2/4] vs n^-4
  double max_dev_flat = 0, worst_flat_x = 0, bound_flat = 0;  // |p - 1| on [1 - eps, 1] vs eps/phi^2
  double max_rel_disagreement = 0, worst_disagreement_x = 0;  // Horner vs Clenshaw
  double agreement_tol = 1e-6;
  double p_at_one = 0;
  double log10_max_coeff = 0, log10_coeff_cap = 0;
  bool performed = false;

  bool low_ok() const { return max_abs_low <= bound_low; }
  bool flat_ok() const { return max_dev_flat <= bound_flat; }
  bool agreement_ok() const { return max_rel_disagreement <= agreement_tol; }
  bool cap_ok() const { return log10_max_coeff <= log10_coeff_cap; }
  bool bounds_ok() const { return low_ok() && flat_ok(); }
};

struct PolyBuildOptions {
  bool validate = true;
  // Throw PolynomialValidationError on a violated approximation bound
  // instead of recording a warning.
  bool strict = false;
  std::size_t grid = 2000;
  double agreement_tol = 1e-6;
  int guard_bits = 256;
};

namespace detail {
struct ExactPoly;
}

// p(x) = sum_i coeffs[i] x^(t_min + i).
class WalkPolynomial {
 public:
  int t_min = 1;
  int t_delta = 0;
  std::vector<double> coeffs;
  PolyParams params;
  PolyValidation validation;
  AssumptionReport assumptions;
  std::vector<std::string> warnings;

  double coefficient(int t) const;
  // Extended-precision Horner when the construction data is present,
  // long double Horner on the stored coefficients otherwise.
  double eval(double x) const;
  // x^t P((1 - x)/eps) by Clenshaw on the Chebyshev coefficients.
  double eval_clenshaw(double x) const;
  std::vector<double> chebyshev() const;
  bool has_exact() const { return exact_ != nullptr; }
  std::uint64_t digest() const;
  std::size_t precision_bits() const;

 private:
  std::shared_ptr<const detail::ExactPoly> exact_;
  friend WalkPolynomial build_walk_polynomial(const PolyParams&, const PolyBuildOptions&);
};

WalkPolynomial build_walk_polynomial(const PolyParams& params, const PolyBuildOptions& opts = {});
// Rebuild from stored coefficients (no Chebyshev data).
WalkPolynomial make_walk_polynomial(int t_min, std::vector<double> coeffs);

double eval_p_clenshaw(const WalkPolynomial& wp, double x);

}  // namespace subcluster
