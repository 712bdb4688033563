#include <doctest.h>

#include <cmath>

#include "subcluster/chebyshev.hpp"
#include "subcluster/errors.hpp"

using namespace subcluster;

namespace {

// Direct partial sum of the defining series to n = 51 in long double.
long double brute_cheb(int v, long double eps, int t) {
  long double s = 0;
  for (int n = v; n <= 51; n += 2) {
    long double b1 = 1, b2 = 1;
    for (int i = 0; i < n; ++i) b1 = b1 * (n - 1 + t - i) / (i + 1);
    const int m = (n - v) / 2;
    for (int i = 0; i < m; ++i) b2 = b2 * (n - i) / (i + 1);
    s += std::pow(eps / 2, static_cast<long double>(n)) * b1 * b2;
  }
  return 2 * s;
}

}  // namespace

TEST_CASE("Chebyshev coefficients") {
  CHECK(cheb_coefficient(1, 0.1, 3) == doctest::Approx(0.307633246177).epsilon(1e-11));
  CHECK(cheb_coefficient(1, 0.1, 3) == doctest::Approx(static_cast<double>(brute_cheb(1, 0.1L, 3))).epsilon(1e-13));
  CHECK(cheb_coefficient(4, 0.2, 7) == doctest::Approx(static_cast<double>(brute_cheb(4, 0.2L, 7))).epsilon(1e-12));
  CHECK(std::abs(cheb_coefficient(1, 1e-12, 5)) < 1e-10);
  CHECK(cheb_coefficient(0, 1e-12, 5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(cheb_coefficient(1, 1.0, 5), ContractViolation);
  CHECK_THROWS_AS(cheb_coefficient(-1, 0.1, 5), ContractViolation);
}

TEST_CASE("Chebyshev expansion reproduces (1 - eps x)^-t") {
  const double eps = 0.1;
  const int t = 3;
  std::vector<double> c;
  for (int v = 0; v <= 30; ++v) c.push_back(cheb_coefficient(v, eps, t));
  for (double x : {-1.0, -0.3, 0.0, 0.45, 1.0}) {
    const double th = std::acos(x);
    double s = c[0] / 2;
    for (int v = 1; v <= 30; ++v) s += c[v] * std::cos(v * th);
    CHECK(s == doctest::Approx(std::pow(1 - eps * x, -t)).epsilon(1e-13));
  }
}

TEST_CASE("coefficients are nonnegative with a decaying tail") {
  for (auto [eps, t] : {std::pair{0.05, 200}, std::pair{0.02, 500}}) {
    const int start = static_cast<int>(std::ceil(10 * eps * t)) + 2;
    std::vector<double> c;
    for (int v = 0; v <= start + 40; ++v) c.push_back(cheb_coefficient(v, eps, t));
    for (double x : c) CHECK(x >= 0.0);
    for (int v = start; v + 2 < static_cast<int>(c.size()); ++v) CHECK(c[v + 2] <= c[v]);
  }
}

TEST_CASE("monomial coefficients of T_l") {
  using V = std::vector<BigInt>;
  CHECK(monic_cheb_standard_basis(0) == V{1});
  CHECK(monic_cheb_standard_basis(1) == V{0, 1});
  CHECK(monic_cheb_standard_basis(2) == V{-1, 0, 2});
  CHECK(monic_cheb_standard_basis(5) == V{0, 5, 0, -20, 0, 16});
  // cos(l theta) at sample points.
  for (int l : {5, 9, 14}) {
    const auto co = monic_cheb_standard_basis(l);
    for (double th : {0.1, 0.7, 1.3, 2.2, 2.9, 3.1}) {
      const double x = std::cos(th);
      double s = 0;
      for (int j = l; j >= 0; --j) s = s * x + co[j].convert_to<double>();
      CHECK(s == doctest::Approx(std::cos(l * th)).epsilon(1e-9));
    }
  }
}

TEST_CASE("truncation error bound") {
  for (auto [eps, t] : {std::pair{0.05, 200}, std::pair{0.02, 500}}) {
    const int d = static_cast<int>(std::ceil(10 * eps * t)) + 6;
    CHECK(chebyshev_truncation_error(eps, t, d) <= 10.0 * d * std::exp(-d));
  }
}

TEST_CASE("parameter derivations") {
  PolyParams p{2000, 0.6, 0.03};
  CHECK(p.walk_length() == 423);
  CHECK(p.truncation_degree() == 259);
  p.t_min = 30;
  p.degree = 2;
  CHECK(p.walk_length() == 30);
  CHECK(p.truncation_degree() == 2);
  CHECK_THROWS_AS((PolyParams{1, 0.5, 0.01}.check()), ConfigError);
  CHECK_THROWS_AS((PolyParams{10, 0.5, 1.5}.check()), ConfigError);
  const auto a = check_assumptions(PolyParams{2000, 0.6, 0.03});
  CHECK(!a.ok());
  CHECK(!a.warnings.empty());
}

TEST_CASE("walk polynomial at n=2000, phi=0.6, eps=0.03") {
  const PolyParams p{2000, 0.6, 0.03};
  const WalkPolynomial wp = build_walk_polynomial(p);
  const auto& v = wp.validation;
  CHECK(wp.t_min == 423);
  CHECK(wp.t_delta == 259);
  CHECK(wp.coeffs.size() == 260);
  CHECK(v.flat_ok());
  CHECK(v.agreement_ok());
  CHECK(v.cap_ok());
  CHECK(std::abs(v.p_at_one - 1.0) <= p.eps / (p.phi * p.phi));
  const double cap = (p.truncation_degree() + 1) * std::log10(1 / p.eps) + std::log10(p.truncation_degree() + 1.0);
  CHECK(v.log10_coeff_cap == doctest::Approx(cap));

  // x^t q(x) with q the truncated expansion of (1 - eps y)^-t at y = (1 - x)/eps
  // equals x^t x^-t = 1 wherever the truncation has converged, which includes
  // the upper end of the low region.
  const double x = 1 - p.phi * p.phi / 4;
  CHECK(wp.eval(x) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(wp.eval(0.0) == 0.0);
  CHECK(wp.eval(1 - p.eps) == doctest::Approx(1.0).epsilon(p.eps / (p.phi * p.phi)));
  CHECK(wp.eval(1.0) == doctest::Approx(wp.eval_clenshaw(1.0)).epsilon(1e-6));
  CHECK(eval_p_clenshaw(wp, 0.0) == 0.0);
  CHECK_THROWS_AS(wp.eval_clenshaw(1.5), ContractViolation);

  PolyBuildOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(build_walk_polynomial(p, strict), PolynomialValidationError);
}

TEST_CASE("degree-zero walk polynomial") {
  PolyParams p{400, 0.6, 0.001};
  p.t_min = 20;
  p.degree = 0;
  const auto wp = build_walk_polynomial(p);
  REQUIRE(wp.coeffs.size() == 1);
  const double c0 = cheb_coefficient(0, p.eps, 20) / 2;
  CHECK(wp.coeffs[0] == doctest::Approx(c0).epsilon(1e-14));
  CHECK(wp.eval(0.9) == doctest::Approx(c0 * std::pow(0.9, 20)).epsilon(1e-12));
  CHECK(wp.eval_clenshaw(0.9) == doctest::Approx(wp.eval(0.9)).epsilon(1e-12));

  const auto plain = make_walk_polynomial(20, wp.coeffs);
  CHECK(!plain.has_exact());
  CHECK(plain.eval(0.9) == doctest::Approx(wp.eval(0.9)).epsilon(1e-12));
  CHECK(plain.digest() == wp.digest());
}

TEST_CASE("coefficients beyond double range are flagged") {
  const auto wp = build_walk_polynomial(PolyParams{5000, 0.5, 0.02});
  CHECK(wp.validation.log10_max_coeff > 308);
  bool warned = false;
  for (const auto& w : wp.warnings) warned |= w.find("double") != std::string::npos;
  CHECK(warned);
}
