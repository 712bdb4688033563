#include "subcluster/chebyshev.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <sstream>

#include <boost/multiprecision/mpfr.hpp>

#include "subcluster/errors.hpp"

namespace subcluster {

namespace mp = boost::multiprecision;
using Real = mp::mpfr_float;

namespace detail {

struct ExactPoly {
  unsigned bits = 0;
  int t = 1;
  Real eps;
  std::vector<Real> cheb;  // weights of T_v; index 0 already halved
  std::vector<Real> b;     // coefficients of q in the monomial basis
};

}  // namespace detail

namespace {

// Boost 1.74 keeps the mpfr default precision in a process-wide variable,
// so every extended-precision section runs under this lock.
std::mutex& precision_mutex() {
  static std::mutex m;
  return m;
}

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : lock_(precision_mutex()), saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  std::lock_guard<std::mutex> lock_;
  unsigned saved_;
};

Real cheb_series(int v, const Real& eps, int t, const Real& tol) {
  // Leading term n = v: (eps/2)^v C(v-1+t, v); later terms by ratio
  // (eps^2/4)(n+t)(n+t+1) / ((m+1)(n+1-m)) with m = (n-v)/2.
  Real half = eps / 2;
  Real term = 1;
  for (int j = 1; j <= v; ++j) term *= half * Real(t - 1 + j) / j;
  Real sum = term;
  const Real q = eps * eps / 4;
  int small = 0;
  const long cap = 1000000L + 10L * t;
  for (long n = v, m = 0;; n += 2, ++m) {
    if (m > cap) throw NumericError("Chebyshev coefficient series did not converge; eps too large for t");
    term *= q * Real(n + t) * Real(n + t + 1) / (Real(m + 1) * Real(n + 1 - m));
    sum += term;
    if (term < tol * sum) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
  }
  return 2 * sum;
}

Real clenshaw(const std::vector<Real>& w, const Real& y) {
  Real b1 = 0, b2 = 0;
  for (std::size_t k = w.size(); k-- > 1;) {
    Real b0 = w[k] + 2 * y * b1 - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return w[0] + y * b1 - b2;
}

Real horner_p(const detail::ExactPoly& e, const Real& x) {
  Real s = 0;
  for (std::size_t i = e.b.size(); i-- > 0;) s = s * x + e.b[i];
  return s * mp::pow(x, e.t);
}

Real clenshaw_p(const detail::ExactPoly& e, const Real& x) {
  Real y = (1 - x) / e.eps;
  return clenshaw(e.cheb, y) * mp::pow(x, e.t);
}

Real relative_gap(const Real& h, const Real& c) {
  Real diff = mp::abs(h - c);
  if (c == 0) return diff == 0 ? Real(0) : Real(std::numeric_limits<double>::infinity());
  return diff / mp::abs(c);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double cheb_coefficient(int v, double eps, int t, double tol) {
  if (v < 0) throw ContractViolation("cheb_coefficient needs v >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw ContractViolation("cheb_coefficient needs 0 < eps < 1");
  if (t < 1) throw ContractViolation("cheb_coefficient needs t >= 1");
  if (!(tol > 0.0)) throw ContractViolation("cheb_coefficient needs tol > 0");
  PrecisionScope scope(192);
  return cheb_series(v, Real(eps), t, Real(tol)).convert_to<double>();
}

std::vector<BigInt> monic_cheb_standard_basis(int l) {
  if (l < 0) throw ContractViolation("Chebyshev index must be nonnegative");
  std::vector<BigInt> prev{1};
  if (l == 0) return prev;
  std::vector<BigInt> cur{0, 1};
  for (int m = 1; m < l; ++m) {
    std::vector<BigInt> next(static_cast<std::size_t>(m) + 2, 0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += 2 * cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double chebyshev_truncation_error(double eps, int t, int d, std::size_t grid) {
  if (!(eps > 0.0 && eps < 1.0) || t < 1 || d < 0 || grid < 2)
    throw ContractViolation("chebyshev_truncation_error: bad arguments");
  const unsigned bits = 512 + static_cast<unsigned>(std::ceil(-t * std::log2(1.0 - eps)));
  PrecisionScope scope(bits);
  Real e(eps);
  Real tol = mp::pow(Real(2), -static_cast<int>(bits) - 16);
  std::vector<Real> w(static_cast<std::size_t>(d) + 1);
  for (int v = 0; v <= d; ++v) w[v] = cheb_series(v, e, t, tol);
  w[0] /= 2;
  Real worst = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    Real y = Real(-1) + Real(2) * Real(i) / Real(grid - 1);
    Real err = mp::abs(clenshaw(w, y) - mp::pow(1 - e * y, -t));
    if (err > worst) worst = err;
  }
  return worst.convert_to<double>();
}

int PolyParams::walk_length() const {
  if (t_min) return *t_min;
  return static_cast<int>(std::ceil(20.0 * std::log(static_cast<double>(n)) / (phi * phi)));
}

int PolyParams::truncation_degree() const {
  if (degree) return *degree;
  const double t = walk_length();
  const double dq = std::ceil(20.0 * eps * t + 2.0 * std::log(phi * phi / eps));
  return dq < 0 ? 0 : static_cast<int>(dq);
}

void PolyParams::check() const {
  if (n < 2) throw ConfigError("polynomial needs n >= 2");
  if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in (0, 1]");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (t_min && *t_min < 1) throw ConfigError("t_min must be at least 1");
  if (degree && *degree < 0) throw ConfigError("degree must be nonnegative");
}

AssumptionReport check_assumptions(const PolyParams& p, double c1, double c2) {
  AssumptionReport r;
  const double ratio = p.eps / (p.phi * p.phi);
  r.lhs1 = ratio * std::log(1.0 / p.eps);
  r.rhs1 = c1;
  r.lhs2 = std::log(1.0 / p.eps) * std::log(p.phi * p.phi / p.eps);
  r.rhs2 = c2 * std::log(static_cast<double>(p.n));
  if (r.lhs1 > r.rhs1)
    r.warnings.push_back("(eps/phi^2) ln(1/eps) = " + fmt(r.lhs1) + " exceeds c1 = " + fmt(c1));
  if (r.lhs2 > r.rhs2)
    r.warnings.push_back("ln(1/eps) ln(phi^2/eps) = " + fmt(r.lhs2) + " exceeds c2 ln n = " + fmt(r.rhs2));
  return r;
}

double WalkPolynomial::coefficient(int t) const {
  if (t < t_min || t > t_min + t_delta) return 0.0;
  return coeffs[static_cast<std::size_t>(t - t_min)];
}

double WalkPolynomial::eval(double x) const {
  if (exact_) {
    PrecisionScope scope(exact_->bits);
    return horner_p(*exact_, Real(x)).convert_to<double>();
  }
  long double s = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) s = s * x + coeffs[i];
  return static_cast<double>(s * std::pow(static_cast<long double>(x), t_min));
}

double WalkPolynomial::eval_clenshaw(double x) const {
  if (!exact_) throw ContractViolation("Clenshaw evaluation needs the Chebyshev construction data");
  if (!(x >= 0.0 && x <= 1.0)) throw ContractViolation("Clenshaw evaluation domain is [0, 1]");
  PrecisionScope scope(exact_->bits);
  return clenshaw_p(*exact_, Real(x)).convert_to<double>();
}

std::vector<double> WalkPolynomial::chebyshev() const {
  std::vector<double> out;
  if (!exact_) return out;
  PrecisionScope scope(exact_->bits);
  for (std::size_t v = 0; v < exact_->cheb.size(); ++v)
    out.push_back((v == 0 ? 2 * exact_->cheb[0] : exact_->cheb[v]).convert_to<double>());
  return out;
}

std::uint64_t WalkPolynomial::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(t_min));
  mix(coeffs.size());
  for (double c : coeffs) {
    std::uint64_t bits;
    std::memcpy(&bits, &c, 8);
    mix(bits);
  }
  return h;
}

std::size_t WalkPolynomial::precision_bits() const { return exact_ ? exact_->bits : 64; }

WalkPolynomial build_walk_polynomial(const PolyParams& params, const PolyBuildOptions& opts) {
  params.check();
  const int t = params.walk_length();
  const int d = params.truncation_degree();
  const double eps = params.eps;

  WalkPolynomial wp;
  wp.t_min = t;
  wp.t_delta = d;
  wp.params = params;
  wp.assumptions = check_assumptions(params);
  wp.warnings = wp.assumptions.warnings;

  const double log10_cap = (d + 1) * std::log10(1.0 / eps) + std::log10(d + 1.0);
  // Enough bits for the cancellations in both basis changes plus guard bits.
  const double range_bits = (d + 1) * (std::log2(1.0 / eps) + 3.0) + std::log2(d + 1.0) - t * std::log2(1.0 - eps);
  const auto bits = static_cast<unsigned>(opts.guard_bits + 64 + std::ceil(range_bits));

  auto exact = std::make_shared<detail::ExactPoly>();
  PrecisionScope scope(bits);
  exact->bits = bits;
  exact->t = t;
  exact->eps = Real(eps);
  const Real& e = exact->eps;
  const Real tol = mp::pow(Real(2), -static_cast<int>(bits) - 16);

  auto& w = exact->cheb;
  w.resize(static_cast<std::size_t>(d) + 1);
  for (int v = 0; v <= d; ++v) w[v] = cheb_series(v, e, t, tol);
  w[0] /= 2;

  // P(y) = sum_j a_j y^j with T_v expanded by the three-term recurrence.
  std::vector<Real> a(static_cast<std::size_t>(d) + 1, Real(0));
  std::vector<Real> prev{Real(1)}, cur{Real(0), Real(1)};
  a[0] += w[0];
  if (d >= 1) a[1] += w[1];
  for (int v = 2; v <= d; ++v) {
    std::vector<Real> next(static_cast<std::size_t>(v) + 1, Real(0));
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += 2 * cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= prev[j];
    for (std::size_t j = 0; j < next.size(); ++j)
      if (next[j] != 0) a[j] += w[v] * next[j];
    prev = std::move(cur);
    cur = std::move(next);
  }

  // q(x) = P((1 - x)/eps): b_i = (-1)^i sum_{j >= i} a_j eps^-j C(j, i).
  std::vector<Real> scaled(a.size());
  {
    Real inv = 1 / e, p = 1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      scaled[j] = a[j] * p;
      p *= inv;
    }
  }
  auto& b = exact->b;
  b.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Real s = 0, binom = 1;
    for (std::size_t j = i; j < a.size(); ++j) {
      if (j > i) binom = binom * Real(j) / Real(j - i);
      s += scaled[j] * binom;
    }
    b[i] = (i % 2 == 1) ? Real(-s) : s;
  }

  Real max_abs = 0;
  wp.coeffs.resize(b.size());
  bool overflow = false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    wp.coeffs[i] = b[i].convert_to<double>();
    if (!std::isfinite(wp.coeffs[i])) overflow = true;
    if (mp::abs(b[i]) > max_abs) max_abs = mp::abs(b[i]);
  }
  auto& val = wp.validation;
  val.log10_coeff_cap = log10_cap;
  val.log10_max_coeff = max_abs == 0 ? -std::numeric_limits<double>::infinity() : mp::log10(max_abs).convert_to<double>();
  if (!val.cap_ok())
    throw NumericError("coefficient magnitude 1e" + fmt(val.log10_max_coeff) + " exceeds the cap 1e" + fmt(log10_cap));
  if (overflow) wp.warnings.push_back("coefficients exceed the double range; only extended-precision evaluation is exact");
  if (val.log10_max_coeff > 3)
    wp.warnings.push_back("coefficients reach 1e" + fmt(val.log10_max_coeff) +
                          "; Monte Carlo sketches built from them are noise dominated");

  val.p_at_one = horner_p(*exact, Real(1)).convert_to<double>();
  val.bound_low = std::pow(static_cast<double>(params.n), -4.0);
  val.bound_flat = eps / (params.phi * params.phi);
  val.agreement_tol = opts.agreement_tol;

  if (opts.validate) {
    const std::size_t G = std::max<std::size_t>(opts.grid, 2);
    val.performed = true;
    val.grid_points = 2 * G;
    Real worst_gap = 0, worst_low = 0, worst_flat = 0;
    auto probe = [&](double x, bool low) {
      Real rx(x);
      Real h = horner_p(*exact, rx);
      Real c = clenshaw_p(*exact, rx);
      Real gap = relative_gap(h, c);
      if (gap > worst_gap) {
        worst_gap = gap;
        val.worst_disagreement_x = x;
      }
      if (low) {
        Real m = mp::abs(h);
        if (m >= worst_low) {
          worst_low = m;
          val.worst_low_x = x;
        }
      } else {
        Real m = mp::abs(h - 1);
        if (m >= worst_flat) {
          worst_flat = m;
          val.worst_flat_x = x;
        }
      }
    };
    const double low_end = 1.0 - params.phi * params.phi / 4.0;
    for (std::size_t i = 0; i < G; ++i) probe(low_end * static_cast<double>(i) / static_cast<double>(G - 1), true);
    for (std::size_t i = 0; i < G; ++i) {
      double x = i + 1 == G ? 1.0 : (1.0 - eps) + eps * static_cast<double>(i) / static_cast<double>(G - 1);
      probe(x, false);
    }
    val.max_rel_disagreement = worst_gap.convert_to<double>();
    val.max_abs_low = worst_low.convert_to<double>();
    val.max_dev_flat = worst_flat.convert_to<double>();

    if (!val.agreement_ok())
      throw NumericError("Horner and Clenshaw evaluations disagree by " + fmt(val.max_rel_disagreement) +
                         " (relative) at x = " + fmt(val.worst_disagreement_x));
    std::vector<std::string> violated;
    if (!val.low_ok())
      violated.push_back("max |p| on [0, 1 - phi^2/4] is " + fmt(val.max_abs_low) + " at x = " + fmt(val.worst_low_x) +
                         ", bound n^-4 = " + fmt(val.bound_low));
    if (!val.flat_ok())
      violated.push_back("max |p - 1| on [1 - eps, 1] is " + fmt(val.max_dev_flat) + " at x = " +
                         fmt(val.worst_flat_x) + ", bound eps/phi^2 = " + fmt(val.bound_flat));
    if (opts.strict && !violated.empty()) {
      std::string msg = "polynomial construction failed validation: " + violated[0];
      for (std::size_t i = 1; i < violated.size(); ++i) msg += "; " + violated[i];
      throw PolynomialValidationError(msg);
    }
    for (auto& v : violated) wp.warnings.push_back(v);
  }

  wp.exact_ = std::move(exact);
  return wp;
}

WalkPolynomial make_walk_polynomial(int t_min, std::vector<double> coeffs) {
  if (t_min < 0) throw ContractViolation("t_min must be nonnegative");
  if (coeffs.empty()) throw ContractViolation("walk polynomial needs at least one coefficient");
  WalkPolynomial wp;
  wp.t_min = t_min;
  wp.t_delta = static_cast<int>(coeffs.size()) - 1;
  wp.coeffs = std::move(coeffs);
  return wp;
}

double eval_p_clenshaw(const WalkPolynomial& wp, double x) { return wp.eval_clenshaw(x); }

}  // namespace subcluster
