#pragma once

// p-adic side: Newton polygons of cubic characteristic polynomials, the
// conjugate-valuation check for zeta^{(p^6-1)p^nu} - 1, trace divisibility,
// and modular trace recurrences.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "littlewood/cubic_field.hpp"
#include "littlewood/numtheory.hpp"

namespace littlewood {

/// Lower hull of (i, v_p(a_i)) for X^3 + a2 X^2 + a1 X + a0.
struct NewtonPolygon {
  Int prime;
  // (exponent, valuation); zero coefficients are omitted
  std::vector<std::pair<int, long>> points;
  std::vector<std::pair<int, long>> hull;
  // root valuations, nondecreasing; zero roots come last and are flagged
  std::array<Rat, 3> slopes;
  int zero_roots = 0;

  bool is_infinite(int i) const { return i >= 3 - zero_roots; }
  Rat finite_sum() const {
    Rat s = 0;
    for (int i = 0; i < 3 - zero_roots; ++i) s += slopes[i];
    return s;
  }
  std::string slope_str(int i) const { return is_infinite(i) ? "inf" : rat_str(slopes[i]); }
};

namespace detail {

// Lower hull over points with strictly increasing x, given as
// (x, y) with rational y so capped and exact valuations share one path.
inline std::vector<std::pair<int, Rat>> lower_hull(const std::vector<std::pair<int, Rat>>& pts) {
  std::vector<std::pair<int, Rat>> h;
  for (const auto& p : pts) {
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h.back();
      // drop b when it lies on or above segment a-p
      Rat lhs = (b.second - a.second) * (p.first - a.first);
      Rat rhs = (p.second - a.second) * (b.first - a.first);
      if (lhs >= rhs)
        h.pop_back();
      else
        break;
    }
    h.push_back(p);
  }
  return h;
}

// Root valuations from the hull of points (i, y_i), i = z..3, with y_3 = 0.
inline std::array<Rat, 3> hull_slopes(const std::vector<std::pair<int, Rat>>& pts) {
  const auto h = lower_hull(pts);
  std::vector<Rat> vals;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    const int len = h[k + 1].first - h[k].first;
    const Rat v = (h[k].second - h[k + 1].second) / len;
    for (int j = 0; j < len; ++j) vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  std::array<Rat, 3> out{Rat(0), Rat(0), Rat(0)};
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i];
  return out;
}

}  // namespace detail

inline NewtonPolygon newton_polygon(const CubicPoly& cp, const Int& p) {
  if (p < 2 || factorize(p).size() != 1 || factorize(p)[0].exponent != 1)
    throw InvalidInput("not a prime: " + p.get_str());
  NewtonPolygon np;
  np.prime = p;
  const std::array<Rat, 4> a{cp.a0, cp.a1, cp.a2, Rat(1)};
  int z = 0;
  while (z < 3 && a[z] == 0) ++z;
  np.zero_roots = z;
  std::vector<std::pair<int, Rat>> pts;
  for (int i = z; i <= 3; ++i) {
    if (a[i] == 0) continue;
    const long v = p_adic_valuation(a[i], p);
    np.points.emplace_back(i, v);
    pts.emplace_back(i, Rat(v));
  }
  for (const auto& [x, y] : detail::lower_hull(pts)) np.hull.emplace_back(x, y.get_num().get_si());
  np.slopes = detail::hull_slopes(pts);
  return np;
}

inline NewtonPolygon newton_polygon(const CubicPoly& cp, long p) { return newton_polygon(cp, Int(p)); }

/// Tr(c0 t^n + c1 t^{n+1} + c2 t^{n+2}) mod m, via the companion-matrix power
/// acting on (p_n, p_{n+1}, p_{n+2}).
inline Int trace_power_mod(const CubicField& f, const IntTriple& x, const Int& n, const Int& modulus) {
  if (modulus < 1) throw InvalidInput("trace_power_mod: modulus must be >= 1");
  if (n < 0) throw InvalidInput("trace_power_mod: exponent must be >= 0");
  if (modulus == 1) return 0;
  using Mat = std::array<std::array<Int, 3>, 3>;
  auto md = [&](const Int& v) { return mod_floor(v, modulus); };
  auto mul = [&](const Mat& a, const Mat& b) {
    Mat c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] = md(a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j]);
    return c;
  };
  // (p_{k+1}, p_{k+2}, p_{k+3}) = T (p_k, p_{k+1}, p_{k+2})
  Mat t{{{Int(0), Int(1), Int(0)}, {Int(0), Int(0), Int(1)}, {md(-f.f0()), md(-f.f1()), md(-f.f2())}}};
  Mat r{{{Int(1), Int(0), Int(0)}, {Int(0), Int(1), Int(0)}, {Int(0), Int(0), Int(1)}}};
  Int e = n;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = mul(r, t);
    e >>= 1;
    if (e > 0) t = mul(t, t);
  }
  const std::array<Int, 3> p0{md(f.power_sum(0)), md(f.power_sum(1)), md(f.power_sum(2))};
  std::array<Int, 3> pn;
  for (int i = 0; i < 3; ++i) pn[i] = md(r[i][0] * p0[0] + r[i][1] * p0[1] + r[i][2] * p0[2]);
  return md(x[0] * pn[0] + x[1] * pn[1] + x[2] * pn[2]);
}

inline Int trace_power_mod(const FieldElement& x, const Int& n, const Int& modulus) {
  return trace_power_mod(*x.field(), x.int_coords(), n, modulus);
}

/// Tr(x * z^n) mod m for integer-coordinate x and z.
inline Int trace_mul_power_mod(const CubicField& f, const IntTriple& x, const IntTriple& z, const Int& n,
                               const Int& modulus) {
  if (modulus == 1) return 0;
  auto red = [&](IntTriple v) {
    for (auto& c : v) c = mod_floor(c, modulus);
    return v;
  };
  IntTriple acc{Int(1), Int(0), Int(0)};
  IntTriple base = red(z);
  Int e = n;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = red(FieldElement::mul_int(acc, base, f));
    e >>= 1;
    if (e > 0) base = red(FieldElement::sqr_int(base, f));
  }
  const IntTriple y = red(FieldElement::mul_int(red(x), acc, f));
  return mod_floor(trace_int(y, f), modulus);
}

inline constexpr unsigned long kExactExponentCutoff = 1UL << 20;

struct Lemma31Report {
  Int prime;
  unsigned long nu = 0;
  Int exponent;            // (p^6 - 1) p^nu
  bool holds = false;      // every root valuation > nu - 1
  bool vacuous = false;    // zeta^exponent == 1
  bool exact = true;       // false when computed modulo p^k
  unsigned long modulus_exponent = 0;  // k when not exact
  // root valuations (lower bounds when !exact); zero roots flagged
  std::array<Rat, 3> valuations;
  std::array<bool, 3> lower_bound_only{false, false, false};
  int zero_roots = 0;
  Rat min_valuation;
  bool sharpened = true;   // p >= 5: min valuation >= nu + 1/3
};

namespace detail {

inline void require_unit(const FieldElement& z) {
  const Rat n = norm(z);
  if (n != 1 && n != -1) throw InvalidInput("not a unit: " + z.str());
}

inline void require_prime(const Int& p) {
  if (p < 2) throw InvalidInput("not a prime: " + p.get_str());
  const auto fac = factorize(p);
  if (fac.size() != 1 || fac[0].exponent != 1) throw InvalidInput("not a prime: " + p.get_str());
}

// Root valuations from (e1, e2, e3) of X^3 - e1 X^2 + e2 X - e3, each given as a
// valuation or "at least cap" when it vanished modulo p^cap.
inline void fill_valuations(Lemma31Report& rep, const std::array<std::optional<long>, 3>& v, long cap) {
  // point for X^{3-j} has ordinate v(e_j); e3 = 0 gives zero roots
  std::array<Rat, 4> y;
  std::array<bool, 4> present{true, true, true, true};
  std::array<bool, 4> capped{false, false, false, false};
  y[3] = 0;
  for (int j = 1; j <= 3; ++j) {
    const int i = 3 - j;
    if (v[j - 1]) {
      y[i] = *v[j - 1];
    } else if (cap >= 0) {
      y[i] = cap;
      capped[i] = true;
    } else {
      present[i] = false;
    }
  }
  int z = 0;
  while (z < 3 && !present[z]) ++z;
  std::vector<std::pair<int, Rat>> pts;
  for (int i = z; i <= 3; ++i)
    if (present[i]) pts.emplace_back(i, y[i]);
  const auto slopes = hull_slopes(pts);
  rep.zero_roots = z;
  rep.valuations = {Rat(0), Rat(0), Rat(0)};
  for (int i = 0; i < 3 - z; ++i) rep.valuations[i] = slopes[i];
  // min root valuation = min_j v(e_j)/j, a lower bound when any ordinate is capped
  bool any_capped = false;
  Rat mn;
  bool first = true;
  for (int j = 1; j <= 3; ++j) {
    const int i = 3 - j;
    if (!present[i]) continue;
    any_capped = any_capped || capped[i];
    Rat r = y[i] / j;
    if (first || r < mn) mn = r;
    first = false;
  }
  rep.min_valuation = first ? Rat(0) : mn;
  if (any_capped)
    for (int i = 0; i < 3; ++i) rep.lower_bound_only[i] = true;
}

}  // namespace detail

/// Decides whether every root valuation of the char poly of
/// zeta^{(p^6-1)p^nu} - 1 exceeds nu - 1. Exponents up to exact_cutoff are
/// computed exactly; larger ones modulo p^{3 nu + 3}.
inline Lemma31Report check_lemma31(const FieldElement& zeta, const Int& p, unsigned long nu,
                                   unsigned long exact_cutoff = kExactExponentCutoff) {
  if (nu < 1) throw InvalidInput("nu must be >= 1");
  detail::require_prime(p);
  detail::require_unit(zeta);
  const CubicField& f = *zeta.field();
  Lemma31Report rep;
  rep.prime = p;
  rep.nu = nu;
  Int p6;
  mpz_pow_ui(p6.get_mpz_t(), p.get_mpz_t(), 6);
  Int pnu;
  mpz_pow_ui(pnu.get_mpz_t(), p.get_mpz_t(), nu);
  rep.exponent = (p6 - 1) * pnu;
  const Rat threshold = Rat(static_cast<long>(nu) - 1);

  const bool use_exact = rep.exponent <= Int(exact_cutoff) || !zeta.has_integer_coords();
  if (use_exact) {
    FieldElement eta = elem_pow(zeta, rep.exponent) - FieldElement::rational(zeta.field(), 1);
    if (eta.is_zero()) {
      rep.vacuous = true;
      rep.holds = true;
      rep.zero_roots = 3;
      return rep;
    }
    const auto [e1, e2, e3] = eta.char_coeffs();
    std::array<std::optional<long>, 3> v;
    const std::array<Rat, 3> es{e1, e2, e3};
    for (int j = 0; j < 3; ++j)
      if (es[j] != 0) v[j] = p_adic_valuation(es[j], p);
    detail::fill_valuations(rep, v, -1);
    rep.exact = true;
  } else {
    const unsigned long k = 3 * nu + 3;
    Int m;
    mpz_pow_ui(m.get_mpz_t(), p.get_mpz_t(), k);
    auto red = [&](IntTriple x) {
      for (auto& c : x) c = mod_floor(c, m);
      return x;
    };
    IntTriple acc{Int(1), Int(0), Int(0)};
    IntTriple base = red(zeta.int_coords());
    Int e = rep.exponent;
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) acc = red(FieldElement::mul_int(acc, base, f));
      e >>= 1;
      if (e > 0) base = red(FieldElement::sqr_int(base, f));
    }
    acc[0] = mod_floor(acc[0] - 1, m);
    const Int fm2 = mod_floor(f.f2(), m), fm1 = mod_floor(f.f1(), m), fm0 = mod_floor(f.f0(), m);
    auto es = char_coefficients(multiplication_matrix<Int>(acc, fm2, fm1, fm0));
    std::array<std::optional<long>, 3> v;
    for (int j = 0; j < 3; ++j) {
      es[j] = mod_floor(es[j], m);
      if (es[j] != 0) v[j] = static_cast<long>(p_adic_valuation(es[j], p));
    }
    detail::fill_valuations(rep, v, static_cast<long>(k));
    rep.exact = false;
    rep.modulus_exponent = k;
  }
  rep.holds = rep.min_valuation > threshold;
  if (p >= 5) rep.sharpened = rep.min_valuation >= Rat(static_cast<long>(nu)) + Rat(1, 3);
  return rep;
}

inline Lemma31Report check_lemma31(const FieldElement& zeta, long p, unsigned long nu,
                                   unsigned long exact_cutoff = kExactExponentCutoff) {
  return check_lemma31(zeta, Int(p), nu, exact_cutoff);
}

struct Lemma32Report {
  bool holds = false;
  Int trace;  // exact Tr(theta zeta^psi(D))
  Int residue;
  Int exponent;
};

/// Raised when the trace-zero element is not admissible (nonzero trace or not integral).
class HypothesisViolation : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline Lemma32Report check_lemma32(const FieldElement& theta, const FieldElement& zeta, const Int& D) {
  if (D < 1) throw InvalidInput("D must be >= 1");
  if (trace(theta) != 0) throw HypothesisViolation("trace of " + theta.str() + " is " + rat_str(trace(theta)));
  if (!is_algebraic_integer(theta)) throw HypothesisViolation(theta.str() + " is not an algebraic integer");
  detail::require_unit(zeta);
  Lemma32Report rep;
  rep.exponent = psi(D);
  const Rat t = trace(theta * elem_pow(zeta, rep.exponent));
  if (t.get_den() != 1) throw CertificationFailure("trace is not an integer: " + rat_str(t));
  rep.trace = t.get_num();
  rep.residue = mod_floor(rep.trace, D);
  rep.holds = rep.residue == 0;
  return rep;
}

}  // namespace littlewood
