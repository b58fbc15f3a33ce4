#pragma once

// Exact arithmetic in a cubic field E = Q(t), t a root of a monic integer
// cubic, in the power basis (1, t, t^2). Traces and norms are exact; real and
// complex embeddings are certified enclosures refined on demand.

#include <gmpxx.h>

#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "littlewood/errors.hpp"
#include "littlewood/interval.hpp"
#include "littlewood/numtheory.hpp"

namespace littlewood {

/// x^3 + a2 x^2 + a1 x + a0 over Q.
struct CubicPoly {
  Rat a2, a1, a0;

  bool operator==(const CubicPoly&) const = default;

  Rat eval(const Rat& x) const { return ((x + a2) * x + a1) * x + a0; }

  /// b^2c^2 - 4c^3 - 4b^3d - 27d^2 + 18bcd for x^3 + b x^2 + c x + d.
  Rat discriminant() const {
    const Rat &b = a2, &c = a1, &d = a0;
    return b * b * c * c - 4 * c * c * c - 4 * b * b * b * d - 27 * d * d + 18 * b * c * d;
  }

  bool has_integer_coefficients() const {
    return a2.get_den() == 1 && a1.get_den() == 1 && a0.get_den() == 1;
  }

  /// Rational roots of a monic integer cubic (rational-root test).
  std::vector<Int> integer_roots() const {
    std::vector<Int> roots;
    if (a0 == 0) roots.push_back(0);
    const Int c = abs(a0.get_num());
    if (c != 0) {
      for (const Int& d : divisors(c)) {
        for (const Int& cand : {d, Int(-d)})
          if (eval(Rat(cand)) == 0) roots.push_back(cand);
      }
    }
    return roots;
  }

  std::string str(const std::string& var = "x") const {
    std::string s = var + "^3";
    auto term = [&](const Rat& c, const std::string& mono) {
      if (c == 0) return;
      Rat a = abs(c);
      s += c < 0 ? " - " : " + ";
      if (mono.empty())
        s += rat_str(a);
      else if (a == 1)
        s += mono;
      else
        s += rat_str(a) + "*" + mono;
    };
    term(a2, var + "^2");
    term(a1, var);
    term(a0, "");
    return s;
  }
};

namespace detail {

// Sum-of-terms parser shared by polynomial and element specs. Returns
// exponent -> coefficient; `vars` lists accepted variable spellings.
inline std::map<unsigned long, Rat> parse_terms(const std::string& text, const std::vector<std::string>& vars) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw InvalidInput("empty expression");
  std::map<unsigned long, Rat> out;
  std::size_t i = 0;
  auto read_number = [&]() {
    std::size_t start = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
    if (i < s.size() && s[i] == '/' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    }
    return s.substr(start, i - start);
  };
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!out.empty()) {
      throw InvalidInput("expected '+' or '-' in '" + text + "'");
    }
    Rat coef = 1;
    bool have_coef = false;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      coef = parse_rational(read_number());
      have_coef = true;
      if (i < s.size() && s[i] == '*') ++i;
    }
    unsigned long exponent = 0;
    bool have_var = false;
    for (const auto& v : vars) {
      if (s.compare(i, v.size(), v) == 0) {
        i += v.size();
        have_var = true;
        exponent = 1;
        if (i < s.size() && s[i] == '^') {
          ++i;
          std::size_t start = i;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
          if (start == i) throw InvalidInput("missing exponent in '" + text + "'");
          exponent = std::stoul(s.substr(start, i - start));
        }
        break;
      }
    }
    if (!have_coef && !have_var) throw InvalidInput("cannot parse term in '" + text + "'");
    out[exponent] += sign * coef;
  }
  return out;
}

}  // namespace detail

/// Parses "x^3 + A*x^2 + B*x + C" (monic, integer A, B, C; any order, missing
/// terms are zero).
inline CubicPoly parse_poly(const std::string& text) {
  auto terms = detail::parse_terms(text, {"x"});
  if (terms.empty() || terms.rbegin()->first != 3) throw InvalidInput("polynomial must have degree 3: '" + text + "'");
  if (terms[3] != 1) throw InvalidInput("polynomial must be monic: '" + text + "'");
  return CubicPoly{terms[2], terms[1], terms[0]};
}

enum class Signature { OneReal, TotallyReal };

inline const char* signature_name(Signature s) { return s == Signature::OneReal ? "one-real" : "totally-real"; }

/// Certified enclosures of the roots of the defining polynomial. `id` is the
/// root identified with t in R (the real root, or the largest real root in the
/// totally real case); conj1, conj2 are the other two embeddings (conj1 has
/// positive imaginary part in the one-real case; in the totally real case
/// conj1 is the smallest root, conj2 the middle one).
struct CertifiedRoots {
  mpfr_prec_t precision = 0;
  Interval id;
  ComplexBox conj1, conj2;
};

class CubicField;
using FieldPtr = std::shared_ptr<const CubicField>;

class CubicField {
 public:
  /// Validates irreducibility and nonzero discriminant.
  static FieldPtr create(const CubicPoly& poly) {
    if (!poly.has_integer_coefficients()) throw InvalidInput("defining polynomial must have integer coefficients");
    if (!poly.integer_roots().empty()) throw InvalidInput("reducible polynomial " + poly.str() + " (has a rational root)");
    const Rat disc = poly.discriminant();
    if (disc == 0) throw InvalidInput("zero discriminant");
    return FieldPtr(new CubicField(poly, disc.get_num()));
  }

  const CubicPoly& poly() const { return poly_; }
  // x^3 + f2 x^2 + f1 x + f0
  const Int& f2() const { return f2_; }
  const Int& f1() const { return f1_; }
  const Int& f0() const { return f0_; }
  const Int& discriminant() const { return disc_; }
  Signature signature() const { return disc_ > 0 ? Signature::TotallyReal : Signature::OneReal; }
  std::string poly_str() const { return poly_.str(); }

  /// Tr(t^n); cache grows by the linear recurrence.
  Int power_sum(std::size_t n) const {
    std::lock_guard<std::mutex> lock(mu_);
    while (power_sums_.size() <= n) {
      const std::size_t k = power_sums_.size();
      power_sums_.push_back(-f2_ * power_sums_[k - 1] - f1_ * power_sums_[k - 2] - f0_ * power_sums_[k - 3]);
    }
    return power_sums_[n];
  }

  /// Root enclosures at (at least) `prec` bits.
  CertifiedRoots roots(mpfr_prec_t prec) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = roots_cache_.lower_bound(prec);
      if (it != roots_cache_.end()) return it->second;
    }
    CertifiedRoots r = compute_roots(prec);
    std::lock_guard<std::mutex> lock(mu_);
    return roots_cache_.emplace(prec, std::move(r)).first->second;
  }

  /// Exact sign of f at X / 2^k.
  int sign_at_dyadic(const Int& x, unsigned long k) const {
    Int p1, p2, p3;
    mpz_mul_2exp(p1.get_mpz_t(), Int(1).get_mpz_t(), k);
    p2 = p1 * p1;
    p3 = p2 * p1;
    Int v = ((x + f2_ * p1) * x + f1_ * p2) * x + f0_ * p3;
    return sgn(v);
  }

 private:
  struct Bracket {
    Int x;            // root in [x, x+1] / 2^k
    unsigned long k;  // (k may start "negative" via scale; see isolate)
  };

  CubicField(CubicPoly poly, Int disc)
      : poly_(std::move(poly)),
        f2_(poly_.a2.get_num()),
        f1_(poly_.a1.get_num()),
        f0_(poly_.a0.get_num()),
        disc_(std::move(disc)) {
    power_sums_ = {Int(3), Int(-f2_), Int(f2_ * f2_ - 2 * f1_)};
    isolate();
  }

  // Dyadic grid refinement until the number of sign changes equals the
  // number of real roots. Grid points are never roots (f is irreducible).
  void isolate() {
    const std::size_t want = signature() == Signature::TotallyReal ? 3 : 1;
    Int bound = 1 + std::max({abs(f2_), abs(f1_), abs(f0_)});
    unsigned long b = mpz_sizeinbase(bound.get_mpz_t(), 2);  // 2^b > Cauchy bound
    for (unsigned long k = 0;; ++k) {
      std::vector<Bracket> found;
      Int lo = -(Int(1) << (b + k));
      Int hi = Int(1) << (b + k);
      int prev = sign_at_dyadic(lo, k);
      for (Int x = lo; x < hi; ++x) {
        int s = sign_at_dyadic(x + 1, k);
        if (s != prev) found.push_back({x, k});
        prev = s;
      }
      if (found.size() == want) {
        brackets_ = std::move(found);
        return;
      }
    }
  }

  Interval refine(const Bracket& br, mpfr_prec_t prec) const {
    Int x = br.x;
    unsigned long k = br.k;
    const int s_lo = sign_at_dyadic(x, k);
    auto bisect_to = [&](unsigned long target) {
      while (k < target) {
        Int mid = 2 * x + 1;
        ++k;
        if (sign_at_dyadic(mid, k) == s_lo)
          x = mid;
        else
          x = 2 * x;
      }
    };
    bisect_to(80);
    // Newton at working precision, then an exact sign check on a bracket of
    // width 2^{-K} around the result.
    const mpfr_prec_t work = prec + 64;
    mpfr_t t, fx, dfx, tmp;
    mpfr_inits2(work, t, fx, dfx, tmp, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_z(t, x.get_mpz_t(), MPFR_RNDN);
    mpfr_div_2ui(t, t, k, MPFR_RNDN);
    const Int F2 = f2_, F1 = f1_, F0 = f0_;
    // precision doubles with each step; two extra steps at full precision
    std::vector<mpfr_prec_t> schedule;
    for (mpfr_prec_t p = 128; p < work; p *= 2) schedule.push_back(p);
    schedule.insert(schedule.end(), {work, work, work});
    for (mpfr_prec_t p : schedule) {
      mpfr_prec_round(t, p, MPFR_RNDN);
      mpfr_set_prec(fx, p);
      mpfr_set_prec(dfx, p);
      mpfr_set_prec(tmp, p);
      // f(t) = ((t + f2) t + f1) t + f0 ; f'(t) = (3t + 2 f2) t + f1
      mpfr_add_z(fx, t, F2.get_mpz_t(), MPFR_RNDN);
      mpfr_mul(fx, fx, t, MPFR_RNDN);
      mpfr_add_z(fx, fx, F1.get_mpz_t(), MPFR_RNDN);
      mpfr_mul(fx, fx, t, MPFR_RNDN);
      mpfr_add_z(fx, fx, F0.get_mpz_t(), MPFR_RNDN);
      mpfr_mul_ui(dfx, t, 3, MPFR_RNDN);
      mpfr_set_z(tmp, F2.get_mpz_t(), MPFR_RNDN);
      mpfr_mul_ui(tmp, tmp, 2, MPFR_RNDN);
      mpfr_add(dfx, dfx, tmp, MPFR_RNDN);
      mpfr_mul(dfx, dfx, t, MPFR_RNDN);
      mpfr_add_z(dfx, dfx, F1.get_mpz_t(), MPFR_RNDN);
      mpfr_div(fx, fx, dfx, MPFR_RNDN);
      mpfr_sub(t, t, fx, MPFR_RNDN);
    }
    mpfr_set_prec(tmp, work);
    const unsigned long K = std::max<unsigned long>(static_cast<unsigned long>(prec) + 16, 96);
    mpfr_mul_2ui(tmp, t, K, MPFR_RNDN);
    Int X;
    mpfr_get_z(X.get_mpz_t(), tmp, MPFR_RNDN);
    mpfr_clears(t, fx, dfx, tmp, static_cast<mpfr_ptr>(nullptr));

    Int lo = X - 1, hi = X + 1;
    // The candidate must lie inside the isolating bracket [x, x+1]/2^k.
    const Int lo_iso = x << (K - k);
    const Int hi_iso = (x + 1) << (K - k);
    bool ok = lo >= lo_iso && hi <= hi_iso && sign_at_dyadic(lo, K) != sign_at_dyadic(hi, K) &&
              sign_at_dyadic(lo, K) != 0;
    if (!ok) {
      bisect_to(K);
      lo = x;
      hi = x + 1;
    }
    Rat rlo(lo), rhi(hi);
    mpq_div_2exp(rlo.get_mpq_t(), rlo.get_mpq_t(), K);
    mpq_div_2exp(rhi.get_mpq_t(), rhi.get_mpq_t(), K);
    return Interval::hull(rlo, rhi, prec + 8);
  }

  CertifiedRoots compute_roots(mpfr_prec_t prec) const {
    CertifiedRoots out;
    out.precision = prec;
    if (signature() == Signature::TotallyReal) {
      Interval r0 = refine(brackets_[0], prec);
      Interval r1 = refine(brackets_[1], prec);
      Interval r2 = refine(brackets_[2], prec);
      out.id = r2;
      out.conj1 = ComplexBox::real(r0);
      out.conj2 = ComplexBox::real(r1);
      return out;
    }
    // One real root r; the complex pair solves x^2 + (f2 + r) x + (f1 + f2 r + r^2).
    const mpfr_prec_t p = prec + 8;
    Interval r = refine(brackets_[0], prec);
    Interval b = Interval::from_int(f2_, p) + r;
    Interval c = Interval::from_int(f1_, p) + r * b;
    Interval half = Interval::from_rat(Rat(1, 2), p);
    Interval re = -(b * half);
    Interval disc = c - sqr(re);
    if (!disc.certainly_positive()) throw Undecided("complex root pair not separated");
    Interval im = sqrt(disc);
    out.id = r;
    out.conj1 = ComplexBox(re, im);
    out.conj2 = ComplexBox(re, -im);
    return out;
  }

  CubicPoly poly_;
  Int f2_, f1_, f0_;
  Int disc_;
  std::vector<Bracket> brackets_;  // ascending
  mutable std::mutex mu_;
  mutable std::vector<Int> power_sums_;
  mutable std::map<mpfr_prec_t, CertifiedRoots> roots_cache_;
};

inline FieldPtr field_create(const CubicPoly& poly) { return CubicField::create(poly); }
inline FieldPtr field_create(const std::string& text) { return CubicField::create(parse_poly(text)); }

/// 3x3 multiplication-by-x matrix in the power basis, generic in the ring so
/// the same formulas serve exact (Rat, Int) and modular callers.
template <typename T>
std::array<std::array<T, 3>, 3> multiplication_matrix(const std::array<T, 3>& c, const T& f2, const T& f1,
                                                      const T& f0) {
  // column j = coords of x * t^j; x*t = -f0 c2 + (c0 - f1 c2) t + (c1 - f2 c2) t^2
  auto times_t = [&](const std::array<T, 3>& v) {
    return std::array<T, 3>{T(-f0 * v[2]), T(v[0] - f1 * v[2]), T(v[1] - f2 * v[2])};
  };
  std::array<T, 3> col0 = c;
  std::array<T, 3> col1 = times_t(col0);
  std::array<T, 3> col2 = times_t(col1);
  std::array<std::array<T, 3>, 3> m;
  for (int i = 0; i < 3; ++i) {
    m[i][0] = col0[i];
    m[i][1] = col1[i];
    m[i][2] = col2[i];
  }
  return m;
}

/// (trace, second elementary symmetric function, determinant) of a 3x3 matrix.
template <typename T>
std::array<T, 3> char_coefficients(const std::array<std::array<T, 3>, 3>& m) {
  T tr = m[0][0] + m[1][1] + m[2][2];
  T e2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2] -
         m[1][2] * m[2][1];
  T det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
          m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return {tr, e2, det};
}

/// Values of x under the three embeddings.
struct EmbeddingValues {
  mpfr_prec_t precision = 0;
  Interval id_value;
  ComplexBox conj1, conj2;

  ComplexBox id_box() const { return ComplexBox::real(id_value); }
  ComplexBox sum() const { return id_box() + conj1 + conj2; }
  ComplexBox product() const { return id_box() * conj1 * conj2; }
  const ComplexBox& conj(int j) const { return j == 1 ? conj1 : conj2; }
};

using IntTriple = std::array<Int, 3>;

class FieldElement {
 public:
  FieldElement(FieldPtr field, std::array<Rat, 3> coords) : field_(std::move(field)), c_(std::move(coords)) {
    for (auto& q : c_) q.canonicalize();
  }
  FieldElement(FieldPtr field, const IntTriple& coords)
      : field_(std::move(field)), c_{Rat(coords[0]), Rat(coords[1]), Rat(coords[2])} {}

  static FieldElement rational(FieldPtr f, const Rat& q) { return FieldElement(std::move(f), {q, Rat(0), Rat(0)}); }
  static FieldElement theta(FieldPtr f) { return FieldElement(std::move(f), {Rat(0), Rat(1), Rat(0)}); }

  const FieldPtr& field() const { return field_; }
  const std::array<Rat, 3>& coords() const { return c_; }
  const Rat& operator[](int i) const { return c_[i]; }

  bool is_zero() const { return c_[0] == 0 && c_[1] == 0 && c_[2] == 0; }
  bool is_rational() const { return c_[1] == 0 && c_[2] == 0; }
  bool has_integer_coords() const {
    return c_[0].get_den() == 1 && c_[1].get_den() == 1 && c_[2].get_den() == 1;
  }
  IntTriple int_coords() const {
    if (!has_integer_coords()) throw InvalidInput("element does not have integer coordinates");
    return {c_[0].get_num(), c_[1].get_num(), c_[2].get_num()};
  }
  /// lcm of the coordinate denominators.
  Int denominator() const {
    Int d = 1;
    for (const auto& q : c_) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den_mpz_t());
    return d;
  }

  bool operator==(const FieldElement& o) const { return same_field(o) && c_ == o.c_; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    a.check_field(b);
    return FieldElement(a.field_, {a.c_[0] + b.c_[0], a.c_[1] + b.c_[1], a.c_[2] + b.c_[2]});
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    a.check_field(b);
    return FieldElement(a.field_, {a.c_[0] - b.c_[0], a.c_[1] - b.c_[1], a.c_[2] - b.c_[2]});
  }
  friend FieldElement operator-(const FieldElement& a) {
    return FieldElement(a.field_, {Rat(-a.c_[0]), Rat(-a.c_[1]), Rat(-a.c_[2])});
  }
  friend FieldElement operator*(const Rat& s, const FieldElement& a) {
    return FieldElement(a.field_, {s * a.c_[0], s * a.c_[1], s * a.c_[2]});
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) { return elem_mul(a, b); }

  friend FieldElement elem_mul(const FieldElement& a, const FieldElement& b) {
    a.check_field(b);
    const CubicField& f = *a.field_;
    if (a.has_integer_coords() && b.has_integer_coords())
      return FieldElement(a.field_, mul_int(a.int_coords(), b.int_coords(), f));
    const auto& x = a.c_;
    const auto& y = b.c_;
    Rat d0 = x[0] * y[0];
    Rat d1 = x[0] * y[1] + x[1] * y[0];
    Rat d2 = x[0] * y[2] + x[1] * y[1] + x[2] * y[0];
    Rat d3 = x[1] * y[2] + x[2] * y[1];
    Rat d4 = x[2] * y[2];
    return FieldElement(a.field_, reduce<Rat>(d0, d1, d2, d3, d4, Rat(f.f2()), Rat(f.f1()), Rat(f.f0())));
  }

  /// x^n by repeated squaring; integral elements stay in mpz throughout.
  friend FieldElement elem_pow(const FieldElement& x, const Int& n) {
    if (n < 0) return elem_pow(x.inverse(), Int(-n));
    if (x.has_integer_coords()) return FieldElement(x.field_, pow_int(x.int_coords(), n, *x.field_));
    FieldElement result = rational(x.field_, 1);
    FieldElement base = x;
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (std::size_t i = 0; i < bits; ++i) {
      if (mpz_tstbit(n.get_mpz_t(), i)) result = elem_mul(result, base);
      if (i + 1 < bits) base = elem_mul(base, base);
    }
    return result;
  }
  friend FieldElement elem_pow(const FieldElement& x, long n) { return elem_pow(x, Int(n)); }

  /// x^{-1} = (x^2 - Tr(x) x + e2(x)) / N(x).
  FieldElement inverse() const {
    const auto [tr, e2, n] = char_coefficients(multiplication_matrix<Rat>(c_, Rat(field_->f2()), Rat(field_->f1()),
                                                                          Rat(field_->f0())));
    if (n == 0) throw InvalidInput("inverse of zero");
    FieldElement x2 = elem_mul(*this, *this);
    FieldElement num = x2 - tr * *this + rational(field_, e2);
    return Rat(1 / n) * num;
  }

  std::array<Rat, 3> char_coeffs() const {
    return char_coefficients(multiplication_matrix<Rat>(c_, Rat(field_->f2()), Rat(field_->f1()), Rat(field_->f0())));
  }

  /// "(c0, c1, c2)/d" with integer ci and positive d (d omitted when 1).
  std::string str() const {
    Int d = denominator();
    std::string s = "(";
    for (int i = 0; i < 3; ++i) {
      Rat v = c_[i] * d;
      s += v.get_num().get_str();
      if (i < 2) s += ", ";
    }
    s += ")";
    if (d != 1) s += "/" + d.get_str();
    return s;
  }

  // Integer-coordinate kernels (exposed for modular callers).
  static IntTriple mul_int(const IntTriple& x, const IntTriple& y, const CubicField& f) {
    Int d0 = x[0] * y[0];
    Int d2m = x[1] * y[1];
    Int d4 = x[2] * y[2];
    // Karatsuba-style cross terms
    Int d1 = (x[0] + x[1]) * (y[0] + y[1]) - d0 - d2m;
    Int d3 = (x[1] + x[2]) * (y[1] + y[2]) - d2m - d4;
    Int d2 = (x[0] + x[2]) * (y[0] + y[2]) - d0 - d4 + d2m;
    return reduce<Int>(d0, d1, d2, d3, d4, f.f2(), f.f1(), f.f0());
  }
  static IntTriple sqr_int(const IntTriple& x, const CubicField& f) {
    Int d0 = x[0] * x[0];
    Int d1 = 2 * x[0] * x[1];
    Int d2 = 2 * x[0] * x[2] + x[1] * x[1];
    Int d3 = 2 * x[1] * x[2];
    Int d4 = x[2] * x[2];
    return reduce<Int>(d0, d1, d2, d3, d4, f.f2(), f.f1(), f.f0());
  }
  static IntTriple pow_int(const IntTriple& x, const Int& n, const CubicField& f) {
    IntTriple result{Int(1), Int(0), Int(0)};
    if (n == 0) return result;
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    // left-to-right: squarings act on the accumulator only
    result = x;
    for (std::size_t i = bits - 1; i-- > 0;) {
      result = sqr_int(result, f);
      if (mpz_tstbit(n.get_mpz_t(), i)) result = mul_int(result, x, f);
    }
    return result;
  }

  // d0 + d1 t + ... + d4 t^4 reduced with t^3 = -f2 t^2 - f1 t - f0 and
  // t^4 = (f2^2 - f1) t^2 + (f2 f1 - f0) t + f2 f0.
  template <typename T>
  static std::array<T, 3> reduce(const T& d0, const T& d1, const T& d2, const T& d3, const T& d4, const T& f2,
                                 const T& f1, const T& f0) {
    return {T(d0 - f0 * d3 + f2 * f0 * d4), T(d1 - f1 * d3 + (f2 * f1 - f0) * d4),
            T(d2 - f2 * d3 + (f2 * f2 - f1) * d4)};
  }

 private:
  bool same_field(const FieldElement& o) const { return field_ == o.field_ || field_->poly() == o.field_->poly(); }
  void check_field(const FieldElement& o) const {
    if (!same_field(o)) throw InvalidInput("field mismatch");
  }

  FieldPtr field_;
  std::array<Rat, 3> c_;
};

inline Rat trace(const FieldElement& x) {
  const CubicField& f = *x.field();
  return 3 * x[0] + x[1] * Rat(f.power_sum(1)) + x[2] * Rat(f.power_sum(2));
}

/// Exact Tr of an integral element given by coordinates.
inline Int trace_int(const IntTriple& c, const CubicField& f) {
  return 3 * c[0] + c[1] * f.power_sum(1) + c[2] * f.power_sum(2);
}

inline Rat norm(const FieldElement& x) { return x.char_coeffs()[2]; }

/// X^3 - Tr(x) X^2 + e2(x) X - N(x)
inline CubicPoly char_poly(const FieldElement& x) {
  const auto [tr, e2, n] = x.char_coeffs();
  return CubicPoly{Rat(-tr), e2, Rat(-n)};
}

inline bool is_algebraic_integer(const FieldElement& x) { return char_poly(x).has_integer_coefficients(); }

inline EmbeddingValues embed(const FieldElement& x, mpfr_prec_t prec) {
  if (prec < kMinPrecision) throw InvalidInput("embed: precision must be at least 32 bits");
  const CertifiedRoots roots = x.field()->roots(prec);
  const mpfr_prec_t p = roots.id.precision();
  const Interval c0 = Interval::from_rat(x[0], p);
  const Interval c1 = Interval::from_rat(x[1], p);
  const Interval c2 = Interval::from_rat(x[2], p);
  auto eval_real = [&](const Interval& r) { return c0 + r * (c1 + r * c2); };
  auto eval_complex = [&](const ComplexBox& z) {
    if (z.is_exactly_real()) return ComplexBox::real(eval_real(z.re));
    ComplexBox inner = ComplexBox::real(c1) + z * ComplexBox::real(c2);
    return ComplexBox::real(c0) + z * inner;
  };
  EmbeddingValues ev;
  ev.precision = prec;
  ev.id_value = eval_real(roots.id);
  ev.conj1 = eval_complex(roots.conj1);
  ev.conj2 = eval_complex(roots.conj2);
  return ev;
}

/// Sign of x under the identity embedding, certified with adaptive precision.
inline int certified_sign(const FieldElement& x, mpfr_prec_t cap = kMaxPrecision) {
  if (x.is_zero()) return 0;
  return with_precision(
      64, cap, [&](mpfr_prec_t p) { return embed(x, p).id_value.sign(); }, "certifying a sign");
}

/// Parses an element string: a polynomial in t (also accepts x or theta), e.g.
/// "t^2", "1 + 3/2*t", or the coordinate form "(c0, c1, c2)/d".
inline FieldElement parse_element(const FieldPtr& field, const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (!s.empty() && s[0] == '(') {
    const auto close = s.find(')');
    if (close == std::string::npos) throw InvalidInput("missing ')' in '" + text + "'");
    std::vector<Rat> parts;
    std::size_t start = 1;
    for (std::size_t i = 1; i <= close; ++i) {
      if (s[i] == ',' || i == close) {
        parts.push_back(parse_rational(s.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (parts.size() != 3) throw InvalidInput("coordinate form needs three entries: '" + text + "'");
    Rat d = 1;
    if (close + 1 < s.size()) {
      if (s[close + 1] != '/') throw InvalidInput("expected '/d' after ')' in '" + text + "'");
      d = parse_rational(s.substr(close + 2));
      if (d == 0) throw InvalidInput("zero denominator");
    }
    return FieldElement(field, {parts[0] / d, parts[1] / d, parts[2] / d});
  }
  auto terms = detail::parse_terms(s, {"theta", "t", "x"});
  FieldElement out = FieldElement::rational(field, 0);
  const FieldElement t = FieldElement::theta(field);
  for (const auto& [e, c] : terms) out = out + c * elem_pow(t, Int(static_cast<unsigned long>(e)));
  return out;
}

struct GammaConstruction {
  FieldElement gamma;
  FieldElement gamma0;    // Tr(g0) = Tr(g0 alpha) = 0, Tr(g0 beta) = 1
  Int scale;              // gamma = +-scale * gamma0
  bool negated = false;
  std::array<std::array<Rat, 3>, 3> gram;  // Tr(b_i b_j), b = (1, alpha, beta)
  Rat gram_det;
};

namespace detail {

inline Rat det3(const std::array<std::array<Rat, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Solves m * u = rhs by Cramer's rule (m nonsingular).
inline std::array<Rat, 3> solve3(const std::array<std::array<Rat, 3>, 3>& m, const std::array<Rat, 3>& rhs) {
  const Rat d = det3(m);
  std::array<Rat, 3> u;
  for (int j = 0; j < 3; ++j) {
    auto mj = m;
    for (int i = 0; i < 3; ++i) mj[i][j] = rhs[i];
    u[j] = det3(mj) / d;
  }
  return u;
}

// Least Gamma | denominator(x) with Gamma * x integral.
inline Int integral_scale(const FieldElement& x) {
  for (const Int& g : divisors(x.denominator()))
    if (is_algebraic_integer(Rat(g) * x)) return g;
  return x.denominator();
}

}  // namespace detail

/// gamma with Tr(gamma) = Tr(gamma alpha) = 0, gamma, gamma*alpha, gamma*beta
/// integral, gamma > 0 under the identity embedding, and the least positive
/// integer scale of gamma0.
inline GammaConstruction gamma_construct_detailed(const FieldElement& alpha, const FieldElement& beta,
                                                  mpfr_prec_t cap = kMaxPrecision) {
  const FieldPtr& f = alpha.field();
  if (!(f == beta.field() || f->poly() == beta.field()->poly())) throw InvalidInput("field mismatch");
  const FieldElement one = FieldElement::rational(f, 1);
  const std::array<FieldElement, 3> basis{one, alpha, beta};
  GammaConstruction g{one, one, Int(1), false, {}, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g.gram[i][j] = trace(basis[i] * basis[j]);
  g.gram_det = detail::det3(g.gram);
  if (g.gram_det == 0) throw InvalidInput("(1, alpha, beta) is not a basis: trace Gram matrix is singular");
  // Tr(g0 * w) = sum_i u_i Tr(t^i w): rows w in (1, alpha, beta), columns t^i.
  std::array<std::array<Rat, 3>, 3> m;
  FieldElement t = FieldElement::theta(f);
  const std::array<FieldElement, 3> powers{one, t, t * t};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = trace(basis[r] * powers[c]);
  const auto u = detail::solve3(m, {Rat(0), Rat(0), Rat(1)});
  g.gamma0 = FieldElement(f, u);
  Int scale = 1;
  for (const FieldElement& x : {g.gamma0, g.gamma0 * alpha, g.gamma0 * beta}) {
    Int s = detail::integral_scale(x);
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), s.get_mpz_t());
  }
  g.scale = scale;
  g.gamma = Rat(scale) * g.gamma0;
  if (certified_sign(g.gamma, cap) < 0) {
    g.gamma = -g.gamma;
    g.negated = true;
  }
  return g;
}

inline FieldElement gamma_construct(const FieldElement& alpha, const FieldElement& beta) {
  return gamma_construct_detailed(alpha, beta).gamma;
}

}  // namespace littlewood
