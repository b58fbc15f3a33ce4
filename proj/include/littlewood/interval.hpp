#pragma once

// Certified real and complex enclosures on top of MPFR directed rounding.
//
// An Interval [lo, hi] always contains the exact value it stands for. Every
// operation rounds lo toward -inf and hi toward +inf, so containment survives
// arbitrary composition. Decisions (signs, comparisons) that cannot be made at
// the current precision throw littlewood::Undecided; with_precision() turns that into
// a precision-doubling loop capped at a configurable number of bits.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <utility>

#include "littlewood/errors.hpp"

namespace littlewood {

using Int = mpz_class;
using Rat = mpq_class;

inline constexpr mpfr_prec_t kDefaultPrecision = 64;
inline constexpr mpfr_prec_t kMinPrecision = 32;
inline constexpr mpfr_prec_t kMaxPrecision = mpfr_prec_t{1} << 20;

class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = kDefaultPrecision) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  Interval(const Interval& o) {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  Interval(Interval&& o) noexcept {
    mpfr_init2(lo_, mpfr_get_prec(o.lo_));
    mpfr_init2(hi_, mpfr_get_prec(o.hi_));
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }
  Interval& operator=(const Interval& o) {
    if (this != &o) {
      mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
      mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }
  Interval& operator=(Interval&& o) noexcept {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
  }
  ~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static Interval from_int(const Int& n, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_z(r.lo_, n.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, n.get_mpz_t(), MPFR_RNDU);
    return r;
  }
  static Interval from_long(long n, mpfr_prec_t prec) { return from_int(Int(n), prec); }
  static Interval from_rat(const Rat& q, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
  }
  static Interval hull(const Rat& a, const Rat& b, mpfr_prec_t prec) {
    Interval r(prec);
    const Rat& lo = a < b ? a : b;
    const Rat& hi = a < b ? b : a;
    mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
    return r;
  }
  static Interval pi(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
  }
  static Interval log2_const(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_log2(r.lo_, MPFR_RNDD);
    mpfr_const_log2(r.hi_, MPFR_RNDU);
    return r;
  }
  /// Enclosure of a double given with an absolute error bound.
  static Interval around(double x, double abs_err, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, x, MPFR_RNDD);
    mpfr_set_d(r.hi_, x, MPFR_RNDU);
    mpfr_sub_d(r.lo_, r.lo_, abs_err, MPFR_RNDD);
    mpfr_add_d(r.hi_, r.hi_, abs_err, MPFR_RNDU);
    return r;
  }

  mpfr_prec_t precision() const { return std::max(mpfr_get_prec(lo_), mpfr_get_prec(hi_)); }
  const __mpfr_struct* lo() const { return lo_; }
  const __mpfr_struct* hi() const { return hi_; }

  bool certainly_positive() const { return mpfr_sgn(lo_) > 0; }
  bool certainly_negative() const { return mpfr_sgn(hi_) < 0; }
  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
  bool certainly_less(const Interval& o) const { return mpfr_less_p(hi_, o.lo_) != 0; }
  bool certainly_less_eq(const Interval& o) const { return mpfr_lessequal_p(hi_, o.lo_) != 0; }
  bool certainly_greater(const Interval& o) const { return o.certainly_less(*this); }
  bool contains(const Rat& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
  }
  bool contains(const Interval& o) const {
    return mpfr_lessequal_p(lo_, o.lo_) && mpfr_greaterequal_p(hi_, o.hi_);
  }
  bool overlaps(const Interval& o) const {
    return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
  }
  bool hi_leq(const Rat& q) const { return mpfr_cmp_q(hi_, q.get_mpq_t()) <= 0; }
  bool hi_less(const Rat& q) const { return mpfr_cmp_q(hi_, q.get_mpq_t()) < 0; }
  bool lo_geq(const Rat& q) const { return mpfr_cmp_q(lo_, q.get_mpq_t()) >= 0; }
  bool lo_greater(const Rat& q) const { return mpfr_cmp_q(lo_, q.get_mpq_t()) > 0; }

  /// -1, +1 when the sign is certain; throws Undecided otherwise.
  int sign() const {
    if (certainly_positive()) return 1;
    if (certainly_negative()) return -1;
    throw Undecided("sign of interval straddling zero");
  }

  double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_double() const { return 0.5 * (lo_double() + hi_double()); }

  /// Exact rational values of the (dyadic) endpoints.
  Rat lo_rat() const { return to_rat(lo_); }
  Rat hi_rat() const { return to_rat(hi_); }
  Rat mid_rat() const { return (lo_rat() + hi_rat()) / 2; }

  /// log2 of the width (very negative for tight intervals); +inf-ish for
  /// unbounded ones.
  double width_log2() const {
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double r = mpfr_zero_p(w) ? -1e300 : static_cast<double>(mpfr_get_exp(w));
    mpfr_clear(w);
    return r;
  }

  /// Lower endpoint rounded down / upper rounded up to `digits` significant
  /// decimal digits.
  std::string lo_str(int digits = 17) const { return format(lo_, digits, 'D'); }
  std::string hi_str(int digits = 17) const { return format(hi_, digits, 'U'); }
  std::string str(int digits = 17) const { return "[" + lo_str(digits) + ", " + hi_str(digits) + "]"; }

  // -- arithmetic -----------------------------------------------------------

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a) {
    Interval r(a.precision());
    mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const mpfr_prec_t prec = std::max(a.precision(), b.precision());
    Interval r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    const __mpfr_struct* xs[2] = {a.lo_, a.hi_};
    const __mpfr_struct* ys[2] = {b.lo_, b.hi_};
    bool first = true;
    for (auto* x : xs) {
      for (auto* y : ys) {
        mpfr_mul(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    }
    mpfr_clear(t);
    return r;
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw Undecided("division by an interval containing zero");
    const mpfr_prec_t prec = std::max(a.precision(), b.precision());
    Interval r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    const __mpfr_struct* xs[2] = {a.lo_, a.hi_};
    const __mpfr_struct* ys[2] = {b.lo_, b.hi_};
    bool first = true;
    for (auto* x : xs) {
      for (auto* y : ys) {
        mpfr_div(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_div(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    }
    mpfr_clear(t);
    return r;
  }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }

  Interval scaled(const Rat& q) const { return *this * from_rat(q, precision()); }
  Interval scaled(const Int& n) const { return *this * from_int(n, precision()); }

  friend Interval abs(const Interval& a) {
    if (a.certainly_positive() || mpfr_sgn(a.lo_) == 0) return a;
    if (a.certainly_negative() || mpfr_sgn(a.hi_) == 0) return -a;
    Interval r(a.precision());
    mpfr_set_zero(r.lo_, 1);
    if (mpfr_cmpabs(a.lo_, a.hi_) > 0)
      mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    else
      mpfr_set(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval max(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval min(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.precision(), b.precision()));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval sqr(const Interval& a) {
    Interval m = abs(a);
    Interval r(a.precision());
    mpfr_sqr(r.lo_, m.lo_, MPFR_RNDD);
    mpfr_sqr(r.hi_, m.hi_, MPFR_RNDU);
    return r;
  }
  /// Square root; a lower endpoint below zero is clamped (callers only pass
  /// enclosures of nonnegative quantities).
  friend Interval sqrt(const Interval& a) {
    if (a.certainly_negative()) throw Undecided("sqrt of a negative interval");
    Interval r(a.precision());
    if (mpfr_sgn(a.lo_) <= 0)
      mpfr_set_zero(r.lo_, 1);
    else
      mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval cbrt(const Interval& a) {
    Interval r(a.precision());
    mpfr_cbrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_cbrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval log(const Interval& a) {
    if (!a.certainly_positive()) throw Undecided("log of an interval not certainly positive");
    Interval r(a.precision());
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval exp(const Interval& a) {
    Interval r(a.precision());
    mpfr_exp(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval atan(const Interval& a) {
    Interval r(a.precision());
    mpfr_atan(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_atan(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval sin(const Interval& a) { return a.lipschitz_trig(mpfr_sin); }
  friend Interval cos(const Interval& a) { return a.lipschitz_trig(mpfr_cos); }

  /// x^n by repeated squaring on intervals.
  friend Interval pow(const Interval& x, unsigned long n) {
    Interval result = from_long(1, x.precision());
    Interval base = x;
    while (n) {
      if (n & 1UL) result = result * base;
      n >>= 1;
      if (n) base = sqr(base);
    }
    return result;
  }

 private:
  static Rat to_rat(const __mpfr_struct* x) {
    if (mpfr_zero_p(x)) return Rat(0);
    if (!mpfr_number_p(x)) throw Undecided("non-finite interval endpoint");
    Int m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
    Rat q(m);
    if (e >= 0) {
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    return q;
  }

  static std::string format(const __mpfr_struct* x, int digits, char mode) {
    char* buf = nullptr;
    const std::string fmt = std::string("%.") + std::to_string(digits - 1) + "R" + mode + "e";
    mpfr_asprintf(&buf, fmt.c_str(), x);
    std::string s = buf ? buf : "";
    mpfr_free_str(buf);
    return s;
  }

  // |f(x) - f(m)| <= |x - m| for sin and cos, with the result clamped to [-1, 1].
  Interval lipschitz_trig(int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) const {
    const mpfr_prec_t prec = precision();
    Interval r(prec);
    mpfr_t mid, rad, tmp;
    mpfr_inits2(prec + 2, mid, rad, tmp, static_cast<mpfr_ptr>(nullptr));
    mpfr_add(mid, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
    mpfr_sub(rad, hi_, mid, MPFR_RNDU);
    mpfr_sub(tmp, mid, lo_, MPFR_RNDU);
    mpfr_max(rad, rad, tmp, MPFR_RNDU);
    f(r.lo_, mid, MPFR_RNDD);
    mpfr_sub(r.lo_, r.lo_, rad, MPFR_RNDD);
    f(r.hi_, mid, MPFR_RNDU);
    mpfr_add(r.hi_, r.hi_, rad, MPFR_RNDU);
    if (mpfr_cmp_si(r.lo_, -1) < 0) mpfr_set_si(r.lo_, -1, MPFR_RNDD);
    if (mpfr_cmp_si(r.hi_, 1) > 0) mpfr_set_si(r.hi_, 1, MPFR_RNDU);
    mpfr_clears(mid, rad, tmp, static_cast<mpfr_ptr>(nullptr));
    return r;
  }

  mpfr_t lo_;
  mpfr_t hi_;
};

// Namespace-scope declarations of the hidden friends above, so qualified
// calls such as littlewood::abs(x) resolve.
Interval abs(const Interval& a);
Interval sqrt(const Interval& a);
Interval log(const Interval& a);
Interval exp(const Interval& a);
Interval sqr(const Interval& a);

/// Rectangular complex enclosure.
struct ComplexBox {
  Interval re;
  Interval im;

  ComplexBox() = default;
  ComplexBox(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}
  static ComplexBox real(Interval r) {
    Interval z(r.precision());
    return {std::move(r), std::move(z)};
  }

  bool is_exactly_real() const { return mpfr_zero_p(im.lo()) && mpfr_zero_p(im.hi()); }

  friend ComplexBox operator+(const ComplexBox& a, const ComplexBox& b) { return {a.re + b.re, a.im + b.im}; }
  friend ComplexBox operator-(const ComplexBox& a, const ComplexBox& b) { return {a.re - b.re, a.im - b.im}; }
  friend ComplexBox operator*(const ComplexBox& a, const ComplexBox& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexBox operator*(const Interval& s, const ComplexBox& b) { return {s * b.re, s * b.im}; }

  Interval abs2() const { return sqr(re) + sqr(im); }
  Interval abs() const { return is_exactly_real() ? littlewood::abs(re) : littlewood::sqrt(abs2()); }
  Interval log_abs() const {
    if (is_exactly_real()) return littlewood::log(littlewood::abs(re));
    return littlewood::log(abs2()) * Interval::from_rat(Rat(1, 2), re.precision());
  }

  /// Principal-ish argument: any enclosure of arg(z) modulo 2*pi, chosen so
  /// that the branch cut is never crossed inside the box.
  Interval arg() const {
    const mpfr_prec_t prec = std::max(re.precision(), im.precision());
    const Interval pi = Interval::pi(prec);
    const Interval half = Interval::from_rat(Rat(1, 2), prec);
    if (im.certainly_positive()) return pi * half - atan(re / im);
    if (im.certainly_negative()) return -(pi * half) - atan(re / im);
    if (re.certainly_positive()) return atan(im / re);
    if (re.certainly_negative()) return atan(im / re) + pi;
    throw Undecided("argument of a box containing zero");
  }

  /// exp(s) * (cos t + i sin t)
  static ComplexBox polar_log(const Interval& log_modulus, const Interval& angle) {
    Interval m = exp(log_modulus);
    return {m * cos(angle), m * sin(angle)};
  }
};

/// Runs `fn(prec)` with prec = start, 2*start, ... up to `cap`; each
/// Undecided thrown by fn triggers a retry. At the cap, PrecisionExhausted.
/// A start above the cap is clamped to it.
template <typename Fn>
auto with_precision(mpfr_prec_t start, mpfr_prec_t cap, Fn&& fn, const std::string& what = "")
    -> decltype(fn(start)) {
  mpfr_prec_t prec = std::min(std::max(start, kMinPrecision), std::max(cap, kMinPrecision));
  std::string last;
  for (;;) {
    try {
      return fn(prec);
    } catch (const Undecided& e) {
      last = e.what();
    }
    if (prec >= cap) break;
    prec = std::min(cap, prec * 2);
  }
  throw PrecisionExhausted("precision cap of " + std::to_string(cap) + " bits reached" +
                           (what.empty() ? "" : " while " + what) + " (" + last + ")");
}

}  // namespace littlewood
