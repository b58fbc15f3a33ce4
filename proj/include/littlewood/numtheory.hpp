#pragma once

// Integer and rational primitives: factorization, the multiplicative
// function psi, p-adic valuations, gcd/lcm helpers and the constants C3, G
// that bound the gcd of an approximation triple.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "littlewood/errors.hpp"
#include "littlewood/interval.hpp"

namespace littlewood {

struct PrimePower {
  Int prime;
  unsigned long exponent = 0;
  bool operator==(const PrimePower&) const = default;
};

/// Sorted by prime, primes strictly increasing.
using Factorization = std::vector<PrimePower>;

namespace detail {

inline constexpr unsigned long kTrialDivisionLimit = 1'000'000;

inline bool is_probable_prime(const Int& n) {
  // BPSW plus Miller-Rabin rounds; deterministic below 2^64.
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

// Brent's variant of Pollard rho; n composite and odd.
inline Int pollard_brent(const Int& n) {
  for (unsigned long c = 1;; ++c) {
    Int y = 2, x, q = 1, g = 1, ys;
    unsigned long r = 1;
    const unsigned long m = 128;
    auto f = [&](const Int& v) {
      Int t = v * v + c;
      mpz_mod(t.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      return t;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          Int d = abs(x - y);
          q = q * d;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      }
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        Int d = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void split_large(const Int& n, std::vector<Int>& primes) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    primes.push_back(n);
    return;
  }
  Int d = pollard_brent(n);
  split_large(d, primes);
  split_large(n / d, primes);
}

}  // namespace detail

inline Factorization factorize(const Int& n) {
  if (n <= 0) throw InvalidInput("factorize: n must be positive, got " + n.get_str());
  Factorization out;
  Int m = n;
  auto pull = [&](unsigned long p) {
    unsigned long e = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
      ++e;
    }
    if (e) out.push_back({Int(p), e});
  };
  pull(2);
  for (unsigned long p = 3; p <= detail::kTrialDivisionLimit; p += 2) {
    if (Int(p) * p > m) break;
    pull(p);
  }
  if (m > 1) {
    std::vector<Int> big;
    detail::split_large(m, big);
    std::sort(big.begin(), big.end());
    for (const Int& p : big) {
      if (!out.empty() && out.back().prime == p)
        ++out.back().exponent;
      else
        out.push_back({p, 1});
    }
  }
  return out;
}

inline Int psi(const Int& d) {
  if (d <= 0) throw InvalidInput("psi: D must be positive, got " + d.get_str());
  Int r = d;
  for (const auto& [p, e] : factorize(d)) {
    Int p6;
    mpz_pow_ui(p6.get_mpz_t(), p.get_mpz_t(), 6);
    r *= p6 - 1;
  }
  return r;
}

/// Largest v with p^v | n. Zero has infinite valuation and is rejected.
inline unsigned long p_adic_valuation(const Int& n, const Int& p) {
  if (n == 0) throw InvalidInput("p_adic_valuation: valuation of 0 is infinite");
  if (p < 2) throw InvalidInput("p_adic_valuation: p must be prime");
  Int t = n;
  return mpz_remove(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
}

/// v_p of a nonzero rational (may be negative).
inline long p_adic_valuation(const Rat& q, const Int& p) {
  if (q == 0) throw InvalidInput("p_adic_valuation: valuation of 0 is infinite");
  return static_cast<long>(p_adic_valuation(q.get_num(), p)) -
         static_cast<long>(p_adic_valuation(q.get_den(), p));
}

inline Int triple_gcd(const Int& q, const Int& r, const Int& s) {
  if (q == 0 && r == 0 && s == 0) throw InvalidInput("triple_gcd: all three inputs are zero");
  Int g;
  mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), r.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), s.get_mpz_t());
  return g;
}

inline Int lcm_upto(unsigned long k) {
  Int l = 1;
  for (unsigned long i = 2; i <= k; ++i) mpz_lcm_ui(l.get_mpz_t(), l.get_mpz_t(), i);
  return l;
}

struct C3Bound {
  Interval value;  // encloses C^{-2/3} max{1, C2^{2/3}}
  Int ceiling;     // smallest integer >= the exact value
};

/// C3 = C^{-2/3} max{1, C2^{2/3}} = (max{1, C2} / C)^{2/3}. The ceiling is
/// exact: the least k >= 1 with k^3 >= x^2, x = max{1, C2}/C.
inline C3Bound lemma23_C3(const Rat& c, const Rat& c2, mpfr_prec_t prec = 128) {
  if (c <= 0 || c2 <= 0) throw InvalidInput("lemma23_C3: C and C2 must be positive");
  const Rat x = (c2 > 1 ? c2 : Rat(1)) / c;
  const Rat x2 = x * x;
  Interval v = cbrt(sqr(Interval::from_rat(x, prec)));
  Int k;
  mpz_fdiv_q(k.get_mpz_t(), v.lo_rat().get_num_mpz_t(), v.lo_rat().get_den_mpz_t());
  if (k < 1) k = 1;
  while (Rat(k * k * k) < x2) ++k;
  while (k > 1 && Rat((k - 1) * (k - 1) * (k - 1)) >= x2) --k;
  return {std::move(v), k};
}

/// lcm(1, ..., C3 ceiling)
inline Int lemma23_G(const Int& c3_ceiling) {
  if (c3_ceiling < 1) throw InvalidInput("lemma23_G: ceiling must be >= 1");
  if (!c3_ceiling.fits_ulong_p()) throw InvalidInput("lemma23_G: ceiling too large");
  return lcm_upto(c3_ceiling.get_ui());
}

/// Positive divisors of n in increasing order.
inline std::vector<Int> divisors(const Int& n) {
  std::vector<Int> ds{1};
  for (const auto& [p, e] : factorize(n)) {
    const std::size_t base = ds.size();
    Int pk = 1;
    for (unsigned long i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline bool divides(const Int& d, const Int& n) {
  if (d == 0) return n == 0;
  return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

/// Parses "p/q", "-7", "0.25" into an exact rational.
inline Rat parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  if (s.empty()) throw InvalidInput("empty rational");
  const auto e = s.find_first_of("eE");
  if (e != std::string::npos && s.find('/') == std::string::npos) {
    long ex = 0;
    try {
      std::size_t used = 0;
      ex = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1) throw InvalidInput("bad exponent");
    } catch (const std::logic_error&) {
      throw InvalidInput("cannot parse rational '" + text + "'");
    }
    if (ex > 100000 || ex < -100000) throw InvalidInput("exponent out of range in '" + text + "'");
    Int p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(ex < 0 ? -ex : ex));
    Rat m = parse_rational(s.substr(0, e));
    return ex < 0 ? Rat(m / p) : Rat(m * p);
  }
  try {
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
      if (s.find('/') != std::string::npos) throw InvalidInput("mixed decimal/fraction");
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      const std::size_t frac = s.size() - dot - 1;
      if (digits == "-" || digits == "+" || digits.empty()) throw InvalidInput("bad decimal");
      if (digits[0] == '+') digits.erase(0, 1);
      Int num(digits, 10);
      Int den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
      Rat q(num, den);
      q.canonicalize();
      return q;
    }
    if (s[0] == '+') s.erase(0, 1);
    Rat q(s, 10);
    if (q.get_den() == 0) throw InvalidInput("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw InvalidInput("cannot parse rational '" + text + "'");
  }
}

inline std::string rat_str(const Rat& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace littlewood
