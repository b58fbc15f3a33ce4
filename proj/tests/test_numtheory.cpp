#include <gtest/gtest.h>

#include <random>

#include "littlewood/numtheory.hpp"

using namespace littlewood;

namespace {

// Independent oracle: plain trial division on unsigned 64-bit integers.
std::vector<std::pair<unsigned long, unsigned long>> trial_factor(unsigned long n) {
  std::vector<std::pair<unsigned long, unsigned long>> out;
  for (unsigned long p = 2; p * p <= n; ++p) {
    unsigned long e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

Factorization to_fact(const std::vector<std::pair<unsigned long, unsigned long>>& v) {
  Factorization f;
  for (auto [p, e] : v) f.push_back({Int(p), e});
  return f;
}

Int ipow(long b, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

}  // namespace

TEST(Factorize, Examples) {
  EXPECT_TRUE(factorize(1).empty());
  EXPECT_EQ(factorize(12), to_fact({{2, 2}, {3, 1}}));
  EXPECT_EQ(factorize(275184), to_fact({{2, 4}, {3, 3}, {7, 2}, {13, 1}}));
}

TEST(Factorize, RejectsNonPositive) {
  EXPECT_THROW(factorize(0), InvalidInput);
  EXPECT_THROW(factorize(-5), InvalidInput);
}

TEST(Factorize, MatchesTrialDivision) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const unsigned long n = 1 + rng() % 5'000'000;
    EXPECT_EQ(factorize(Int(n)), to_fact(trial_factor(n))) << n;
  }
}

TEST(Factorize, LargeSemiprimeUsesRho) {
  const Int p("1000000000039"), q("1000000000061");
  const Factorization f = factorize(p * q * 8);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], (PrimePower{Int(2), 3}));
  EXPECT_EQ(f[1].prime, p);
  EXPECT_EQ(f[2].prime, q);
}

TEST(Psi, Examples) {
  EXPECT_EQ(psi(1), 1);
  EXPECT_EQ(psi(2), 126);
  EXPECT_EQ(psi(6), 275184);
  EXPECT_THROW(psi(0), InvalidInput);
}

TEST(Psi, PrimePowers) {
  for (long p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47})
    for (unsigned long nu = 1; nu <= 4; ++nu) EXPECT_EQ(psi(ipow(p, nu)), (ipow(p, 6) - 1) * ipow(p, nu));
}

TEST(Psi, MultiplicativeOnCoprimePairs) {
  std::mt19937 rng(11);
  int tested = 0;
  while (tested < 200) {
    const long m = 1 + rng() % 10000, n = 1 + rng() % 10000;
    if (std::gcd(m, n) != 1) continue;
    EXPECT_EQ(psi(Int(m) * n), psi(m) * psi(n)) << m << " " << n;
    ++tested;
  }
}

TEST(Valuation, Examples) {
  EXPECT_EQ(p_adic_valuation(Int(12), Int(2)), 2u);
  EXPECT_EQ(p_adic_valuation(Int(ipow(3, 126) - 1), Int(2)), 3u);
  EXPECT_EQ(p_adic_valuation(Int(126), Int(7)), 1u);
  EXPECT_THROW(p_adic_valuation(Int(0), Int(2)), InvalidInput);
}

TEST(Valuation, LiftingTheExponent) {
  // v_2(3^n - 1) = v_2(n) + 2 for even n
  for (unsigned long n = 2; n <= 200; n += 2)
    EXPECT_EQ(p_adic_valuation(Int(ipow(3, n) - 1), Int(2)), p_adic_valuation(Int(n), Int(2)) + 2) << n;
}

TEST(Valuation, DefiningProperty) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Int n = Int(static_cast<unsigned long>(1 + rng() % 1'000'000'000)) * ipow(2, rng() % 5) * ipow(3, rng() % 4);
    for (long p : {2, 3, 5, 7}) {
      const unsigned long v = p_adic_valuation(n, Int(p));
      EXPECT_TRUE(divides(ipow(p, v), n));
      EXPECT_FALSE(divides(ipow(p, v + 1), n));
    }
  }
}

TEST(Valuation, Rational) {
  EXPECT_EQ(p_adic_valuation(Rat(3, 8), Int(2)), -3);
  EXPECT_EQ(p_adic_valuation(Rat(12, 5), Int(2)), 2);
}

TEST(TripleGcd, Examples) {
  EXPECT_EQ(triple_gcd(126, 84, 35), 7);
  EXPECT_EQ(triple_gcd(1, 0, 0), 1);
  EXPECT_EQ(triple_gcd(-138, 207, 92), 23);
  EXPECT_THROW(triple_gcd(0, 0, 0), InvalidInput);
}

TEST(TripleGcd, DividesAndIsGreatest) {
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    const long a = static_cast<long>(rng() % 2001) - 1000, b = static_cast<long>(rng() % 2001) - 1000,
               c = static_cast<long>(rng() % 2001) - 1000;
    if (a == 0 && b == 0 && c == 0) continue;
    const Int g = triple_gcd(a, b, c);
    EXPECT_TRUE(divides(g, a) && divides(g, b) && divides(g, c));
    for (long d = 1; d <= 50; ++d)
      if (a % d == 0 && b % d == 0 && c % d == 0) {
        EXPECT_TRUE(divides(Int(d), g));
      }
  }
}

TEST(C3, Examples) {
  auto a = lemma23_C3(1, 1);
  EXPECT_TRUE(a.value.contains(Rat(1)));
  EXPECT_EQ(a.ceiling, 1);
  auto b = lemma23_C3(Rat(1, 8), 1);
  EXPECT_TRUE(b.value.contains(Rat(4)));
  EXPECT_EQ(b.ceiling, 4);
  auto c = lemma23_C3(Rat(1, 8), 8);
  EXPECT_TRUE(c.value.contains(Rat(16)));
  EXPECT_EQ(c.ceiling, 16);
  EXPECT_THROW(lemma23_C3(0, 1), InvalidInput);
}

TEST(C3, CeilingIsLeastUpperInteger) {
  for (long num = 1; num <= 40; ++num) {
    const Rat C(num, 17), C2(3 * num + 1, 5);
    const C3Bound b = lemma23_C3(C, C2);
    const Rat x = (C2 > 1 ? C2 : Rat(1)) / C;
    EXPECT_GE(Rat(b.ceiling * b.ceiling * b.ceiling), x * x);
    if (b.ceiling > 1) {
      EXPECT_LT(Rat((b.ceiling - 1) * (b.ceiling - 1) * (b.ceiling - 1)), x * x);
    }
    EXPECT_TRUE(b.value.hi_leq(Rat(b.ceiling)));
  }
}

TEST(G, Examples) {
  EXPECT_EQ(lemma23_G(1), 1);
  EXPECT_EQ(lemma23_G(3), 6);
  EXPECT_EQ(lemma23_G(6), 60);
  EXPECT_THROW(lemma23_G(0), InvalidInput);
}

TEST(G, DivisibleByEveryIntegerUpToK) {
  for (unsigned long k = 1; k <= 60; ++k) {
    const Int G = lemma23_G(Int(k));
    for (unsigned long i = 1; i <= k; ++i) EXPECT_TRUE(divides(Int(i), G));
  }
}

TEST(Divisors, Sorted) {
  EXPECT_EQ(divisors(12), (std::vector<Int>{1, 2, 3, 4, 6, 12}));
  EXPECT_EQ(divisors(1), (std::vector<Int>{1}));
}

TEST(ParseRational, Forms) {
  EXPECT_EQ(parse_rational("3/4"), Rat(3, 4));
  EXPECT_EQ(parse_rational("-7"), Rat(-7));
  EXPECT_EQ(parse_rational("0.25"), Rat(1, 4));
  EXPECT_EQ(parse_rational("2.5e-1"), Rat(1, 4));
  EXPECT_EQ(parse_rational("6/8"), Rat(3, 4));
  EXPECT_THROW(parse_rational(""), InvalidInput);
  EXPECT_THROW(parse_rational("abc"), InvalidInput);
  EXPECT_THROW(parse_rational("1/0"), InvalidInput);
}
