#include <gtest/gtest.h>

#include <random>

#include "littlewood/padic.hpp"
#include "littlewood/units.hpp"

using namespace littlewood;

namespace {

FieldElement el(const FieldPtr& f, long a, long b, long c) { return FieldElement(f, IntTriple{Int(a), Int(b), Int(c)}); }

const std::array<Rat, 3> kFlat{Rat(0), Rat(0), Rat(0)};

// Perrin numbers by the plain recurrence, as an oracle for Tr(theta^n).
Int perrin(unsigned long n) {
  std::vector<Int> p{3, 0, 2};
  while (p.size() <= n) p.push_back(p[p.size() - 2] + p[p.size() - 3]);
  return p[n];
}

}  // namespace

TEST(NewtonPolygon, Examples) {
  const Rat third(1, 3);
  EXPECT_EQ(newton_polygon(CubicPoly{Rat(0), Rat(0), Rat(-2)}, 2).slopes, (std::array<Rat, 3>{third, third, third}));
  EXPECT_EQ(newton_polygon(CubicPoly{Rat(1), Rat(1), Rat(1)}, 3).slopes, kFlat);
  EXPECT_EQ(newton_polygon(CubicPoly{Rat(-2), Rat(1), Rat(-1)}, 2).slopes, kFlat);
}

TEST(NewtonPolygon, MixedSlopes) {
  // X^3 - 4X^2 + 2X + 8 at p = 2: points (0,3),(1,1),(2,2),(3,0)
  const NewtonPolygon np = newton_polygon(CubicPoly{Rat(-4), Rat(2), Rat(8)}, 2);
  Rat sum = 0;
  for (const Rat& s : np.slopes) sum += s;
  EXPECT_EQ(sum, 3);
  EXPECT_LE(np.slopes[0], np.slopes[1]);
  EXPECT_LE(np.slopes[1], np.slopes[2]);
}

TEST(NewtonPolygon, UnitsHaveFlatPolygons) {
  for (const char* p : {"x^3-x-1", "x^3-3x-1"}) {
    const FieldPtr f = field_create(p);
    for (const Unit& u : unit_search(f, 3))
      for (long q : {2, 3, 5, 7, 11, 13}) EXPECT_EQ(newton_polygon(char_poly(u.element), q).slopes, kFlat) << u.element.str();
  }
}

TEST(NewtonPolygon, SlopeSumIsValuationOfNorm) {
  std::mt19937 rng(8);
  for (const char* p : {"x^3-x-1", "x^3-3x-1"}) {
    const FieldPtr f = field_create(p);
    int tested = 0;
    while (tested < 200) {
      auto r = [&] { return static_cast<long>(rng() % 41) - 20; };
      const FieldElement x = el(f, r(), r(), r());
      if (x.is_zero()) continue;
      ++tested;
      for (long q : {2, 3, 5, 7}) {
        const NewtonPolygon np = newton_polygon(char_poly(x), q);
        EXPECT_EQ(np.finite_sum(), Rat(p_adic_valuation(norm(x), Int(q))));
      }
    }
  }
}

TEST(RootValuation, Examples) {
  const FieldPtr f = field_create("x^3-x-1");
  const FieldElement t = FieldElement::theta(f);
  const Lemma31Report r = check_lemma31(t, 2, 1);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.exponent, 126);
  for (const Rat& v : r.valuations) EXPECT_GT(v, 0);
  const Lemma31Report one = check_lemma31(FieldElement::rational(f, 1), 3, 2);
  EXPECT_TRUE(one.vacuous);
  EXPECT_TRUE(one.holds);
  EXPECT_THROW(check_lemma31(t, 2, 0), InvalidInput);
  EXPECT_THROW(check_lemma31(t, 4, 1), InvalidInput);
  EXPECT_THROW(check_lemma31(el(f, 2, 0, 0), 2, 1), InvalidInput);
}

TEST(RootValuation, ExactAndModularAgree) {
  const FieldPtr f = field_create("x^3-3x-1");
  for (const Unit& u : unit_search(f, 2)) {
    for (long p : {2, 3, 5}) {
      const Lemma31Report exact = check_lemma31(u.element, p, 1);
      const Lemma31Report mod = check_lemma31(u.element, p, 1, 0);
      ASSERT_TRUE(exact.exact);
      ASSERT_FALSE(mod.exact);
      EXPECT_EQ(exact.holds, mod.holds);
      for (int j = 0; j < 3; ++j)
        if (!mod.lower_bound_only[j]) {
          EXPECT_EQ(exact.valuations[j], mod.valuations[j]);
        }
    }
  }
}

TEST(RootValuation, SharpenedForLargePrimes) {
  const FieldPtr f = field_create("x^3-x-1");
  for (const Unit& u : unit_search(f, 2))
    for (unsigned long nu = 1; nu <= 2; ++nu) {
      const Lemma31Report r = check_lemma31(u.element, 5, nu);
      EXPECT_TRUE(r.holds);
      EXPECT_TRUE(r.sharpened);
    }
}

TEST(TraceDivisibility, Examples) {
  const FieldPtr f = field_create("x^3-x-1");
  const FieldElement t = FieldElement::theta(f);
  const Lemma32Report a = check_lemma32(t, t, 2);
  EXPECT_TRUE(a.holds);
  EXPECT_EQ(a.trace, perrin(127));
  EXPECT_TRUE(check_lemma32(t, t, 1).holds);
  const Lemma32Report g = check_lemma32(el(f, 4, 9, -6), t, 3);
  EXPECT_TRUE(g.holds);
  EXPECT_EQ(g.residue, 0);
  EXPECT_THROW(check_lemma32(t * t, t, 2), HypothesisViolation);
  EXPECT_THROW(check_lemma32(Rat(1, 2) * t, t, 2), HypothesisViolation);
  EXPECT_THROW(check_lemma32(t, t, 0), InvalidInput);
}

TEST(TracePowerMod, Examples) {
  const FieldPtr f = field_create("x^3-x-1");
  const FieldElement t = FieldElement::theta(f);
  EXPECT_EQ(trace_power_mod(FieldElement::rational(f, 1), 0, 5), 3);
  EXPECT_EQ(trace_power_mod(t, 126, 2), 0);
  EXPECT_EQ(trace_power_mod(t, 4, 100), 5);
  EXPECT_THROW(trace_power_mod(t, 4, 0), InvalidInput);
  EXPECT_THROW(trace_power_mod(t, -1, 7), InvalidInput);
}

TEST(TracePowerMod, AgreesWithExactTraces) {
  for (const char* p : {"x^3-x-1", "x^3-3x-1"}) {
    const FieldPtr f = field_create(p);
    const FieldElement t = FieldElement::theta(f);
    const FieldElement x = el(f, 4, 9, -6), z = el(f, 1, 1, 0);
    for (long n = 0; n <= 200; ++n) {
      for (long m : {2L, 3L, 7L, 12L, 1000003L}) {
        EXPECT_EQ(trace_power_mod(x, n, m), mod_floor(trace(x * elem_pow(t, n)).get_num(), m));
        EXPECT_EQ(trace_mul_power_mod(*f, x.int_coords(), z.int_coords(), n, m),
                  mod_floor(trace(x * elem_pow(z, n)).get_num(), m));
      }
    }
  }
}

TEST(TracePowerMod, PerrinOracle) {
  const FieldPtr f = field_create("x^3-x-1");
  const FieldElement one = FieldElement::rational(f, 1);
  for (unsigned long n = 0; n <= 200; ++n) EXPECT_EQ(trace_power_mod(one, Int(n), Int(1000000007)), mod_floor(perrin(n), 1000000007));
}
