#include <gtest/gtest.h>

#include "littlewood/units.hpp"

using namespace littlewood;

namespace {

FieldElement el(const FieldPtr& f, long a, long b, long c) { return FieldElement(f, IntTriple{Int(a), Int(b), Int(c)}); }

bool found(const std::vector<Unit>& us, const FieldElement& x) {
  for (const Unit& u : us)
    if (u.element == x || u.element == -x) return true;
  return false;
}

}  // namespace

TEST(UnitSearch, Examples) {
  const FieldPtr a = field_create("x^3-x-1");
  EXPECT_TRUE(found(unit_search(a, 1), FieldElement::theta(a)));
  const FieldPtr b = field_create("x^3-3x-1");
  const auto ub = unit_search(b, 1);
  EXPECT_TRUE(found(ub, FieldElement::theta(b)));
  EXPECT_TRUE(found(ub, el(b, 1, 1, 0)));
  EXPECT_TRUE(unit_search(a, 0).empty());
}

TEST(UnitSearch, AllResultsAreIrrationalUnits) {
  for (const char* p : {"x^3-x-1", "x^3-3x-1"}) {
    const FieldPtr f = field_create(p);
    const auto us = unit_search(f, 3);
    EXPECT_FALSE(us.empty());
    for (const Unit& u : us) {
      EXPECT_EQ(abs(norm(u.element)), 1);
      EXPECT_EQ(u.norm_sign, sgn(norm(u.element)));
      EXPECT_FALSE(u.element.is_rational());
      EXPECT_TRUE(u.element.has_integer_coords());
    }
  }
}

TEST(MakeUnit, RejectsNonUnits) {
  const FieldPtr f = field_create("x^3-x-1");
  EXPECT_THROW(make_unit(el(f, 2, 0, 0)), InvalidInput);
  EXPECT_THROW(make_unit(el(f, 2, 1, 0)), InvalidInput);  // norm 7
}

TEST(DominantUnit, Examples) {
  const FieldPtr f = field_create("x^3-x-1");
  const FieldElement t = FieldElement::theta(f);
  EXPECT_EQ(dominant_unit(make_unit(t)).element, t);
  EXPECT_EQ(dominant_unit(make_unit(t.inverse())).element, t);
  EXPECT_EQ(dominant_unit(make_unit(-t)).element, t * t);
  EXPECT_THROW(dominant_unit(make_unit(FieldElement::rational(f, 1))), InvalidInput);
}

TEST(DominantUnit, ExceedsOneAndInverts) {
  const FieldPtr f = field_create("x^3-x-1");
  for (const Unit& u : unit_search(f, 3)) {
    const Unit d = dominant_unit(u);
    EXPECT_EQ(d.element * d.element.inverse(), FieldElement::rational(f, 1));
    EXPECT_TRUE(embed(d.element, 128).id_value.certainly_greater(Interval::from_long(1, 128)));
  }
}

TEST(PositivePair, Examples) {
  const FieldPtr f = field_create("x^3-3x-1");
  const FieldElement t = FieldElement::theta(f), t1 = el(f, 1, 1, 0);
  auto [a, b] = positive_pair(make_unit(t), make_unit(t1));
  EXPECT_EQ(a.element, t * t);
  EXPECT_EQ(b.element, t1 * t1);
  auto [c, d] = positive_pair(a, b);
  EXPECT_EQ(c.element, a.element);
  EXPECT_EQ(d.element, b.element);
  auto [e, g] = positive_pair(make_unit(t.inverse()), make_unit(t1));
  EXPECT_EQ(e.element, t * t);
  EXPECT_EQ(g.element, t1 * t1);
  const FieldPtr plastic = field_create("x^3-x-1");
  const Unit p = make_unit(FieldElement::theta(plastic));
  EXPECT_THROW(positive_pair(p, p), InvalidInput);
}

TEST(PositivePair, AllEmbeddingsPositive) {
  const FieldPtr f = field_create("x^3-3x-1");
  const auto us = unit_search(f, 2);
  for (std::size_t i = 0; i + 1 < us.size(); i += 2) {
    auto [a, b] = positive_pair(us[i], us[i + 1]);
    for (const Unit& u : {a, b}) {
      const EmbeddingValues ev = embed(u.element, 128);
      EXPECT_TRUE(ev.id_value.certainly_positive());
      EXPECT_TRUE(ev.conj1.re.certainly_positive());
      EXPECT_TRUE(ev.conj2.re.certainly_positive());
      EXPECT_TRUE(ev.id_value.certainly_greater(Interval::from_long(1, 128)));
    }
  }
}

TEST(Independence, Examples) {
  const FieldPtr f = field_create("x^3-3x-1");
  const FieldElement t = FieldElement::theta(f), t1 = el(f, 1, 1, 0);
  const Unit a = make_unit(t * t), b = make_unit(t1 * t1);
  EXPECT_TRUE(independence_check(a, b).certainly_positive());
  EXPECT_THROW(independence_check(a, a, 1024), CertificationFailure);
  EXPECT_THROW(independence_check(a, make_unit(a.element * a.element), 1024), CertificationFailure);
}

TEST(LogEmbedding, Additive) {
  const FieldPtr f = field_create("x^3-x-1");
  const Unit u = make_unit(el(f, 1, 1, 0));
  for (long a : {1L, 2L, 5L})
    for (long b : {-1L, 3L}) {
      const Unit v = make_unit(elem_pow(u.element, a + b));
      const auto lu = u.logs(256), lv = v.logs(256);
      for (int j = 0; j < 3; ++j) EXPECT_TRUE(lv[j].overlaps(lu[j].scaled(Int(a + b)))) << a << " " << b << " " << j;
    }
}

TEST(Selection, PositivePairStableInBound) {
  const FieldPtr f = field_create("x^3-3x-1");
  const auto [a3, b3] = select_positive_pair(f, 3);
  const auto [a12, b12] = select_positive_pair(f, 12);
  EXPECT_EQ(a3.element, a12.element);
  EXPECT_EQ(b3.element, b12.element);
  EXPECT_TRUE(independence_check(a3, b3).certainly_positive());
}

TEST(Selection, DominantUnitOfPlasticField) {
  const FieldPtr f = field_create("x^3-x-1");
  const Unit u = select_dominant_unit(f, 3);
  EXPECT_TRUE(embed(u.element, 128).id_value.certainly_greater(Interval::from_long(1, 128)));
  EXPECT_THROW(select_dominant_unit(f, 0), CertificationFailure);
}
