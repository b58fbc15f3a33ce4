#pragma once

// Units of the cubic field: bounded exhaustive search, normalization to a
// dominant unit (one complex pair) or a positive pair (totally real), and a
// certified independence constant for the positive pair.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "littlewood/cubic_field.hpp"
#include "littlewood/interval.hpp"

namespace littlewood {

struct Unit {
  FieldElement element;
  int norm_sign = 1;
  // log|x|, log|s1(x)|, log|s2(x)| at the precision they were computed
  std::array<Interval, 3> log_embedding;

  std::array<Interval, 3> logs(mpfr_prec_t prec) const {
    EmbeddingValues ev = embed(element, prec);
    return {littlewood::log(littlewood::abs(ev.id_value)), ev.conj1.log_abs(), ev.conj2.log_abs()};
  }
};

inline constexpr long kDefaultUnitSearchBound = 12;

/// Wraps a unit; rejects elements whose norm is not +-1.
inline Unit make_unit(const FieldElement& x, mpfr_prec_t prec = 128) {
  const Rat n = norm(x);
  if (n != 1 && n != -1) throw InvalidInput("not a unit: norm " + rat_str(n) + " of " + x.str());
  Unit u{x, n > 0 ? 1 : -1, {Interval(), Interval(), Interval()}};
  u.log_embedding = with_precision(prec, kMaxPrecision, [&](mpfr_prec_t p) { return u.logs(p); });
  return u;
}

/// Integer-coordinate units with max |c_i| <= bound, excluding rationals,
/// one representative per +-pair (first nonzero coordinate positive),
/// sorted by height then lexicographically.
inline std::vector<Unit> unit_search(const FieldPtr& field, long bound) {
  std::vector<IntTriple> hits;
  const Int f2 = field->f2(), f1 = field->f1(), f0 = field->f0();
  for (long a = -bound; a <= bound; ++a) {
    for (long b = -bound; b <= bound; ++b) {
      for (long c = -bound; c <= bound; ++c) {
        if (b == 0 && c == 0) continue;
        const long first = a != 0 ? a : b;
        if (first < 0) continue;
        IntTriple v{Int(a), Int(b), Int(c)};
        const Int n = char_coefficients(multiplication_matrix<Int>(v, f2, f1, f0))[2];
        if (n == 1 || n == -1) hits.push_back(v);
      }
    }
  }
  auto height = [](const IntTriple& v) { return std::max({abs(v[0]), abs(v[1]), abs(v[2])}); };
  std::sort(hits.begin(), hits.end(), [&](const IntTriple& x, const IntTriple& y) {
    const Int hx = height(x), hy = height(y);
    if (hx != hy) return hx < hy;
    return x < y;
  });
  std::vector<Unit> out;
  out.reserve(hits.size());
  for (const auto& v : hits) out.push_back(make_unit(FieldElement(field, v)));
  return out;
}

namespace detail {

inline void require_irrational(const Unit& u) {
  if (u.element.is_rational()) throw InvalidInput("unit must be irrational: " + u.element.str());
}

// -1 if |x| < 1, +1 if |x| > 1 under the identity embedding.
inline int compare_abs_to_one(const FieldElement& x, mpfr_prec_t cap) {
  try {
    return with_precision(64, cap, [&](mpfr_prec_t p) {
      Interval a = littlewood::abs(embed(x, p).id_value);
      Interval one = Interval::from_long(1, p);
      if (a.certainly_less(one)) return -1;
      if (a.certainly_greater(one)) return 1;
      throw Undecided("|x| not separated from 1");
    });
  } catch (const PrecisionExhausted& e) {
    throw CertificationFailure(std::string("cannot separate |u| from 1: ") + e.what());
  }
}

}  // namespace detail

/// u, u^{-1}, u^2 or u^{-2} with identity embedding certified > 1: invert if
/// |u| < 1, then square if negative.
inline Unit dominant_unit(const Unit& u, mpfr_prec_t cap = kMaxPrecision) {
  detail::require_irrational(u);
  FieldElement x = u.element;
  if (detail::compare_abs_to_one(x, cap) < 0) x = x.inverse();
  if (certified_sign(x, cap) < 0) x = x * x;
  return make_unit(x);
}

/// Totally real case: each unit is inverted when |u| < 1 and squared when any
/// of its three embeddings is negative.
inline std::pair<Unit, Unit> positive_pair(const Unit& u1, const Unit& u2, mpfr_prec_t cap = kMaxPrecision) {
  if (u1.element.field()->signature() != Signature::TotallyReal)
    throw InvalidInput("positive_pair requires a totally real field");
  auto normalize = [&](const Unit& u) {
    detail::require_irrational(u);
    FieldElement x = u.element;
    if (detail::compare_abs_to_one(x, cap) < 0) x = x.inverse();
    const bool all_positive = with_precision(64, cap, [&](mpfr_prec_t p) {
      EmbeddingValues ev = embed(x, p);
      return ev.id_value.sign() > 0 && ev.conj1.re.sign() > 0 && ev.conj2.re.sign() > 0;
    });
    if (!all_positive) x = x * x;
    return make_unit(x);
  };
  return {normalize(u1), normalize(u2)};
}

/// Certified enclosure of
///   M = |log e1 log s1(e2) - log e2 log s1(e1)| / |2 log s1(e2) + log e2|
/// with positive lower endpoint. Failure to separate the numerator from zero
/// at the cap is reported as suspected dependence.
inline Interval independence_check(const Unit& e1, const Unit& e2, mpfr_prec_t cap = kMaxPrecision) {
  if (e1.element.field()->signature() != Signature::TotallyReal)
    throw InvalidInput("independence_check requires a totally real field");
  try {
    return with_precision(64, cap, [&](mpfr_prec_t p) {
      auto l1 = e1.logs(p);
      auto l2 = e2.logs(p);
      Interval num = l1[0] * l2[1] - l2[0] * l1[1];
      Interval den = Interval::from_long(2, p) * l2[1] + l2[0];
      if (num.contains_zero() || den.contains_zero()) throw Undecided("independence numerator straddles zero");
      Interval m = littlewood::abs(num) / littlewood::abs(den);
      if (!m.certainly_positive()) throw Undecided("M not certified positive");
      return m;
    });
  } catch (const PrecisionExhausted& e) {
    throw CertificationFailure(std::string("units appear multiplicatively dependent: ") + e.what());
  }
}

/// Normalized unit with the least identity embedding among the search results.
inline Unit select_dominant_unit(const FieldPtr& field, long bound = kDefaultUnitSearchBound) {
  std::optional<Unit> best;
  double best_v = 0;
  for (const Unit& u : unit_search(field, bound)) {
    Unit d = dominant_unit(u);
    const double v = embed(d.element, 64).id_value.mid_double();
    if (!best || v < best_v) {
      best = d;
      best_v = v;
    }
  }
  if (!best) throw CertificationFailure("no irrational unit found with coordinates up to " + std::to_string(bound));
  return *best;
}

/// Units ordered by search height, then by normalized identity embedding:
/// e1 is the first, e2 the first one independent of it. The choice does not
/// change once the bound covers the two lowest heights.
inline std::pair<Unit, Unit> select_positive_pair(const FieldPtr& field, long bound = kDefaultUnitSearchBound) {
  struct Cand {
    Int height;
    double value;
    Unit unit;
  };
  std::vector<Cand> cands;
  for (const Unit& u : unit_search(field, bound)) {
    const FieldElement& x = u.element;
    Int h = 0;
    for (const Int& c : x.int_coords()) h = std::max(h, Int(abs(c)));
    Unit n = positive_pair(u, u).first;
    cands.push_back({h, embed(n.element, 64).id_value.mid_double(), n});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.height != b.height ? a.height < b.height : a.value < b.value;
  });
  if (cands.empty()) throw CertificationFailure("no irrational unit found with coordinates up to " + std::to_string(bound));
  const Unit& e1 = cands.front().unit;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    try {
      independence_check(e1, cands[i].unit, 4096);
      return {e1, cands[i].unit};
    } catch (const CertificationFailure&) {
    }
  }
  throw CertificationFailure("no independent pair of units found with coordinates up to " + std::to_string(bound));
}

}  // namespace littlewood
