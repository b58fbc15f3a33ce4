#pragma once

// JSON form of an LdivWitness and an independent re-certification of a
// stored witness. Exact integers are decimal strings; certified reals are
// [lo, hi] string pairs rounded outward.
//
// Verification evaluates Q^{1/2}|Q w - W| directly when 2 bits(Q) fits under
// the precision cap. Larger trace-construction witnesses carry gamma, zeta and
// the exponent N; then (Q, R, S) are recomputed exactly as traces of
// gamma zeta^N and the bounds come from the two conjugate terms.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "littlewood/cubic_field.hpp"
#include "littlewood/peck.hpp"

namespace littlewood {

using json = nlohmann::ordered_json;

inline json interval_json(const Interval& x) { return json::array({x.lo_str(17), x.hi_str(17)}); }

inline json witness_to_json(const LdivWitness& w) {
  json j;
  j["field"] = w.alpha.field()->poly_str();
  j["alpha"] = w.alpha.str();
  j["beta"] = w.beta.str();
  if (w.provenance == Provenance::Thm13Search)
    j["gamma"] = nullptr;
  else
    j["gamma"] = w.gamma.str();
  j["D"] = w.D.get_str();
  j["D_factor"] = w.D_factor.get_str();
  j["eps"] = rat_str(w.eps);
  j["Q"] = w.Q.get_str();
  j["R"] = w.R.get_str();
  j["S"] = w.S.get_str();
  j["gcd_before_reduction"] = w.gcd_before.get_str();
  j["bounds"] = {{"alpha", interval_json(w.cert.alpha_bound)},
                 {"beta", interval_json(w.cert.beta_bound)},
                 {"logQ", interval_json(w.cert.logQ)}};
  j["provenance"] = provenance_name(w.provenance);
  j["precision_bits"] = static_cast<long>(w.precision_bits);
  j["modulus"] = w.modulus.get_str();
  j["gcd_factor"] = w.gcd_factor.get_str();
  j["exponent"] = w.exponent.get_str();
  if (w.zeta && w.provenance != Provenance::Thm13Search) j["zeta"] = w.zeta->str();
  if (w.provenance == Provenance::PeckA) j["m"] = w.m.get_str();
  if (w.provenance == Provenance::PeckB) j["m"] = json::array({w.m1.get_str(), w.m2.get_str()});
  json checks = json::array();
  for (const auto& c : w.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  return j;
}

/// The fields of a witness file that verification relies on.
struct StoredWitness {
  std::string field;
  std::string alpha, beta;
  Int D, Q, R, S;
  Rat eps;
  std::array<Rat, 2> alpha_bound, beta_bound, logQ;
  std::string provenance;
  // construction data, present for trace-construction witnesses
  std::optional<std::string> gamma, zeta;
  std::optional<Int> exponent, gcd_before;
};

namespace detail {

inline const json& require_key(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("witness JSON lacks '") + key + "'");
  return j.at(key);
}

inline Int json_int(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_string()) throw InvalidInput(std::string("'") + key + "' must be a decimal string");
  const Rat r = parse_rational(v.get<std::string>());
  if (r.get_den() != 1) throw InvalidInput(std::string("'") + key + "' is not an integer");
  return r.get_num();
}

inline std::array<Rat, 2> json_pair(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
    throw InvalidInput(std::string("'") + key + "' must be a [lo, hi] pair of strings");
  std::array<Rat, 2> r{parse_rational(v[0].get<std::string>()), parse_rational(v[1].get<std::string>())};
  if (r[0] > r[1]) throw InvalidInput(std::string("'") + key + "' has lo > hi");
  return r;
}

}  // namespace detail

inline StoredWitness witness_from_json(const json& j) {
  StoredWitness w;
  auto str = [&](const char* k) {
    const json& v = detail::require_key(j, k);
    if (!v.is_string()) throw InvalidInput(std::string("'") + k + "' must be a string");
    return v.get<std::string>();
  };
  w.field = str("field");
  w.alpha = str("alpha");
  w.beta = str("beta");
  w.D = detail::json_int(j, "D");
  w.Q = detail::json_int(j, "Q");
  w.R = detail::json_int(j, "R");
  w.S = detail::json_int(j, "S");
  w.eps = parse_rational(str("eps"));
  const json& b = detail::require_key(j, "bounds");
  w.alpha_bound = detail::json_pair(b, "alpha");
  w.beta_bound = detail::json_pair(b, "beta");
  w.logQ = detail::json_pair(b, "logQ");
  w.provenance = str("provenance");
  parse_provenance(w.provenance);
  auto opt_str = [&](const char* k) -> std::optional<std::string> {
    if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
    return str(k);
  };
  w.gamma = opt_str("gamma");
  w.zeta = opt_str("zeta");
  if (j.contains("exponent")) w.exponent = detail::json_int(j, "exponent");
  if (j.contains("gcd_before_reduction")) w.gcd_before = detail::json_int(j, "gcd_before_reduction");
  return w;
}

inline StoredWitness load_witness(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open witness file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("malformed witness JSON: " + std::string(e.what()));
  }
  return witness_from_json(j);
}

struct VerifyReport {
  bool ok = false;
  std::vector<CheckRecord> checks;
  Interval alpha_value, beta_value, logQ;
  mpfr_prec_t precision = 0;
};

namespace detail {

inline bool decide_upper(const Interval& x, const Rat& bound) {
  if (x.hi_leq(bound)) return true;
  if (x.lo_greater(bound)) return false;
  throw Undecided("value not separated from the stored bound");
}

inline bool decide_log_enclosure(const Interval& l, const std::array<Rat, 2>& stored) {
  bool ok = decide_upper(l, stored[1]);
  if (ok && !l.lo_geq(stored[0])) {
    if (!l.hi_less(stored[0])) throw Undecided("log Q not separated from the stored lower bound");
    ok = false;
  }
  return ok;
}

struct BoundEval {
  Interval a, b, l;
  mpfr_prec_t p = 0;
  bool a_ok = false, b_ok = false, l_ok = false;
};

inline bool has_construction(const StoredWitness& s) { return s.gamma && s.zeta && s.exponent && s.gcd_before; }

// Q^{1/2}|Q w - W| evaluated from Q, W at about 2 bits(Q) bits.
inline BoundEval direct_bounds(const StoredWitness& s, const FieldElement& alpha, const FieldElement& beta,
                               mpfr_prec_t cap) {
  const mpfr_prec_t p0 =
      std::max<mpfr_prec_t>(128, static_cast<mpfr_prec_t>(2 * mpz_sizeinbase(s.Q.get_mpz_t(), 2)) + 96);
  return with_precision(
      p0, cap,
      [&](mpfr_prec_t p) {
        const EmbeddingValues ea = embed(alpha, p), eb = embed(beta, p);
        const Interval Q = Interval::from_int(s.Q, p);
        const Interval sq = littlewood::sqrt(Q);
        BoundEval e;
        e.a = sq * littlewood::abs(Q * ea.id_value - Interval::from_int(s.R, p));
        e.b = sq * littlewood::abs(Q * eb.id_value - Interval::from_int(s.S, p));
        e.l = littlewood::log(Q);
        e.p = p;
        e.a_ok = decide_upper(e.a, s.alpha_bound[1]);
        e.b_ok = decide_upper(e.b, s.beta_bound[1]);
        e.l_ok = decide_log_enclosure(e.l, s.logQ);
        return e;
      },
      "re-certifying the stored bounds");
}

// g (Q w - W) = sum_{j=1,2} s_j(gamma) (w - s_j(w)) s_j(zeta)^N, g the removed gcd.
inline BoundEval conjugate_side_bounds(const StoredWitness& s, const FieldElement& alpha, const FieldElement& beta,
                                       const FieldElement& gamma, const FieldElement& zeta, mpfr_prec_t cap) {
  const Int& N = *s.exponent;
  const bool real = alpha.field()->signature() == Signature::TotallyReal;
  const mpfr_prec_t p0 = std::max<mpfr_prec_t>(128, static_cast<mpfr_prec_t>(mpz_sizeinbase(N.get_mpz_t(), 2)) + 96);
  return with_precision(
      p0, cap,
      [&](mpfr_prec_t p) {
        const EmbeddingValues eg = embed(gamma, p), ez = embed(zeta, p);
        const Interval n = Interval::from_int(N, p);
        const Interval half = Interval::from_rat(Rat(1, 2), p);
        BoundEval e;
        e.p = p;
        e.l = littlewood::log(Interval::from_int(s.Q, p));
        const Interval log_g = littlewood::log(Interval::from_int(*s.gcd_before, p));
        auto bound_for = [&](const FieldElement& x) {
          const EmbeddingValues ex = embed(x, p);
          std::vector<PolarTerm> terms;
          for (int j = 1; j <= 2; ++j) {
            const ComplexBox c = eg.conj(j) * (ex.id_box() - ex.conj(j));
            const ComplexBox& z = ez.conj(j);
            PolarTerm t;
            if (real) {
              t.real = true;
              const int zs = (z.re.sign() < 0 && mpz_odd_p(N.get_mpz_t())) ? -1 : 1;
              t.sign = c.re.sign() * zs;
              t.logmod = littlewood::log(littlewood::abs(c.re)) + n * littlewood::log(littlewood::abs(z.re));
            } else {
              t.logmod = c.log_abs() + n * z.log_abs();
              t.angle = c.arg() + n * z.arg();
            }
            terms.push_back(t);
          }
          return littlewood::exp(e.l * half + log_abs_sum(terms, p) - log_g);
        };
        e.a = bound_for(alpha);
        e.b = bound_for(beta);
        e.a_ok = decide_upper(e.a, s.alpha_bound[1]);
        e.b_ok = decide_upper(e.b, s.beta_bound[1]);
        e.l_ok = decide_log_enclosure(e.l, s.logQ);
        return e;
      },
      "re-certifying the stored bounds from the conjugates");
}

}  // namespace detail

/// Recomputes everything a witness claims from (field, alpha, beta, D, Q, R, S):
/// Q > 0, D | Q, D | R, gcd 1, and the stored bounds enclose the recomputed
/// Q^{1/2}|Q alpha - R|, Q^{1/2}|Q beta - S| and log Q from above (and log Q
/// from below). Witnesses too large for direct evaluation are checked through
/// their stored construction instead.
inline VerifyReport verify_witness(const StoredWitness& s, mpfr_prec_t cap = kMaxPrecision) {
  const FieldPtr f = field_create(s.field);
  const FieldElement alpha = parse_element(f, s.alpha), beta = parse_element(f, s.beta);
  if (s.D < 1) throw InvalidInput("D must be >= 1");
  VerifyReport rep;
  auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
    rep.checks.push_back({name, ok, detail});
  };
  check("Q_positive", s.Q > 0);
  check("D_divides_Q", divides(s.D, s.Q));
  check("D_divides_R", divides(s.D, s.R));
  const Int g = triple_gcd(s.Q, s.R, s.S);
  check("gcd_one", g == 1, "gcd = " + g.get_str());
  if (s.Q > 0) {
    const mpfr_prec_t direct_prec = static_cast<mpfr_prec_t>(2 * mpz_sizeinbase(s.Q.get_mpz_t(), 2)) + 96;
    std::optional<detail::BoundEval> e;
    if (direct_prec > cap && detail::has_construction(s)) {
      const FieldElement gamma = parse_element(f, *s.gamma), zeta = parse_element(f, *s.zeta);
      if (*s.exponent < 0) throw InvalidInput("exponent must be >= 0");
      if (*s.gcd_before < 1) throw InvalidInput("gcd_before_reduction must be >= 1");
      const FieldElement Z = elem_pow(zeta, *s.exponent);
      const std::array<Int, 3> want{*s.gcd_before * s.Q, *s.gcd_before * s.R, *s.gcd_before * s.S};
      const std::array<FieldElement, 3> xs{gamma, gamma * alpha, gamma * beta};
      bool same = true;
      for (int k = 0; k < 3; ++k) same = same && trace(xs[k] * Z) == Rat(want[k]);
      check("traces_match_construction", same, "g = " + s.gcd_before->get_str() + ", N = " + s.exponent->get_str());
      if (same) e = detail::conjugate_side_bounds(s, alpha, beta, gamma, zeta, cap);
    } else {
      e = detail::direct_bounds(s, alpha, beta, cap);
    }
    if (e) {
      rep.alpha_value = e->a;
      rep.beta_value = e->b;
      rep.logQ = e->l;
      rep.precision = e->p;
      check("alpha_bound", e->a_ok, e->a.str(8) + " <= " + rat_str(s.alpha_bound[1]));
      check("beta_bound", e->b_ok, e->b.str(8) + " <= " + rat_str(s.beta_bound[1]));
      check("logQ_enclosure", e->l_ok, e->l.str(8));
    }
  }
  rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckRecord& c) { return c.passed; });
  return rep;
}

}  // namespace littlewood
