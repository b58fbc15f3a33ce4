#pragma once

// Trace construction of approximation triples (Q, R, S) to a basis pair
// (alpha, beta) of a cubic field, with Q = R = 0 mod D:
//   Q = Tr(gamma zeta^N), R = Tr(gamma alpha zeta^N), S = Tr(gamma beta zeta^N),
// N = psi(D). Case a (one real embedding) takes zeta = eta^m with m from a
// Dirichlet step on the argument of the complex conjugate; case b (totally
// real) takes zeta = e1^m1 e2^m2 with (m1, m2) from a Dirichlet step on a
// log-embedding ratio. All inequalities are certified with interval
// arithmetic; Q, R, S are exact.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "littlewood/cubic_field.hpp"
#include "littlewood/numtheory.hpp"
#include "littlewood/units.hpp"

namespace littlewood {

enum class Provenance { PeckA, PeckB, Thm13Search };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::PeckA:
      return "peck-a";
    case Provenance::PeckB:
      return "peck-b";
    default:
      return "thm13-search";
  }
}

inline Provenance parse_provenance(const std::string& s) {
  if (s == "peck-a") return Provenance::PeckA;
  if (s == "peck-b") return Provenance::PeckB;
  if (s == "thm13-search") return Provenance::Thm13Search;
  throw InvalidInput("unknown provenance '" + s + "'");
}

struct CheckRecord {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct WitnessCert {
  bool Q_pos = false;
  bool div_ok = false;
  Int gcd_value = 1;
  Interval alpha_bound;  // Q^{1/2} |Q alpha - R|
  Interval beta_bound;   // Q^{1/2} |Q beta - S|
  Interval logQ;
};

struct LdivWitness {
  LdivWitness(FieldElement a, FieldElement b, FieldElement g)
      : alpha(std::move(a)), beta(std::move(b)), gamma(std::move(g)) {}

  FieldElement alpha, beta, gamma;
  Int Q, R, S;
  Int D = 1;            // requested modulus
  Int modulus = 1;      // D * D_factor * gcd_factor, the modulus the triple was built for
  Int D_factor = 1;     // enlargement for the large-D conditions
  Int gcd_factor = 1;   // extra factor absorbed by the gcd reduction
  Rat eps = 1;
  Provenance provenance = Provenance::PeckA;
  WitnessCert cert;
  Int gcd_before = 1;
  mpfr_prec_t precision_bits = 0;
  double seconds = 0;

  Int exponent = 0;  // psi(modulus) for the trace construction
  Int m = 0, m1 = 0, m2 = 0;
  std::optional<FieldElement> zeta;
  std::vector<CheckRecord> checks;

  bool check_passed(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c.passed;
    return false;
  }
};

struct PeckOptions {
  mpfr_prec_t prec_cap = kMaxPrecision;
  long max_factor = 64;
  // refuse constructions whose Q would exceed this many bits
  double max_log2_Q = 4.0e9;
};

/// Largest unit fraction <= eps; eps must lie in (0, 1].
inline Rat snap_eps(const Rat& eps, bool* snapped = nullptr) {
  if (eps <= 0 || eps > 1) throw InvalidInput("eps must lie in (0, 1], got " + rat_str(eps));
  Int n;
  Rat inv = 1 / eps;
  mpz_cdiv_q(n.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
  Rat out(Int(1), n);
  if (snapped) *snapped = out != eps;
  return out;
}

inline Int eps_inverse(const Rat& eps) {
  if (eps.get_num() != 1) throw InvalidInput("1/eps must be an integer, got eps = " + rat_str(eps));
  return eps.get_den();
}

// -- continued fractions ----------------------------------------------------

struct Convergent {
  Int p, q;
};

/// Convergents shared by every real in [lo, hi], in order. `next_q_min` is a
/// lower bound for the denominator of the first convergent not returned
/// (0 when the expansion of the whole interval terminated).
struct ConvergentRun {
  std::vector<Convergent> convergents;
  Int next_q_min = 0;
  bool terminated = false;
};

inline ConvergentRun certified_convergents(Rat lo, Rat hi, const Int& q_limit) {
  ConvergentRun run;
  Int p_prev = 1, q_prev = 0, p_prev2 = 0, q_prev2 = 1;
  for (;;) {
    Int a_lo, a_hi;
    mpz_fdiv_q(a_lo.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(a_hi.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    if (a_lo != a_hi) {
      // every x in the interval has a partial quotient >= min(a_lo, a_hi) here
      const Int a = std::min(a_lo, a_hi);
      run.next_q_min = std::max(Int(1), a) * q_prev + q_prev2;
      return run;
    }
    const Int p = a_lo * p_prev + p_prev2;
    const Int q = a_lo * q_prev + q_prev2;
    run.convergents.push_back({p, q});
    if (q > q_limit) {
      run.next_q_min = q;
      return run;
    }
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p;
    q_prev = q;
    const Rat f_lo = lo - Rat(a_lo), f_hi = hi - Rat(a_hi);
    if (f_lo == 0 && f_hi == 0) {
      run.terminated = true;
      return run;
    }
    if (f_lo == 0 || f_hi == 0) {
      // one endpoint stops here; others continue with arbitrarily large quotients
      run.next_q_min = q_prev + q_prev2;
      return run;
    }
    // the map x -> 1/frac(x) reverses order
    Rat nlo = 1 / f_hi, nhi = 1 / f_lo;
    lo = nlo;
    hi = nhi;
  }
}

using RealFn = std::function<Interval(mpfr_prec_t)>;

struct DirichletSolution {
  Int m = 0;          // case a
  Int m1 = 0, m2 = 0; // case b
  Interval distance;  // certified ||m x|| or |m1 L1 + m2 L2|
  Interval target;    // eps, or |L2| / bound
  mpfr_prec_t precision = 0;
};

namespace detail {

// ||y|| with a certificate that the nearest integer is unique across y.
inline std::optional<Interval> dist_to_nearest(const Interval& y) {
  const Rat mid = y.mid_rat();
  Int k;
  Rat shifted = mid + Rat(1, 2);
  mpz_fdiv_q(k.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  Interval d = littlewood::abs(y - Interval::from_int(k, y.precision()));
  if (!d.hi_less(Rat(1, 2))) return std::nullopt;
  return d;
}

}  // namespace detail

/// m in [1, 1/eps] with certified ||m x|| < eps: the largest continued-fraction
/// denominator <= 1/eps, else the best certified m from a scan.
inline DirichletSolution dirichlet_angle(const RealFn& x, const Rat& eps, mpfr_prec_t start = 64,
                                         mpfr_prec_t cap = kMaxPrecision) {
  const Int n = eps_inverse(eps);
  if (n < 1) throw InvalidInput("eps must lie in (0, 1]");
  return with_precision(
      start, cap,
      [&](mpfr_prec_t prec) {
        DirichletSolution sol;
        sol.precision = prec;
        sol.target = Interval::from_rat(eps, prec);
        if (n == 1) {
          // ||x|| <= 1/2 < 1
          sol.m = 1;
          sol.distance = Interval::hull(Rat(0), Rat(1, 2), prec);
          return sol;
        }
        const Interval xv = x(prec);
        const ConvergentRun run = certified_convergents(xv.lo_rat(), xv.hi_rat(), n);
        std::optional<Int> best;
        for (const auto& c : run.convergents)
          if (c.q >= 1 && c.q <= n) best = c.q;
        const bool complete = run.terminated || run.next_q_min > n;
        if (best && complete) {
          auto d = detail::dist_to_nearest(Interval::from_int(*best, prec) * xv);
          if (d && d->hi_less(eps)) {
            sol.m = *best;
            sol.distance = *d;
            return sol;
          }
        }
        if (n <= 1000000) {
          std::optional<Interval> best_d;
          for (Int m = 1; m <= n; ++m) {
            auto d = detail::dist_to_nearest(Interval::from_int(m, prec) * xv);
            if (!d || !d->hi_less(eps)) continue;
            if (!best_d || mpfr_less_p(d->hi(), best_d->hi())) {
              best_d = *d;
              sol.m = m;
            }
          }
          if (best_d) {
            sol.distance = *best_d;
            return sol;
          }
        }
        throw Undecided("no multiple certified within eps");
      },
      "solving the Dirichlet angle step");
}

inline DirichletSolution dirichlet_angle(const Interval& x, const Rat& eps) {
  return dirichlet_angle([&](mpfr_prec_t) { return x; }, eps, x.precision(), x.precision());
}

/// (m1, m2) with 0 < m1 < bound and |m1 L1 + m2 L2| <= |L2| / bound: the
/// first convergent p/q of L1/L2 meeting the bound gives (q, -p).
inline DirichletSolution dirichlet_pair(const std::function<std::pair<Interval, Interval>(mpfr_prec_t)>& L,
                                        const Rat& bound, mpfr_prec_t start = 64,
                                        mpfr_prec_t cap = kMaxPrecision) {
  if (bound <= 1) throw InvalidInput("dirichlet_pair: bound must exceed 1, got " + rat_str(bound));
  Int q_limit;
  mpz_cdiv_q(q_limit.get_mpz_t(), bound.get_num_mpz_t(), bound.get_den_mpz_t());
  return with_precision(
      start, cap,
      [&](mpfr_prec_t prec) {
        auto [l1, l2] = L(prec);
        if (l2.contains_zero()) throw Undecided("L2 not separated from zero");
        const Interval x = l1 / l2;
        const Interval target = littlewood::abs(l2) / Interval::from_rat(bound, prec);
        const ConvergentRun run = certified_convergents(x.lo_rat(), x.hi_rat(), q_limit);
        for (const auto& c : run.convergents) {
          if (c.q < 1 || Rat(c.q) >= bound) continue;
          Interval form = littlewood::abs(Interval::from_int(c.q, prec) * l1 - Interval::from_int(c.p, prec) * l2);
          if (form.certainly_less_eq(target)) {
            DirichletSolution sol;
            sol.m1 = c.q;
            sol.m2 = -c.p;
            sol.distance = form;
            sol.target = target;
            sol.precision = prec;
            return sol;
          }
          if (!form.certainly_greater(target)) throw Undecided("linear form undecided against bound");
        }
        throw Undecided("no certified convergent within the bound");
      },
      "solving the Dirichlet pair step");
}

inline DirichletSolution dirichlet_pair(const Interval& l1, const Interval& l2, const Rat& bound) {
  return dirichlet_pair([&](mpfr_prec_t) { return std::make_pair(l1, l2); }, bound, l1.precision(),
                        l1.precision());
}

// -- certified embedding data ----------------------------------------------

namespace detail {

inline mpfr_prec_t bits_for(const Int& n) {
  return static_cast<mpfr_prec_t>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

inline Interval log_of_int(const Int& q, mpfr_prec_t prec) {
  return littlewood::log(Interval::from_int(q, prec));
}

// One conjugate term c * z^N in log-polar form.
struct PolarTerm {
  Interval logmod;
  Interval angle;  // meaningful when !real
  bool real = false;
  int sign = 1;    // when real
};

// log |sum_j terms_j|, or Undecided when the sum is not separated from zero.
inline Interval log_abs_sum(const std::vector<PolarTerm>& terms, mpfr_prec_t prec) {
  const Interval r = Interval::from_rat(terms.front().logmod.mid_rat(), prec);
  ComplexBox sum = ComplexBox::real(Interval(prec));
  for (const auto& t : terms) {
    Interval mag = littlewood::exp(t.logmod - r);
    if (t.real) {
      sum = sum + ComplexBox::real(t.sign > 0 ? mag : -mag);
    } else {
      sum = sum + ComplexBox::polar_log(t.logmod - r, t.angle);
    }
  }
  Interval a2 = sum.abs2();
  if (!a2.certainly_positive()) throw Undecided("conjugate sum not separated from zero");
  return r + littlewood::log(a2) * Interval::from_rat(Rat(1, 2), prec);
}

// Log-polar data of the unit zeta under sigma_1, sigma_2 plus log zeta.
struct ZetaLogs {
  Interval log_id;
  std::array<Interval, 2> logmod;
  std::array<Interval, 2> angle;
  std::array<int, 2> sign{1, 1};
  bool real = false;
};

inline PolarTerm term_for(const ComplexBox& c, const ZetaLogs& z, int j, const Int& N, mpfr_prec_t prec) {
  const Interval n = Interval::from_int(N, prec);
  PolarTerm t;
  if (z.real) {
    t.real = true;
    const int cs = c.re.sign();
    const int zs = (z.sign[j] < 0 && mpz_odd_p(N.get_mpz_t())) ? -1 : 1;
    t.sign = cs * zs;
    t.logmod = littlewood::log(littlewood::abs(c.re)) + n * z.logmod[j];
  } else {
    t.logmod = c.log_abs() + n * z.logmod[j];
    t.angle = c.arg() + n * z.angle[j];
  }
  return t;
}

}  // namespace detail

/// Certified Q^{1/2}|Qw - W| for w in {alpha, beta} through the conjugate
/// identity Qw - W = sum_j s_j(gamma)(w - s_j(w)) s_j(zeta)^N.
struct ConjugateBounds {
  Interval alpha_bound, beta_bound, logQ;
  Interval log_gamma_zetaN;  // log(gamma zeta^N)
  std::array<Interval, 2> log_conj_term;  // log(|s_j(gamma)| |s_j(zeta)|^N)
};

inline ConjugateBounds conjugate_bounds(const LdivWitness& w, const detail::ZetaLogs& z, mpfr_prec_t prec) {
  ConjugateBounds out;
  const EmbeddingValues eg = embed(w.gamma, prec);
  const EmbeddingValues ea = embed(w.alpha, prec);
  const EmbeddingValues eb = embed(w.beta, prec);
  const Interval n = Interval::from_int(w.exponent, prec);
  out.logQ = detail::log_of_int(w.Q, prec);
  const Interval half = Interval::from_rat(Rat(1, 2), prec);
  if (!eg.id_value.certainly_positive()) throw Undecided("gamma sign");
  out.log_gamma_zetaN = littlewood::log(eg.id_value) + n * z.log_id;
  for (int j = 0; j < 2; ++j) out.log_conj_term[j] = eg.conj(j + 1).log_abs() + n * z.logmod[j];
  auto bound_for = [&](const EmbeddingValues& ew) {
    std::vector<detail::PolarTerm> terms;
    for (int j = 0; j < 2; ++j) {
      const ComplexBox& sg = eg.conj(j + 1);
      ComplexBox diff = ew.id_box() - ew.conj(j + 1);
      ComplexBox c = sg * diff;
      if (z.real) c = ComplexBox::real(c.re);
      terms.push_back(detail::term_for(c, z, j, w.exponent, prec));
    }
    Interval l = detail::log_abs_sum(terms, prec);
    return littlewood::exp(out.logQ * half + l);
  };
  out.alpha_bound = bound_for(ea);
  out.beta_bound = bound_for(eb);
  return out;
}

namespace detail {

inline void add_check(LdivWitness& w, std::string name, bool ok, std::string detail = "") {
  w.checks.push_back({std::move(name), ok, std::move(detail)});
}

// Exact Q, R, S from Z = zeta^N through the linear forms Tr(x t^i).
inline void exact_traces(LdivWitness& w, const IntTriple& Z) {
  const FieldPtr& f = w.gamma.field();
  const FieldElement t = FieldElement::theta(f);
  const std::array<FieldElement, 3> xs{w.gamma, w.gamma * w.alpha, w.gamma * w.beta};
  std::array<Int*, 3> out{&w.Q, &w.R, &w.S};
  for (int k = 0; k < 3; ++k) {
    Rat acc = 0;
    FieldElement xp = xs[k];
    for (int i = 0; i < 3; ++i) {
      const Rat tr = trace(xp);
      if (tr != 0) acc += tr * Rat(Z[i]);
      xp = xp * t;
    }
    if (acc.get_den() != 1) throw CertificationFailure("trace is not an integer: the gamma scaling is wrong");
    *out[k] = acc.get_num();
  }
}

inline void require_budget(double log_zeta_nats, const Int& N, const PeckOptions& opt) {
  const double bits = log_zeta_nats * N.get_d() / std::log(2.0);
  if (bits > opt.max_log2_Q)
    throw PrecisionExhausted("construction needs Q of about " + std::to_string(static_cast<long long>(bits)) +
                             " bits, above the budget of " +
                             std::to_string(static_cast<long long>(opt.max_log2_Q)));
}

inline mpfr_prec_t start_precision(const Int& scale) { return std::max<mpfr_prec_t>(128, bits_for(scale) + 96); }

inline std::string interval_detail(const Interval& a, const char* rel, const Interval& b) {
  return a.str(8) + " " + rel + " " + b.str(8);
}

}  // namespace detail

// -- case a -----------------------------------------------------------------

/// One-real-embedding construction for a dominant unit eta. D is enlarged by
/// factors 2, 3, ... (up to max_factor) until the large-D conditions certify.
inline LdivWitness construct_case_a(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma,
                                    const Unit& eta, const Int& D, const Rat& eps_in,
                                    const PeckOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const FieldPtr& f = alpha.field();
  if (f->signature() != Signature::OneReal) throw InvalidInput("case a needs a field with one real embedding");
  if (D < 1) throw InvalidInput("D must be >= 1");
  const Rat eps = snap_eps(eps_in);
  const Int inv_eps = eps_inverse(eps);
  if (certified_sign(eta.element, opt.prec_cap) <= 0 || detail::compare_abs_to_one(eta.element, opt.prec_cap) <= 0)
    throw InvalidInput("unit is not dominant (needs eta > 1)");
  if (!eta.element.has_integer_coords()) throw InvalidInput("unit must have integer coordinates");

  std::string last_failure;
  for (long factor = 1; factor <= opt.max_factor; ++factor) {
    LdivWitness w(alpha, beta, gamma);
    w.provenance = Provenance::PeckA;
    w.D = D;
    w.D_factor = factor;
    w.modulus = D * factor;
    w.eps = eps;
    w.exponent = psi(w.modulus);
    const Int N = w.exponent;

    // x = N tau / pi with s(eta) = eta^{-1/2} e^{i tau}
    auto eta_conj = [&](mpfr_prec_t prec) { return embed(eta.element, prec).conj1; };
    const mpfr_prec_t p0 = detail::start_precision(N * inv_eps);
    DirichletSolution dir = dirichlet_angle(
        [&](mpfr_prec_t prec) {
          const Interval tau = eta_conj(prec).arg();
          return Interval::from_int(N, prec) * tau / Interval::pi(prec);
        },
        eps, p0, opt.prec_cap);
    w.m = dir.m;

    const double log_eta = embed(eta.element, 64).id_value.mid_double();
    detail::require_budget(std::log(log_eta) * w.m.get_d(), N, opt);

    const IntTriple Z = FieldElement::pow_int(eta.element.int_coords(), w.m * N, *f);
    w.zeta = elem_pow(eta.element, w.m);
    detail::exact_traces(w, Z);
    if (w.Q <= 0) {
      last_failure = "Q <= 0 at D*" + std::to_string(factor);
      continue;
    }

    bool large_d_ok = true;
    with_precision(
        detail::start_precision(w.m * N), opt.prec_cap,
        [&](mpfr_prec_t prec) {
          w.checks.clear();
          const EmbeddingValues ee = embed(eta.element, prec);
          detail::ZetaLogs z;
          const Interval mm = Interval::from_int(w.m, prec);
          z.log_id = mm * littlewood::log(ee.id_value);
          z.logmod[0] = mm * ee.conj1.log_abs();
          z.logmod[1] = mm * ee.conj2.log_abs();
          z.angle[0] = mm * ee.conj1.arg();
          z.angle[1] = mm * ee.conj2.arg();
          const ConjugateBounds cb = conjugate_bounds(w, z, prec);
          const Interval n = Interval::from_int(N, prec);
          const Interval log4 = littlewood::log(Interval::from_long(4, prec));
          const Interval log2 = littlewood::log(Interval::from_long(2, prec));
          const Interval log32 = littlewood::log(Interval::from_rat(Rat(3, 2), prec));

          // zeta = eta^m >= C4 = eta
          const bool c36a = w.m >= 1;
          // |s_j(gamma)| |s_j(zeta)|^N <= gamma zeta^N / 4
          bool c36b = true;
          for (int j = 0; j < 2; ++j) {
            const Interval rhs = cb.log_gamma_zetaN - log4;
            if (cb.log_conj_term[j].certainly_less_eq(rhs)) continue;
            if (cb.log_conj_term[j].certainly_greater(rhs)) {
              c36b = false;
              continue;
            }
            throw Undecided("domination condition undecided");
          }
          detail::add_check(w, "zeta>=C4", c36a, "C4 = eta");
          detail::add_check(w, "conjugate_domination", c36b,
                            detail::interval_detail(cb.log_conj_term[0], "<=", cb.log_gamma_zetaN - log4));
          if (!c36b) {
            large_d_ok = false;
            return 0;
          }
          // gamma zeta^N / 2 <= Q <= 3 gamma zeta^N / 2
          const Interval lo = cb.log_gamma_zetaN - log2, hi = cb.log_gamma_zetaN + log32;
          const bool sandwich = lo.certainly_less_eq(cb.logQ) && cb.logQ.certainly_less_eq(hi);
          if (!sandwich && !(cb.logQ.certainly_less(lo) || cb.logQ.certainly_greater(hi)))
            throw Undecided("sandwich undecided");
          detail::add_check(w, "Q_sandwich", sandwich, detail::interval_detail(cb.logQ, "in", hull(lo, hi)));
          // |s(zeta^N) - conj| <= 2 pi eps zeta^{-N/2}: |sin(N arg s(zeta))| <= pi eps
          const Interval s = littlewood::abs(sin(n * z.angle[0]));
          const Interval pe = Interval::pi(prec) * Interval::from_rat(eps, prec);
          const bool c310 = s.certainly_less_eq(pe);
          if (!c310 && !s.certainly_greater(pe)) throw Undecided("angle condition undecided");
          detail::add_check(w, "conjugate_gap", c310, detail::interval_detail(s, "<=", pe));
          // |s_j(zeta^N)| <= sqrt2 zeta^{-N/2}
          bool c311 = true;
          for (int j = 0; j < 2; ++j) {
            const Interval lhs = n * z.logmod[j];
            const Interval rhs = log2 * Interval::from_rat(Rat(1, 2), prec) - n * z.log_id * Interval::from_rat(Rat(1, 2), prec);
            c311 = c311 && lhs.certainly_less_eq(rhs);
          }
          detail::add_check(w, "conjugate_size", c311);
          w.cert.alpha_bound = cb.alpha_bound;
          w.cert.beta_bound = cb.beta_bound;
          w.cert.logQ = cb.logQ;
          w.precision_bits = prec;
          return 0;
        },
        "certifying the case a conditions");
    if (!large_d_ok) {
      last_failure = "conjugate domination fails at D*" + std::to_string(factor);
      continue;
    }
    w.cert.Q_pos = w.Q > 0;
    w.cert.div_ok = divides(w.modulus, w.Q) && divides(w.modulus, w.R);
    w.cert.gcd_value = triple_gcd(w.Q, w.R, w.S);
    w.gcd_before = w.cert.gcd_value;
    detail::add_check(w, "Q_positive", w.cert.Q_pos);
    detail::add_check(w, "divisibility", w.cert.div_ok, "modulus " + w.modulus.get_str());
    if (!w.cert.Q_pos) throw CertificationFailure("Q is not positive");
    if (!w.cert.div_ok)
      throw CertificationFailure("Q or R not divisible by " + w.modulus.get_str() + ": arithmetic inconsistency");
    if (!w.check_passed("Q_sandwich")) throw CertificationFailure("Q outside [gamma zeta^N / 2, 3 gamma zeta^N / 2]");
    w.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return w;
  }
  throw CertificationFailure("large-D conditions fail up to factor " + std::to_string(opt.max_factor) + ": " +
                             last_failure);
}

// -- case b -----------------------------------------------------------------

/// Totally real construction for a normalized independent pair (e1, e2).
inline LdivWitness construct_case_b(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma,
                                    const Unit& e1, const Unit& e2, const Int& D, const Rat& eps_in,
                                    const PeckOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const FieldPtr& f = alpha.field();
  if (f->signature() != Signature::TotallyReal) throw InvalidInput("case b needs a totally real field");
  if (D < 1) throw InvalidInput("D must be >= 1");
  const Rat eps = snap_eps(eps_in);
  const Interval M = independence_check(e1, e2, opt.prec_cap);
  for (const Unit* u : {&e1, &e2}) {
    if (!u->element.has_integer_coords()) throw InvalidInput("unit must have integer coordinates");
    const EmbeddingValues ev = with_precision(64, opt.prec_cap, [&](mpfr_prec_t p) {
      EmbeddingValues e = embed(u->element, p);
      if (!(e.id_value.lo_greater(Rat(1)) && e.conj1.re.certainly_positive() && e.conj2.re.certainly_positive())) {
        if (e.id_value.contains(Rat(1)) || e.conj1.re.contains_zero() || e.conj2.re.contains_zero())
          throw Undecided("unit normalization undecided");
        throw InvalidInput("units must be normalized: > 1 with positive conjugates");
      }
      return e;
    });
    (void)ev;
  }

  auto logs = [&](mpfr_prec_t prec) { return std::make_pair(e1.logs(prec), e2.logs(prec)); };

  std::string last_failure;
  for (long factor = 1; factor <= opt.max_factor; ++factor) {
    LdivWitness w(alpha, beta, gamma);
    w.provenance = Provenance::PeckB;
    w.D = D;
    w.D_factor = factor;
    w.modulus = D * factor;
    w.eps = eps;
    w.exponent = psi(w.modulus);
    const Int N = w.exponent;
    const Rat bound = Rat(N) / eps;
    if (bound <= 1) {
      last_failure = "psi(D)/eps <= 1";
      continue;
    }
    // log e2 / psi(D) <= M
    {
      const Interval le2 = e2.log_embedding[0];
      const Interval lhs = le2 / Interval::from_int(N, le2.precision());
      if (!lhs.certainly_less_eq(M)) {
        last_failure = "log e2 / psi(D) exceeds M";
        continue;
      }
    }
    const mpfr_prec_t p0 = detail::start_precision(N * eps.get_den());
    DirichletSolution dir = dirichlet_pair(
        [&](mpfr_prec_t prec) {
          auto [l1, l2] = logs(prec);
          return std::make_pair(l1[1] - l1[2], l2[1] - l2[2]);
        },
        bound, p0, opt.prec_cap);
    Int m1 = dir.m1, m2 = dir.m2;
    // orient so that m1 log e1 + m2 log e2 > 0
    const int orient = with_precision(p0, opt.prec_cap, [&](mpfr_prec_t prec) {
      auto [l1, l2] = logs(prec);
      return (Interval::from_int(m1, prec) * l1[0] + Interval::from_int(m2, prec) * l2[0]).sign();
    });
    if (orient < 0) {
      m1 = -m1;
      m2 = -m2;
    }
    w.m1 = m1;
    w.m2 = m2;
    const FieldElement zeta = elem_pow(e1.element, m1) * elem_pow(e2.element, m2);
    w.zeta = zeta;
    const double log_zeta = (e1.log_embedding[0].mid_double() * m1.get_d() +
                             e2.log_embedding[0].mid_double() * m2.get_d());
    detail::require_budget(log_zeta, N, opt);
    const IntTriple Z = FieldElement::pow_int(zeta.int_coords(), N, *f);
    detail::exact_traces(w, Z);
    if (w.Q <= 0) {
      last_failure = "Q <= 0 at D*" + std::to_string(factor);
      continue;
    }

    bool large_d_ok = true;
    with_precision(
        detail::start_precision(N * (abs(m1) + abs(m2))), opt.prec_cap,
        [&](mpfr_prec_t prec) {
          w.checks.clear();
          auto [l1, l2] = logs(prec);
          const Interval a1 = Interval::from_int(m1, prec), a2 = Interval::from_int(m2, prec);
          detail::ZetaLogs z;
          z.real = true;
          z.log_id = a1 * l1[0] + a2 * l2[0];
          z.logmod[0] = a1 * l1[1] + a2 * l2[1];
          z.logmod[1] = a1 * l1[2] + a2 * l2[2];
          const Interval n = Interval::from_int(N, prec);
          const Interval mp = M;  // certified at its own precision
          const Interval am1 = Interval::from_int(abs(m1), prec);
          // M |m1| <= m1 log e1 + m2 log e2 <= 3 M |m1|
          const bool c317 = (mp * am1).certainly_less_eq(z.log_id) &&
                            z.log_id.certainly_less_eq(Interval::from_long(3, prec) * mp * am1);
          detail::add_check(w, "log_zeta_window", c317,
                            detail::interval_detail(z.log_id, "in", hull(mp * am1, Interval::from_long(3, prec) * mp * am1)));
          const bool c36a = mp.certainly_less_eq(z.log_id);
          detail::add_check(w, "zeta>=C4", c36a, "C4 = e^M");
          const ConjugateBounds cb = conjugate_bounds(w, z, prec);
          const Interval log4 = littlewood::log(Interval::from_long(4, prec));
          const Interval log2 = littlewood::log(Interval::from_long(2, prec));
          const Interval log32 = littlewood::log(Interval::from_rat(Rat(3, 2), prec));
          bool c36b = true;
          for (int j = 0; j < 2; ++j) {
            const Interval rhs = cb.log_gamma_zetaN - log4;
            if (cb.log_conj_term[j].certainly_less_eq(rhs)) continue;
            if (cb.log_conj_term[j].certainly_greater(rhs)) {
              c36b = false;
              continue;
            }
            throw Undecided("domination condition undecided");
          }
          detail::add_check(w, "conjugate_domination", c36b);
          if (!c36b || !c36a) {
            large_d_ok = false;
            return 0;
          }
          const Interval lo = cb.log_gamma_zetaN - log2, hi = cb.log_gamma_zetaN + log32;
          const bool sandwich = lo.certainly_less_eq(cb.logQ) && cb.logQ.certainly_less_eq(hi);
          if (!sandwich && !(cb.logQ.certainly_less(lo) || cb.logQ.certainly_greater(hi)))
            throw Undecided("sandwich undecided");
          detail::add_check(w, "Q_sandwich", sandwich, detail::interval_detail(cb.logQ, "in", hull(lo, hi)));
          // |s1(zeta^N) - s2(zeta^N)| <= s1(zeta^N) / 2
          const Interval ratio = littlewood::exp(n * (z.logmod[1] - z.logmod[0]));
          const Interval gap = littlewood::abs(Interval::from_long(1, prec) - ratio);
          const bool c310 = gap.hi_leq(Rat(1, 2));
          detail::add_check(w, "conjugate_gap", c310, gap.str(8) + " <= 1/2");
          bool c311 = true;
          const Interval half = Interval::from_rat(Rat(1, 2), prec);
          for (int j = 0; j < 2; ++j) {
            const Interval lhs = n * z.logmod[j];
            const Interval rhs = log2 * half - n * z.log_id * half;
            c311 = c311 && lhs.certainly_less_eq(rhs);
          }
          detail::add_check(w, "conjugate_size", c311);
          w.cert.alpha_bound = cb.alpha_bound;
          w.cert.beta_bound = cb.beta_bound;
          w.cert.logQ = cb.logQ;
          w.precision_bits = prec;
          return 0;
        },
        "certifying the case b conditions");
    if (!large_d_ok) {
      last_failure = "zeta >= e^M or conjugate domination fails at D*" + std::to_string(factor);
      continue;
    }
    w.cert.Q_pos = w.Q > 0;
    w.cert.div_ok = divides(w.modulus, w.Q) && divides(w.modulus, w.R);
    w.cert.gcd_value = triple_gcd(w.Q, w.R, w.S);
    w.gcd_before = w.cert.gcd_value;
    detail::add_check(w, "Q_positive", w.cert.Q_pos);
    detail::add_check(w, "divisibility", w.cert.div_ok, "modulus " + w.modulus.get_str());
    if (!w.cert.Q_pos) throw CertificationFailure("Q is not positive");
    if (!w.cert.div_ok)
      throw CertificationFailure("Q or R not divisible by " + w.modulus.get_str() + ": arithmetic inconsistency");
    if (!w.check_passed("Q_sandwich")) throw CertificationFailure("Q outside [gamma zeta^N / 2, 3 gamma zeta^N / 2]");
    w.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return w;
  }
  throw CertificationFailure("large-D conditions fail up to factor " + std::to_string(opt.max_factor) + ": " +
                             last_failure);
}

// -- gcd reduction ------------------------------------------------------------

/// Divides (Q, R, S) by g = gcd(Q, R, S) and certifies g | G, gcd 1 and D | Q', R'.
inline LdivWitness gcd_reduce(const LdivWitness& w, const Int& G) {
  if (G < 1) throw InvalidInput("G must be >= 1");
  const Int g = triple_gcd(w.Q, w.R, w.S);
  if (!divides(g, G))
    throw CertificationFailure("gcd " + g.get_str() + " does not divide G = " + G.get_str() +
                               ": the badly-approximable constant is not a true lower bound");
  LdivWitness out = w;
  out.gcd_before = g;
  if (g != 1) {
    out.Q /= g;
    out.R /= g;
    out.S /= g;
    const mpfr_prec_t prec = std::max(w.cert.logQ.precision(), mpfr_prec_t{64});
    const Interval lg = detail::log_of_int(g, prec);
    const Interval scale = littlewood::exp(-(lg * Interval::from_rat(Rat(3, 2), prec)));
    out.cert.alpha_bound = w.cert.alpha_bound * scale;
    out.cert.beta_bound = w.cert.beta_bound * scale;
    out.cert.logQ = w.cert.logQ - lg;
  }
  out.cert.gcd_value = triple_gcd(out.Q, out.R, out.S);
  if (out.cert.gcd_value != 1) throw CertificationFailure("reduced triple still has gcd " + out.cert.gcd_value.get_str());
  out.cert.Q_pos = out.Q > 0;
  out.cert.div_ok = divides(w.D, out.Q) && divides(w.D, out.R);
  return out;
}

/// Simple fixed-size reduction used by tests and the CLI on plain triples.
struct ReducedTriple {
  Int Q, R, S, g;
};

inline ReducedTriple gcd_reduce_triple(const Int& Q, const Int& R, const Int& S, const Int& G, const Int& D) {
  const Int g = triple_gcd(Q, R, S);
  if (!divides(g, G)) throw CertificationFailure("gcd " + g.get_str() + " does not divide G = " + G.get_str());
  ReducedTriple r{Q / g, R / g, S / g, g};
  if (triple_gcd(r.Q, r.R, r.S) != 1) throw CertificationFailure("reduced gcd is not 1");
  if (!divides(D, r.Q) || !divides(D, r.R)) throw CertificationFailure("reduction broke divisibility by D");
  return r;
}

// -- pipeline -----------------------------------------------------------------

struct PeckPlan {
  GammaConstruction gamma;
  std::optional<Unit> eta;       // case a
  std::optional<Unit> e1, e2;    // case b
  std::optional<Interval> M;
  Signature signature = Signature::OneReal;
};

inline PeckPlan plan_peck(const FieldElement& alpha, const FieldElement& beta,
                          long unit_bound = kDefaultUnitSearchBound) {
  PeckPlan plan{gamma_construct_detailed(alpha, beta), std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                alpha.field()->signature()};
  if (plan.signature == Signature::OneReal) {
    plan.eta = select_dominant_unit(alpha.field(), unit_bound);
  } else {
    auto [a, b] = select_positive_pair(alpha.field(), unit_bound);
    plan.e1 = a;
    plan.e2 = b;
    plan.M = independence_check(a, b);
  }
  return plan;
}

inline LdivWitness construct_unreduced(const PeckPlan& plan, const FieldElement& alpha, const FieldElement& beta,
                                       const Int& D, const Rat& eps, const PeckOptions& opt = {}) {
  if (plan.signature == Signature::OneReal)
    return construct_case_a(alpha, beta, plan.gamma.gamma, *plan.eta, D, eps, opt);
  return construct_case_b(alpha, beta, plan.gamma.gamma, *plan.e1, *plan.e2, D, eps, opt);
}

/// Witness for (D, eps) with gcd 1. The triple is built for the modulus h D,
/// h running over the divisors of G supported on the primes of D, until the
/// reduced triple keeps D | Q and D | R.
inline LdivWitness peck_construct(const PeckPlan& plan, const FieldElement& alpha, const FieldElement& beta,
                                  const Int& D, const Rat& eps, const Int& G, const PeckOptions& opt = {}) {
  if (D < 1) throw InvalidInput("D must be >= 1");
  if (G < 1) throw InvalidInput("G must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  // divisors of G supported on the primes of D, ascending
  std::vector<Int> hs{Int(1)};
  for (const auto& pp : factorize(D)) {
    const unsigned long vmax = p_adic_valuation(G, pp.prime);
    std::vector<Int> next;
    for (const Int& h : hs) {
      Int x = h;
      for (unsigned long e = 0; e <= vmax; ++e, x *= pp.prime) next.push_back(x);
    }
    hs = std::move(next);
  }
  std::sort(hs.begin(), hs.end());
  std::string last;
  for (const Int& h : hs) {
    LdivWitness w = construct_unreduced(plan, alpha, beta, h * D, eps, opt);
    w.D = D;
    w.gcd_factor = h;
    LdivWitness r = gcd_reduce(w, G);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.cert.div_ok) return r;
    last = "gcd " + r.gcd_before.get_str() + " removes a factor of D at h = " + h.get_str();
  }
  throw CertificationFailure("no divisor of G keeps D | Q after reduction (" + last + ")");
}

/// Rows (nu, v_p(Q), log Q, |Q|_p log Q) for D = p^nu, eps = 1, case a.
struct PadicLagrangeRow {
  unsigned long nu = 0;
  unsigned long valuation = 0;
  Interval logQ;
  Interval product;
  Int D_factor = 1;
};

inline std::vector<PadicLagrangeRow> padic_lagrange_check(const PeckPlan& plan, const FieldElement& alpha,
                                                          const FieldElement& beta, const Int& p, unsigned long nu_max,
                                                          const PeckOptions& opt = {}) {
  if (plan.signature != Signature::OneReal) throw InvalidInput("the p-adic product check needs case a");
  if (nu_max < 1) throw InvalidInput("nu must be >= 1");
  std::vector<PadicLagrangeRow> rows;
  for (unsigned long nu = 1; nu <= nu_max; ++nu) {
    Int D;
    mpz_pow_ui(D.get_mpz_t(), p.get_mpz_t(), nu);
    LdivWitness w = construct_case_a(alpha, beta, plan.gamma.gamma, *plan.eta, D, Rat(1), opt);
    PadicLagrangeRow row;
    row.nu = nu;
    row.valuation = p_adic_valuation(w.Q, p);
    if (row.valuation < nu) throw CertificationFailure("v_p(Q) < nu at nu = " + std::to_string(nu));
    row.logQ = w.cert.logQ;
    const mpfr_prec_t prec = std::max<mpfr_prec_t>(64, row.logQ.precision());
    Int pv;
    mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), row.valuation);
    row.product = row.logQ / Interval::from_int(pv, prec);
    row.D_factor = w.D_factor;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace littlewood
