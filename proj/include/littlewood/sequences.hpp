#pragma once

// Approximation sequences (q_n, r_n, s_n) to a pair (alpha, beta): threshold
// scan, profile constants, the recurrence word mu_n = (a_n, b_n, c_n) with
// Q_n = A_n Q_{n-1}, the determinants x, y, z and Delta_n, the recurrent-word
// witness search and Lagrange-constant estimates.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "littlewood/cubic_field.hpp"
#include "littlewood/numtheory.hpp"
#include "littlewood/peck.hpp"

namespace littlewood {

// -- real inputs --------------------------------------------------------------

/// A real number given by certified enclosures at any precision, optionally
/// known exactly as a rational, optionally tied to a field element.
class RealSource {
 public:
  using Fn = std::function<Interval(mpfr_prec_t)>;

  RealSource(Fn fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

  static RealSource from_element(const FieldElement& x) {
    RealSource s([x](mpfr_prec_t p) { return embed(x, p).id_value; }, x.str());
    if (x.is_rational()) s.exact_ = x[0];
    s.element_ = x;
    return s;
  }

  static RealSource from_rational(const Rat& q) {
    RealSource s([q](mpfr_prec_t p) { return Interval::from_rat(q, p); }, rat_str(q));
    s.exact_ = q;
    return s;
  }

  /// d * x
  RealSource scaled(const Int& d) const {
    if (element_) return from_element(Rat(d) * *element_);
    if (exact_) return from_rational(Rat(d) * *exact_);
    Fn f = fn_;
    return RealSource([f, d](mpfr_prec_t p) { return Interval::from_int(d, p) * f(p); }, d.get_str() + "*" + label_);
  }

  Interval at(mpfr_prec_t prec) const { return fn_(prec); }
  const std::optional<Rat>& exact() const { return exact_; }
  const std::optional<FieldElement>& element() const { return element_; }
  const std::string& label() const { return label_; }

 private:
  Fn fn_;
  std::string label_;
  std::optional<Rat> exact_;
  std::optional<FieldElement> element_;
};

// -- per-q certified evaluation ---------------------------------------------

/// Nearest integer, ties to even.
inline Int round_half_even(const Rat& x) {
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  const Rat frac = x - f;
  if (frac < Rat(1, 2)) return f;
  if (frac > Rat(1, 2)) return f + 1;
  return mpz_even_p(f.get_mpz_t()) ? f : f + 1;
}

struct NearestInt {
  Int r;
  Interval residual;  // q x - r
  std::optional<Rat> exact_residual;
};

/// r nearest to q x, with |q x - r| < 1/2 certified (throws Undecided).
inline NearestInt nearest(const RealSource& src, const Int& q, mpfr_prec_t prec) {
  if (src.exact()) {
    const Rat x = Rat(q) * *src.exact();
    const Int r = round_half_even(x);
    const Rat res = x - r;
    return {r, Interval::from_rat(res, prec), res};
  }
  const Interval y = src.at(prec) * Interval::from_int(q, prec);
  const Rat m = y.mid_rat() + Rat(1, 2);
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), m.get_num_mpz_t(), m.get_den_mpz_t());
  Interval res = y - Interval::from_int(r, prec);
  const Interval half = Interval::from_rat(Rat(1, 2), prec);
  if (!littlewood::abs(res).certainly_less(half)) throw Undecided("nearest integer to q x not separated");
  return {r, res, std::nullopt};
}

struct PointEval {
  Int q, r, s;
  Interval res_a, res_b;
  Interval value;  // q^{1/2} max(|q alpha - r|, |q beta - s|)
  std::optional<Rat> exact_a, exact_b;
};

inline mpfr_prec_t point_precision(const Int& q) {
  return static_cast<mpfr_prec_t>(mpz_sizeinbase(q.get_mpz_t(), 2)) + 96;
}

inline PointEval evaluate_point(const RealSource& a, const RealSource& b, const Int& q, mpfr_prec_t prec) {
  NearestInt na = nearest(a, q, prec);
  NearestInt nb = nearest(b, q, prec);
  PointEval e{q, na.r, nb.r, na.residual, nb.residual, Interval(prec), na.exact_residual, nb.exact_residual};
  e.value = littlewood::sqrt(Interval::from_int(q, prec)) *
            max(littlewood::abs(e.res_a), littlewood::abs(e.res_b));
  return e;
}

/// -1: certainly below or equal to C, +1: certainly above, 0: undecided.
/// Exact rational residuals are compared exactly when they decide the max.
inline int compare_to_threshold(const PointEval& e, const Rat& C) {
  if (e.value.hi_leq(C)) return -1;
  if (e.value.lo_greater(C)) return 1;
  std::optional<Rat> m;
  if (e.exact_a && e.exact_b) {
    m = std::max(abs(*e.exact_a), abs(*e.exact_b));
  } else if (e.exact_a && littlewood::abs(e.res_b).hi_less(abs(*e.exact_a))) {
    m = abs(*e.exact_a);
  } else if (e.exact_b && littlewood::abs(e.res_a).hi_less(abs(*e.exact_b))) {
    m = abs(*e.exact_b);
  }
  if (m) return Rat(e.q) * *m * *m <= C * C ? -1 : 1;
  return 0;
}

// -- fast fixed-point scan ----------------------------------------------------

namespace detail {

using u128 = unsigned __int128;

inline u128 to_u128(const Int& x) {
  Int hi, lo;
  mpz_fdiv_q_2exp(hi.get_mpz_t(), x.get_mpz_t(), 64);
  mpz_fdiv_r_2exp(lo.get_mpz_t(), x.get_mpz_t(), 64);
  return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

// frac(x) in [F, F + W] / 2^128
struct FixedFrac {
  std::uint64_t f_hi = 0, f_lo = 0;
  std::uint64_t width = 1;
};

inline FixedFrac fixed_frac(const RealSource& src, mpfr_prec_t cap) {
  return with_precision(
      256, cap,
      [&](mpfr_prec_t p) {
        Rat lo, hi;
        if (src.exact()) {
          lo = hi = *src.exact();
        } else {
          const Interval x = src.at(p);
          lo = x.lo_rat();
          hi = x.hi_rat();
        }
        Int fl, fh;
        mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
        mpz_fdiv_q(fh.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
        if (fl != fh) throw Undecided("integer part not separated");
        Int two128 = 1;
        two128 <<= 128;
        const Rat a = (lo - fl) * two128, b = (hi - fl) * two128;
        Int F, U;
        mpz_fdiv_q(F.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
        mpz_cdiv_q(U.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
        const Int w = std::max(Int(1), Int(U - F));
        if (w > 65536) throw Undecided("fraction too wide for the fixed-point scan");
        const u128 f = to_u128(F);
        return FixedFrac{static_cast<std::uint64_t>(f >> 64), static_cast<std::uint64_t>(f), w.get_ui()};
      },
      "locating the fractional part");
}

inline double circle_distance(u128 x) {
  const u128 d = (x >> 127) ? static_cast<u128>(0) - x : x;
  return std::ldexp(static_cast<double>(d), -128);
}

}  // namespace detail

inline constexpr long long kMaxScanQ = 1LL << 40;

/// Double-precision value of q^{1/2} max(||q alpha||, ||q beta||) with a
/// rigorous error bound; used to discard q values before MPFR evaluation.
class FastScanner {
 public:
  FastScanner(const RealSource& a, const RealSource& b, long long q_max, mpfr_prec_t cap)
      : a_(detail::fixed_frac(a, cap)), b_(detail::fixed_frac(b, cap)) {
    if (q_max < 1 || q_max > kMaxScanQ) throw InvalidInput("q_max must lie in [1, 2^40]");
    const double qm = static_cast<double>(q_max);
    const double w = static_cast<double>(std::max(a_.width, b_.width));
    abs_tol_ = 2.0 * std::sqrt(qm) * qm * w * std::ldexp(1.0, -128) + std::ldexp(1.0, -1000);
  }

  double value(std::uint64_t q) const {
    const double da = detail::circle_distance(frac(a_, q));
    const double db = detail::circle_distance(frac(b_, q));
    return std::sqrt(static_cast<double>(q)) * std::max(da, db);
  }

  double tolerance(double v) const { return v * std::ldexp(1.0, -45) + abs_tol_; }

 private:
  static detail::u128 frac(const detail::FixedFrac& f, std::uint64_t q) {
    return (static_cast<detail::u128>(q * f.f_hi) << 64) + static_cast<detail::u128>(q) * f.f_lo;
  }

  detail::FixedFrac a_, b_;
  double abs_tol_ = 0;
};

// -- sequences ------------------------------------------------------------------

struct ApproxTriple {
  Int q, r, s;
  Interval residual_alpha, residual_beta;
  IntTriple row() const { return {q, r, s}; }
};

struct ApproxSequence {
  std::vector<ApproxTriple> triples;
  std::optional<RealSource> alpha, beta;
  Rat C_used = 0;
  long long q_max = 0;
  std::vector<Int> dropped;  // q values removed by thinning

  std::size_t size() const { return triples.size(); }
  std::vector<IntTriple> rows() const {
    std::vector<IntTriple> out;
    out.reserve(triples.size());
    for (const auto& t : triples) out.push_back(t.row());
    return out;
  }
};

/// Sequence made of plain integer rows (residuals left empty).
inline ApproxSequence sequence_from_rows(const std::vector<IntTriple>& rows) {
  ApproxSequence seq;
  for (const auto& r : rows) seq.triples.push_back(ApproxTriple{r[0], r[1], r[2], Interval(), Interval()});
  return seq;
}

inline constexpr mpfr_prec_t kDefaultScanCap = 4096;

/// Every q <= q_max with certified q^{1/2} max(||q alpha||, ||q beta||) <= C.
inline ApproxSequence extract_sequence(const RealSource& alpha, const RealSource& beta, const Rat& C, long long q_max,
                                       mpfr_prec_t cap = kDefaultScanCap) {
  if (C <= 0) throw InvalidInput("C must be positive");
  if (q_max < 1) throw InvalidInput("q_max must be >= 1");
  FastScanner fast(alpha, beta, q_max, cap);
  const double c_hi = Interval::from_rat(C, 64).hi_double();
  ApproxSequence seq;
  seq.alpha = alpha;
  seq.beta = beta;
  seq.C_used = C;
  seq.q_max = q_max;
  for (long long qi = 1; qi <= q_max; ++qi) {
    const double v = fast.value(static_cast<std::uint64_t>(qi));
    if (v - fast.tolerance(v) > c_hi) continue;
    const Int q(static_cast<long>(qi));
    std::optional<PointEval> hit = with_precision(
        point_precision(q), cap,
        [&](mpfr_prec_t p) -> std::optional<PointEval> {
          PointEval e = evaluate_point(alpha, beta, q, p);
          const int c = compare_to_threshold(e, C);
          if (c < 0) return e;
          if (c > 0) return std::nullopt;
          throw Undecided("q^{1/2} max(...) not separated from C");
        },
        "deciding q = " + q.get_str() + " against the threshold");
    if (hit) seq.triples.push_back(ApproxTriple{hit->q, hit->r, hit->s, hit->res_a, hit->res_b});
  }
  return seq;
}

/// Enclosure of min over 1 <= q <= q_max of q^{1/2} max(||q alpha||, ||q beta||)
/// as [min lo, min hi], with the q attaining min hi.
struct ScanMinimum {
  Interval value;
  Int q_star, r_star, s_star;
};

inline ScanMinimum scan_minimum(const RealSource& alpha, const RealSource& beta, long long q_max,
                                mpfr_prec_t cap = kDefaultScanCap) {
  if (q_max < 1) throw InvalidInput("q_max must be >= 1");
  FastScanner fast(alpha, beta, q_max, cap);
  double best_hi = INFINITY;
  std::vector<std::pair<long long, double>> cands;
  for (long long qi = 1; qi <= q_max; ++qi) {
    const double v = fast.value(static_cast<std::uint64_t>(qi));
    const double t = fast.tolerance(v);
    if (v - t > best_hi) continue;
    cands.emplace_back(qi, v - t);
    best_hi = std::min(best_hi, v + t);
  }
  std::optional<ScanMinimum> out;
  for (const auto& [qi, lo] : cands) {
    if (lo > best_hi) continue;
    const Int q(static_cast<long>(qi));
    PointEval e = with_precision(
        point_precision(q), cap, [&](mpfr_prec_t p) { return evaluate_point(alpha, beta, q, p); },
        "evaluating q = " + q.get_str());
    if (!out) {
      out = ScanMinimum{e.value, q, e.r, e.s};
      continue;
    }
    const bool better_hi = mpfr_less_p(e.value.hi(), out->value.hi()) != 0;
    Interval merged = min(out->value, e.value);
    if (better_hi) {
      out->q_star = q;
      out->r_star = e.r;
      out->s_star = e.s;
    }
    out->value = merged;
  }
  return *out;
}

/// 2 x the scan minimum over q <= 100, rounded up to a dyadic rational.
inline Rat default_extraction_C(const RealSource& alpha, const RealSource& beta) {
  return 2 * scan_minimum(alpha, beta, 100).value.hi_rat();
}

// -- determinants ----------------------------------------------------------------

namespace detail {

inline Int det3i(const IntTriple& a, const IntTriple& b, const IntTriple& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace detail

/// Delta_n = det of rows n, n-1, n-2.
inline Int delta(const std::vector<IntTriple>& rows, std::size_t n) {
  if (n < 2 || n >= rows.size()) throw InvalidInput("delta: index " + std::to_string(n) + " out of range");
  return detail::det3i(rows[n], rows[n - 1], rows[n - 2]);
}
inline Int delta(const ApproxSequence& seq, std::size_t n) { return delta(seq.rows(), n); }

struct DetXYZ {
  Int x, y, z;
};

/// x, y, z: columns (q_m, r_m, q_k), (q_m, r_m, r_k), (q_m, r_m, s_k) over the
/// rows m, m-1, m-2 and k, k-1, k-2.
inline DetXYZ det_xyz(const std::vector<IntTriple>& rows, std::size_t m, std::size_t k) {
  if (m < 2 || k <= m || k >= rows.size())
    throw InvalidInput("det_xyz: need 2 <= m < k < " + std::to_string(rows.size()));
  auto col = [&](std::size_t n, int j) { return IntTriple{rows[n][j], rows[n - 1][j], rows[n - 2][j]}; };
  auto det_cols = [](const IntTriple& c1, const IntTriple& c2, const IntTriple& c3) {
    return detail::det3i({c1[0], c2[0], c3[0]}, {c1[1], c2[1], c3[1]}, {c1[2], c2[2], c3[2]});
  };
  const IntTriple qm = col(m, 0), rm = col(m, 1);
  return {det_cols(qm, rm, col(k, 0)), det_cols(qm, rm, col(k, 1)), det_cols(qm, rm, col(k, 2))};
}
inline DetXYZ det_xyz(const ApproxSequence& seq, std::size_t m, std::size_t k) { return det_xyz(seq.rows(), m, k); }

/// Removes triples that make Delta_n vanish, earliest first. When the two
/// previous rows are already dependent the older conflict is dropped instead.
inline void thin_sequence(ApproxSequence& seq) {
  std::size_t n = 2;
  while (n < seq.triples.size()) {
    const auto& t = seq.triples;
    if (detail::det3i(t[n].row(), t[n - 1].row(), t[n - 2].row()) != 0) {
      ++n;
      continue;
    }
    const IntTriple a = t[n - 1].row(), b = t[n - 2].row();
    const bool dependent = a[0] * b[1] == a[1] * b[0] && a[0] * b[2] == a[2] * b[0] && a[1] * b[2] == a[2] * b[1];
    const std::size_t drop = dependent ? n - 1 : n;
    seq.dropped.push_back(seq.triples[drop].q);
    seq.triples.erase(seq.triples.begin() + static_cast<long>(drop));
    if (dependent && n > 2) --n;
  }
}

// -- profile --------------------------------------------------------------------

struct SequenceProfile {
  Rat ratio_max = 0;          // max q_n / q_{n-1}
  std::optional<long> chi;    // least chi with q_{n+chi} >= K q_n, K > 1
  Rat K = 0;
  std::vector<Int> deltas;    // deltas[i] = Delta_{i+2}
  std::vector<bool> delta_nonzero;
  Int delta_bound = 0;
  std::optional<ScanMinimum> C_bad2;

  const Int& delta_at(std::size_t n) const { return deltas.at(n - 2); }
  bool all_delta_nonzero() const {
    return std::all_of(delta_nonzero.begin(), delta_nonzero.end(), [](bool b) { return b; });
  }
};

inline SequenceProfile verify_profile(const ApproxSequence& seq, mpfr_prec_t cap = kDefaultScanCap) {
  const std::size_t n = seq.size();
  if (n < 3) throw InvalidInput("sequence too short for a profile (" + std::to_string(n) + " < 3)");
  const auto rows = seq.rows();
  SequenceProfile prof;
  for (std::size_t i = 1; i < n; ++i) prof.ratio_max = std::max(prof.ratio_max, Rat(rows[i][0], rows[i - 1][0]));
  for (std::size_t chi = 1; chi <= n / 2; ++chi) {
    Rat k = Rat(rows[chi][0], rows[0][0]);
    for (std::size_t i = 1; i + chi < n; ++i) k = std::min(k, Rat(rows[i + chi][0], rows[i][0]));
    if (k > 1) {
      prof.chi = static_cast<long>(chi);
      prof.K = k;
      break;
    }
  }
  for (std::size_t i = 2; i < n; ++i) {
    const Int d = delta(rows, i);
    prof.deltas.push_back(d);
    prof.delta_nonzero.push_back(d != 0);
    prof.delta_bound = std::max(prof.delta_bound, Int(abs(d)));
  }
  if (seq.alpha && seq.beta && seq.q_max >= 1) prof.C_bad2 = scan_minimum(*seq.alpha, *seq.beta, seq.q_max, cap);
  return prof;
}

// -- recurrence word -----------------------------------------------------------

using Letter = std::array<Rat, 3>;

inline std::string letter_str(const Letter& l) {
  return rat_str(l[0]) + " " + rat_str(l[1]) + " " + rat_str(l[2]);
}

struct RecurrenceWord {
  std::vector<Letter> letters;    // letters[i] = mu_{i+3}
  std::vector<int> ids;           // position of each letter in the alphabet
  std::vector<Letter> alphabet;   // distinct letters, first-appearance order
  Int height_bound = 0;
  std::vector<std::optional<long>> recurrence_table;  // [N] least k, prefix of length N+1

  const Letter& mu(std::size_t n) const {
    if (n < 3 || n - 3 >= letters.size()) throw InvalidInput("mu_" + std::to_string(n) + " outside the word");
    return letters[n - 3];
  }
};

namespace detail {

// z[k] = length of the longest common prefix of w and w[k..]
inline std::vector<std::size_t> z_function(const std::vector<int>& w) {
  const std::size_t n = w.size();
  std::vector<std::size_t> z(n, 0);
  if (n) z[0] = n;
  for (std::size_t i = 1, l = 0, r = 0; i < n; ++i) {
    if (i < r) z[i] = std::min(r - i, z[i - l]);
    while (i + z[i] < n && w[z[i]] == w[i + z[i]]) ++z[i];
    if (i + z[i] > r) {
      l = i;
      r = i + z[i];
    }
  }
  return z;
}

}  // namespace detail

/// Least k >= 1 with w[n] = w[n + k] for 0 <= n <= N inside the window.
inline std::optional<long> word_recurrence_scan(const std::vector<int>& w, std::size_t N) {
  const auto z = detail::z_function(w);
  for (std::size_t k = 1; k < w.size(); ++k)
    if (z[k] >= N + 1) return static_cast<long>(k);
  return std::nullopt;
}

inline std::optional<long> word_recurrence_scan(const RecurrenceWord& word, std::size_t N) {
  return word_recurrence_scan(word.ids, N);
}

/// mu_n from q_n = a_n q_{n-1} + b_n q_{n-2} + c_n q_{n-3} (and r, s), n >= 3.
inline RecurrenceWord fit_recurrence(const ApproxSequence& seq) {
  const auto rows = seq.rows();
  if (rows.size() < 4) throw InvalidInput("need at least four triples to fit a letter");
  RecurrenceWord w;
  std::map<Letter, int> index;
  for (std::size_t n = 3; n < rows.size(); ++n) {
    const IntTriple &r1 = rows[n - 1], &r2 = rows[n - 2], &r3 = rows[n - 3], &t = rows[n];
    const Int d = detail::det3i(r1, r2, r3);
    if (d == 0)
      throw InvalidInput("singular system at n = " + std::to_string(n) + ": Delta_" + std::to_string(n - 1) + " = 0");
    Letter mu{Rat(detail::det3i(t, r2, r3), d), Rat(detail::det3i(r1, t, r3), d), Rat(detail::det3i(r1, r2, t), d)};
    for (auto& x : mu) x.canonicalize();
    for (int j = 0; j < 3; ++j)
      if (mu[0] * r1[j] + mu[1] * r2[j] + mu[2] * r3[j] != t[j])
        throw CertificationFailure("letter mu_" + std::to_string(n) + " does not reconstruct its triple");
    for (const auto& x : mu) w.height_bound = std::max({w.height_bound, Int(abs(x.get_num())), Int(x.get_den())});
    auto [it, fresh] = index.emplace(mu, static_cast<int>(w.alphabet.size()));
    if (fresh) w.alphabet.push_back(mu);
    w.ids.push_back(it->second);
    w.letters.push_back(mu);
  }
  const auto z = detail::z_function(w.ids);
  w.recurrence_table.assign(w.ids.size(), std::nullopt);
  // least k with z[k] >= N + 1, for every N at once
  std::size_t covered = 0;
  for (std::size_t k = 1; k < z.size(); ++k) {
    while (covered < z[k] && covered < w.recurrence_table.size()) w.recurrence_table[covered++] = static_cast<long>(k);
  }
  return w;
}

// -- determinant identities -------------------------------------------------

struct Lemma21Report {
  std::size_t m = 0, k = 0;
  DetXYZ xyz;
  bool all_zero = false;
  Interval ratio_x, ratio_y, ratio_z;  // |x| / (q_m^{1/2} q_k), same for y, z
  Interval ratio_lin;                   // max(|x alpha - y|, |x beta - z|) / (q_m^{1/2} q_k^{-1/2})
};

inline Lemma21Report verify_lemma21(const ApproxSequence& seq, std::size_t m, std::size_t k) {
  if (!seq.alpha || !seq.beta) throw InvalidInput("verify_lemma21 needs the real inputs of the sequence");
  const auto rows = seq.rows();
  Lemma21Report rep;
  rep.m = m;
  rep.k = k;
  rep.xyz = det_xyz(rows, m, k);
  const auto& [x, y, z] = rep.xyz;
  rep.all_zero = x == 0 && y == 0 && z == 0;
  auto bits = [](const Int& v) { return static_cast<mpfr_prec_t>(mpz_sizeinbase(v.get_mpz_t(), 2)); };
  const mpfr_prec_t p = 128 + bits(x) + std::max(bits(y), bits(z));
  const Interval sq_m = littlewood::sqrt(Interval::from_int(rows[m][0], p));
  const Interval qk = Interval::from_int(rows[k][0], p);
  const Interval den = sq_m * qk;
  rep.ratio_x = littlewood::abs(Interval::from_int(x, p)) / den;
  rep.ratio_y = littlewood::abs(Interval::from_int(y, p)) / den;
  rep.ratio_z = littlewood::abs(Interval::from_int(z, p)) / den;
  const Interval X = Interval::from_int(x, p);
  const Interval la = littlewood::abs(X * seq.alpha->at(p) - Interval::from_int(y, p));
  const Interval lb = littlewood::abs(X * seq.beta->at(p) - Interval::from_int(z, p));
  rep.ratio_lin = max(la, lb) * littlewood::sqrt(qk) / sq_m;
  return rep;
}

struct Lemma21Scan {
  std::vector<Lemma21Report> rows;
  long empirical_L = 1;  // x_{m,k} != 0 whenever k - m >= L in the scan
  bool any_all_zero = false;
  double max_ratio_xyz = 0, max_ratio_lin = 0;
};

inline Lemma21Scan lemma21_scan(const ApproxSequence& seq, std::size_t m, std::size_t k_lo, std::size_t k_hi) {
  Lemma21Scan scan;
  k_hi = std::min(k_hi, seq.size() - 1);
  for (std::size_t k = std::max(k_lo, m + 1); k <= k_hi; ++k) {
    Lemma21Report r = verify_lemma21(seq, m, k);
    if (r.xyz.x == 0) scan.empirical_L = std::max(scan.empirical_L, static_cast<long>(k - m) + 1);
    scan.any_all_zero = scan.any_all_zero || r.all_zero;
    scan.max_ratio_xyz = std::max({scan.max_ratio_xyz, r.ratio_x.hi_double(), r.ratio_y.hi_double(), r.ratio_z.hi_double()});
    scan.max_ratio_lin = std::max(scan.max_ratio_lin, r.ratio_lin.hi_double());
    scan.rows.push_back(std::move(r));
  }
  return scan;
}

enum class Lemma22Status { Verified, Skipped, Failed };

struct Lemma22Report {
  Lemma22Status status = Lemma22Status::Skipped;
  std::string reason;
  std::size_t m = 0, k = 0;
  std::array<bool, 3> equal{false, false, false};  // x, y, z identities
  std::optional<Rat> growth_ratio;                  // q_k / (q_m q_{k-m}) when q_m q_{k-m} != 0
};

/// x_{m,k} / Delta_m = x_{2,k-m+2} / Delta_2 (and y, z) when
/// mu_{k-i} = mu_{m-i} for 0 <= i <= m-3.
inline Lemma22Report verify_lemma22(const ApproxSequence& seq, const RecurrenceWord& word, std::size_t m,
                                    std::size_t k) {
  const auto rows = seq.rows();
  if (m < 2 || k <= m || k >= rows.size())
    throw InvalidInput("verify_lemma22: need 2 <= m < k < " + std::to_string(rows.size()));
  Lemma22Report rep;
  rep.m = m;
  rep.k = k;
  for (std::size_t i = 0; i + 3 <= m; ++i) {
    if (k - i - 3 >= word.letters.size()) {
      rep.reason = "word does not cover mu_" + std::to_string(k - i);
      return rep;
    }
    if (word.mu(k - i) != word.mu(m - i)) {
      rep.reason = "mu_" + std::to_string(k - i) + " != mu_" + std::to_string(m - i);
      return rep;
    }
  }
  const Int dm = delta(rows, m), d2 = delta(rows, 2);
  if (dm == 0 || d2 == 0) {
    rep.reason = "vanishing Delta";
    return rep;
  }
  const DetXYZ a = det_xyz(rows, m, k), b = det_xyz(rows, 2, k - m + 2);
  rep.equal = {a.x * d2 == b.x * dm, a.y * d2 == b.y * dm, a.z * d2 == b.z * dm};
  if (const Int den = rows[m][0] * rows[k - m][0]; den != 0) {
    rep.growth_ratio = Rat(rows[k][0], den);
    rep.growth_ratio->canonicalize();
  }
  const bool ok = rep.equal[0] && rep.equal[1] && rep.equal[2];
  rep.status = ok ? Lemma22Status::Verified : Lemma22Status::Failed;
  if (!ok) rep.reason = "identity mismatch";
  return rep;
}

// -- witness search ---------------------------------------------------------------

/// k_0 = 3; k_{i+1} the least k > k_i with mu_3..mu_{k_i} = mu_{k-k_i+3}..mu_k.
/// `ids[i]` is the letter of mu_{i+3}.
inline std::vector<std::size_t> recurrence_ladder(const std::vector<int>& ids) {
  std::vector<std::size_t> ladder;
  if (ids.empty()) return ladder;
  const auto z = detail::z_function(ids);
  std::size_t k = 3;
  ladder.push_back(k);
  for (;;) {
    std::optional<std::size_t> next;
    for (std::size_t s = 1; s < z.size(); ++s) {
      if (z[s] >= k - 2) {
        next = k + s;
        break;
      }
    }
    if (!next) break;
    k = *next;
    ladder.push_back(k);
  }
  return ladder;
}

inline std::vector<std::size_t> recurrence_ladder(const RecurrenceWord& word) { return recurrence_ladder(word.ids); }

struct ProjectiveStep {
  Rat lambda = 0;
  Interval spread;  // max_j |alpha_{k_h-j} - lambda alpha_{k_i-j}|
  Interval scale;   // max_j |alpha_{k_h-j}|
};

/// Minimizer of the piecewise-linear max over its breakpoints.
inline ProjectiveStep projective_step(const std::array<Interval, 3>& a, const std::array<Interval, 3>& b) {
  std::vector<Rat> cands;
  auto add = [&](const Interval& num, const Interval& den) {
    if (den.contains_zero()) return;
    cands.push_back((num / den).mid_rat());
  };
  for (int j = 0; j < 3; ++j) {
    add(a[j], b[j]);
    for (int l = j + 1; l < 3; ++l) {
      add(a[j] - a[l], b[j] - b[l]);
      add(a[j] + a[l], b[j] + b[l]);
    }
  }
  if (cands.empty()) cands.push_back(0);
  const mpfr_prec_t p = a[0].precision();
  auto spread = [&](const Rat& lam) {
    const Interval L = Interval::from_rat(lam, p);
    Interval m = littlewood::abs(a[0] - L * b[0]);
    for (int j = 1; j < 3; ++j) m = max(m, littlewood::abs(a[j] - L * b[j]));
    return m;
  };
  ProjectiveStep best{cands[0], spread(cands[0]), Interval(p)};
  for (std::size_t i = 1; i < cands.size(); ++i) {
    Interval s = spread(cands[i]);
    if (mpfr_less_p(s.hi(), best.spread.hi())) best = ProjectiveStep{cands[i], s, Interval(p)};
  }
  best.scale = max(littlewood::abs(a[0]), max(littlewood::abs(a[1]), littlewood::abs(a[2])));
  return best;
}

struct Thm13Options {
  // G for the gcd reduction; 0 derives it per candidate from C_bad2 and the
  // candidate's own beta bound
  Int G = 0;
  std::optional<Rat> C_bad2;
  mpfr_prec_t prec_cap = kDefaultScanCap;
};

/// Q = x_{k_i,k_h}, R = y_{k_i,k_h}, S = z_{k_i,k_h} over ladder pairs whose
/// (q, r) mod hD agree at k-0, k-1, k-2, accepted when
/// Q^{1/2} |Q alpha - R| <= eps is certified, then gcd-reduced against G.
inline LdivWitness theorem13_search(const ApproxSequence& seq, const RecurrenceWord& word, const Int& D,
                                    const Rat& eps, const Thm13Options& opt = {}) {
  if (D < 1) throw InvalidInput("D must be >= 1");
  if (eps <= 0 || eps > 1) throw InvalidInput("eps must lie in (0, 1]");
  if (!seq.alpha || !seq.beta || !seq.alpha->element() || !seq.beta->element())
    throw InvalidInput("theorem13_search needs a sequence built from field elements");
  if (opt.G < 0 || (opt.G == 0 && (!opt.C_bad2 || *opt.C_bad2 <= 0)))
    throw InvalidInput("theorem13_search needs G >= 1 or a positive C_bad2");
  const auto t0 = std::chrono::steady_clock::now();
  const FieldElement& alpha = *seq.alpha->element();
  const FieldElement& beta = *seq.beta->element();
  const auto rows = seq.rows();
  // ladders of the tails (q_n)_{n >= t}, in absolute indices
  std::vector<std::vector<std::size_t>> ladders;
  for (std::size_t t = 0; t < word.ids.size(); ++t) {
    const std::vector<int> tail(word.ids.begin() + static_cast<long>(t), word.ids.end());
    auto lad = recurrence_ladder(tail);
    if (lad.size() < 2) continue;
    for (auto& k : lad) k += t;
    ladders.push_back(std::move(lad));
  }
  if (ladders.empty()) throw NotFoundInWindow("no tail of the word recurs within the window");

  std::vector<Int> hs{Int(1)};
  for (const auto& pp : factorize(D)) {
    // without a fixed G the exponents are capped by the largest G a candidate may need
    const unsigned long vmax = opt.G > 0 ? p_adic_valuation(opt.G, pp.prime) : 0;
    std::vector<Int> next;
    for (const Int& h : hs) {
      Int x = h;
      for (unsigned long e = 0; e <= vmax; ++e, x *= pp.prime) next.push_back(x);
    }
    hs = std::move(next);
  }
  std::sort(hs.begin(), hs.end());

  std::size_t pairs_tried = 0;
  for (const Int& h : hs) {
    const Int M = h * D;
    for (const auto& ladder : ladders) {
      std::map<std::array<Int, 6>, std::vector<std::size_t>> classes;
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        const std::size_t k = ladder[i];
        std::array<Int, 6> key;
        for (int j = 0; j < 3; ++j) {
          key[2 * j] = mod_floor(rows[k - j][0], M);
          key[2 * j + 1] = mod_floor(rows[k - j][1], M);
        }
        classes[key].push_back(i);
      }
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (const auto& [key, members] : classes)
        for (std::size_t a = 0; a < members.size(); ++a)
          for (std::size_t b = a + 1; b < members.size(); ++b) pairs.emplace_back(members[a], members[b]);
      std::sort(pairs.begin(), pairs.end(), [](const auto& u, const auto& v) {
        return u.second != v.second ? u.second < v.second : u.first < v.first;
      });
      for (const auto& [i, hh] : pairs) {
        ++pairs_tried;
        const std::size_t ki = ladder[i], kh = ladder[hh];
        DetXYZ d = det_xyz(rows, ki, kh);
        if (d.x == 0) continue;
        if (d.x < 0) d = DetXYZ{-d.x, -d.y, -d.z};
        const mpfr_prec_t p0 = 2 * point_precision(d.x);
        struct Bounds {
          Interval a, b, logQ;
          mpfr_prec_t prec;
        };
        std::optional<Bounds> bounds;
        try {
          bounds = with_precision(p0, opt.prec_cap, [&](mpfr_prec_t p) -> std::optional<Bounds> {
            const Interval X = Interval::from_int(d.x, p);
            const Interval sx = littlewood::sqrt(X);
            Interval ba = sx * littlewood::abs(X * seq.alpha->at(p) - Interval::from_int(d.y, p));
            Interval bb = sx * littlewood::abs(X * seq.beta->at(p) - Interval::from_int(d.z, p));
            if (ba.hi_leq(eps)) return Bounds{ba, bb, littlewood::log(X), p};
            if (ba.lo_greater(eps)) return std::nullopt;
            throw Undecided("alpha bound not separated from eps");
          });
        } catch (const PrecisionExhausted&) {
          continue;
        }
        if (!bounds) continue;
        LdivWitness w(alpha, beta, FieldElement::rational(alpha.field(), 0));
        w.Q = d.x;
        w.R = d.y;
        w.S = d.z;
        w.D = D;
        w.modulus = M;
        w.gcd_factor = h;
        w.eps = eps;
        w.provenance = Provenance::Thm13Search;
        w.precision_bits = bounds->prec;
        w.cert.alpha_bound = bounds->a;
        w.cert.beta_bound = bounds->b;
        w.cert.logQ = bounds->logQ;
        w.cert.Q_pos = true;
        w.cert.div_ok = divides(M, w.Q) && divides(M, w.R);
        detail::add_check(w, "congruence", w.cert.div_ok, "mod " + M.get_str());
        std::array<Interval, 3> ah, ai;
        for (int j = 0; j < 3; ++j) {
          ah[j] = seq.triples[kh - j].residual_alpha;
          ai[j] = seq.triples[ki - j].residual_alpha;
        }
        const ProjectiveStep ps = projective_step(ah, ai);
        detail::add_check(w, "projective_step", true,
                          "k_i=" + std::to_string(ki) + " k_h=" + std::to_string(kh) + " lambda=" + std::to_string(ps.lambda.get_d()) +
                              " spread=" + ps.spread.hi_str(6) + " scale=" + ps.scale.hi_str(6));
        if (!w.cert.div_ok) continue;
        Int G = opt.G;
        if (G == 0) G = lemma23_G(lemma23_C3(*opt.C_bad2, std::max(Rat(1), bounds->b.hi_rat())).ceiling);
        LdivWitness r = gcd_reduce(w, G);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.cert.div_ok) return r;
      }
    }
  }
  throw NotFoundInWindow("no ladder pair certified in the window (" + std::to_string(ladders.size()) + " ladders, " +
                         std::to_string(pairs_tried) + " congruent pairs)");
}

// -- Lagrange estimates ----------------------------------------------------------

struct LagrangeEstimate {
  Int D;
  long long q_max = 0;
  Int q_star;
  Interval c_hat;          // enclosure of min_Q Q^{1/2} max(||Q D alpha||, ||Q D beta||)
  Interval c_hat_sqrtD;    // c_hat * D^{1/2}
};

inline LagrangeEstimate lagrange_estimate(const RealSource& alpha, const RealSource& beta, const Int& D,
                                          long long q_max, mpfr_prec_t cap = kDefaultScanCap) {
  if (D < 1) throw InvalidInput("D must be >= 1");
  if (q_max < 1) throw InvalidInput("q_max must be >= 1");
  const ScanMinimum m = scan_minimum(alpha.scaled(D), beta.scaled(D), q_max, cap);
  LagrangeEstimate e{D, q_max, m.q_star, m.value, m.value};
  const mpfr_prec_t p = std::max<mpfr_prec_t>(64, m.value.precision());
  e.c_hat_sqrtD = m.value * littlewood::sqrt(Interval::from_int(D, p));
  return e;
}

}  // namespace littlewood
