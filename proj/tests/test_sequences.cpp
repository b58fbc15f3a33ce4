#include <gtest/gtest.h>

#include <random>

#include "littlewood/sequences.hpp"

using namespace littlewood;

namespace {

struct PlasticSeq {
  FieldPtr f = field_create("x^3-x-1");
  FieldElement t = FieldElement::theta(f);
  RealSource a = RealSource::from_element(t);
  RealSource b = RealSource::from_element(t * t);
  ApproxSequence raw, seq;
  RecurrenceWord word;
  PlasticSeq() {
    raw = extract_sequence(a, b, default_extraction_C(a, b), 100000);
    seq = raw;
    thin_sequence(seq);
    word = fit_recurrence(seq);
  }
};

const PlasticSeq& plastic() {
  static const PlasticSeq p;
  return p;
}

IntTriple row(long a, long b, long c) { return {Int(a), Int(b), Int(c)}; }

// Rows of q_n = q_{n-1} + q_{n-2} + q_{n-3} started from the identity: every letter is (1, 1, 1).
std::vector<IntTriple> tribonacci_rows(std::size_t n) {
  std::vector<IntTriple> rows{row(0, 0, 1), row(0, 1, 0), row(1, 0, 0)};
  while (rows.size() < n) {
    const auto& x = rows[rows.size() - 1];
    const auto& y = rows[rows.size() - 2];
    const auto& z = rows[rows.size() - 3];
    rows.push_back({x[0] + y[0] + z[0], x[1] + y[1] + z[1], x[2] + y[2] + z[2]});
  }
  return rows;
}

}  // namespace

TEST(Nearest, RoundHalfEven) {
  EXPECT_EQ(round_half_even(Rat(1, 2)), 0);
  EXPECT_EQ(round_half_even(Rat(3, 2)), 2);
  EXPECT_EQ(round_half_even(Rat(-1, 2)), 0);
  EXPECT_EQ(round_half_even(Rat(7, 3)), 2);
  const RealSource h = RealSource::from_rational(Rat(1, 2));
  EXPECT_EQ(nearest(h, 1, 64).r, 0);
  EXPECT_EQ(nearest(h, 3, 64).r, 2);
}

TEST(Extract, Examples) {
  const PlasticSeq& p = plastic();
  const ApproxSequence s1 = extract_sequence(p.a, p.b, Rat(35, 100), 3);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(s1.triples[0].row(), row(1, 1, 2));
  const ApproxSequence s2 = extract_sequence(p.a, p.b, Rat(1, 2), 3);
  ASSERT_EQ(s2.size(), 2u);
  EXPECT_EQ(s2.triples[0].row(), row(1, 1, 2));
  EXPECT_EQ(s2.triples[1].row(), row(3, 4, 5));
  EXPECT_EQ(extract_sequence(p.a, p.b, Rat(1, 100), 10).size(), 0u);
  EXPECT_THROW(extract_sequence(p.a, p.b, Rat(0), 10), InvalidInput);
  EXPECT_THROW(extract_sequence(p.a, p.b, Rat(1), 0), InvalidInput);
}

TEST(Extract, AgreesWithCertifiedPointwiseScan) {
  const PlasticSeq& p = plastic();
  const Rat C(6, 10);
  const ApproxSequence s = extract_sequence(p.a, p.b, C, 3000);
  std::vector<Int> want;
  for (long q = 1; q <= 3000; ++q) {
    const PointEval e = evaluate_point(p.a, p.b, Int(q), 160);
    const int c = compare_to_threshold(e, C);
    ASSERT_NE(c, 0);
    if (c < 0) want.push_back(Int(q));
  }
  ASSERT_EQ(s.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(s.triples[i].q, want[i]);
}

TEST(Extract, LargerThresholdGivesSuperset) {
  const PlasticSeq& p = plastic();
  std::vector<Rat> Cs{Rat(3, 10), Rat(4, 10), Rat(1, 2), Rat(7, 10), Rat(1)};
  for (std::size_t i = 0; i + 1 < Cs.size(); ++i) {
    const auto small = extract_sequence(p.a, p.b, Cs[i], 20000).rows();
    const auto big = extract_sequence(p.a, p.b, Cs[i + 1], 20000).rows();
    for (const auto& r : small) EXPECT_NE(std::find(big.begin(), big.end(), r), big.end());
  }
}

TEST(Extract, RationalInputsExact) {
  // alpha = 1/3, beta = 2/5: q = 15 gives an exact zero
  const ApproxSequence s =
      extract_sequence(RealSource::from_rational(Rat(1, 3)), RealSource::from_rational(Rat(2, 5)), Rat(1, 100), 30);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.triples[0].row(), row(15, 5, 6));
  EXPECT_EQ(s.triples[1].row(), row(30, 10, 12));
}

TEST(Profile, Examples) {
  EXPECT_THROW(verify_profile(sequence_from_rows({row(1, 0, 0), row(0, 1, 0)})), InvalidInput);
  const SequenceProfile id = verify_profile(sequence_from_rows({row(0, 0, 1), row(0, 1, 0), row(1, 0, 0)}));
  EXPECT_EQ(abs(id.delta_at(2)), 1);
  EXPECT_TRUE(id.all_delta_nonzero());
}

TEST(Profile, PlasticDeltasAreUnits) {
  const PlasticSeq& p = plastic();
  EXPECT_GE(p.seq.size(), 8u);
  const SequenceProfile prof = verify_profile(p.seq);
  EXPECT_TRUE(prof.all_delta_nonzero());
  for (const Int& d : prof.deltas) EXPECT_EQ(abs(d), 1);
  EXPECT_EQ(prof.delta_bound, 1);
  EXPECT_GT(prof.ratio_max, 1);
  ASSERT_TRUE(prof.C_bad2.has_value());
  EXPECT_TRUE(prof.C_bad2->value.certainly_positive());
}

TEST(Thinning, RemovesZeroDeterminants) {
  const PlasticSeq& p = plastic();
  for (std::size_t n = 2; n < p.seq.size(); ++n) EXPECT_NE(delta(p.seq, n), 0);
  EXPECT_EQ(p.seq.size() + p.seq.dropped.size(), p.raw.size());
  ApproxSequence s = sequence_from_rows({row(1, 0, 0), row(0, 1, 0), row(1, 1, 0), row(0, 0, 1), row(1, 1, 1)});
  thin_sequence(s);
  for (std::size_t n = 2; n < s.size(); ++n) EXPECT_NE(delta(s, n), 0);
}

TEST(FitRecurrence, IdentityRows) {
  const RecurrenceWord w = fit_recurrence(sequence_from_rows({row(1, 0, 0), row(0, 1, 0), row(0, 0, 1), row(2, 3, 5)}));
  ASSERT_EQ(w.letters.size(), 1u);
  // q_n = a q_{n-1} + b q_{n-2} + c q_{n-3}
  EXPECT_EQ(w.mu(3), (Letter{Rat(5), Rat(3), Rat(2)}));
  const RecurrenceWord r = fit_recurrence(sequence_from_rows({row(0, 0, 1), row(0, 1, 0), row(1, 0, 0), row(2, 3, 5)}));
  EXPECT_EQ(r.mu(3), (Letter{Rat(2), Rat(3), Rat(5)}));
}

TEST(FitRecurrence, RepeatedTopRow) {
  const std::vector<IntTriple> rows{row(0, 0, 1), row(0, 1, 0), row(1, 0, 0), row(1, 0, 0)};
  const RecurrenceWord w = fit_recurrence(sequence_from_rows(rows));
  EXPECT_EQ(w.mu(3), (Letter{Rat(1), Rat(0), Rat(0)}));
  EXPECT_EQ(delta(rows, 3), 0);
}

TEST(FitRecurrence, SingularSystemRejected) {
  EXPECT_THROW(fit_recurrence(sequence_from_rows({row(1, 0, 0), row(2, 0, 0), row(0, 0, 1), row(1, 1, 1)})), InvalidInput);
  EXPECT_THROW(fit_recurrence(sequence_from_rows({row(1, 0, 0), row(0, 1, 0), row(0, 0, 1)})), InvalidInput);
}

TEST(FitRecurrence, PlasticRoundTrip) {
  const PlasticSeq& p = plastic();
  const auto rows = p.seq.rows();
  ASSERT_EQ(p.word.letters.size(), rows.size() - 3);
  for (std::size_t n = 3; n < rows.size(); ++n) {
    const Letter& m = p.word.mu(n);
    for (int j = 0; j < 3; ++j)
      EXPECT_EQ(Rat(rows[n][j]), m[0] * rows[n - 1][j] + m[1] * rows[n - 2][j] + m[2] * rows[n - 3][j]);
    // det(A_n) = c_n = Delta_n / Delta_{n-1}
    EXPECT_EQ(m[2] * delta(rows, n - 1), Rat(delta(rows, n)));
  }
  Int h = 0;
  for (const Letter& l : p.word.letters)
    for (const Rat& c : l) h = std::max({h, Int(abs(c.get_num())), Int(c.get_den())});
  EXPECT_EQ(h, p.word.height_bound);
  EXPECT_EQ(p.word.ids.size(), p.word.letters.size());
  for (std::size_t i = 0; i < p.word.ids.size(); ++i) EXPECT_EQ(p.word.alphabet[p.word.ids[i]], p.word.letters[i]);
}

TEST(WordScan, Examples) {
  EXPECT_EQ(word_recurrence_scan(std::vector<int>{0, 1, 0, 0, 1}, 1), 3);
  EXPECT_EQ(word_recurrence_scan(std::vector<int>{0, 1, 0, 1, 0, 1, 0, 1}, 2), 2);
  EXPECT_EQ(word_recurrence_scan(std::vector<int>(10, 4), 5), 1);
  EXPECT_FALSE(word_recurrence_scan(std::vector<int>{0, 1, 2, 3}, 0).has_value());
}

TEST(WordScan, MatchesBruteForce) {
  std::mt19937 rng(12);
  for (int it = 0; it < 200; ++it) {
    std::vector<int> w(5 + rng() % 20);
    for (int& c : w) c = static_cast<int>(rng() % 3);
    for (std::size_t N = 0; N < w.size(); ++N) {
      std::optional<long> want;
      for (std::size_t k = 1; k + N < w.size() && !want; ++k) {
        bool ok = true;
        for (std::size_t n = 0; n <= N && ok; ++n) ok = w[n] == w[n + k];
        if (ok) want = static_cast<long>(k);
      }
      EXPECT_EQ(word_recurrence_scan(w, N), want);
    }
  }
}

TEST(DetXYZ, Example) {
  const std::vector<IntTriple> rows{row(2, 1, 0), row(3, 2, 0), row(5, 4, 0), row(8, 0, 0)};
  EXPECT_EQ(det_xyz(rows, 2, 3).x, 1);
  EXPECT_EQ(delta(tribonacci_rows(3), 2), detail::det3i(row(1, 0, 0), row(0, 1, 0), row(0, 0, 1)));
}

TEST(DeterminantScan, PlasticScan) {
  const PlasticSeq& p = plastic();
  const Lemma21Scan scan = lemma21_scan(p.seq, 2, 4, 20);
  EXPECT_FALSE(scan.any_all_zero);
  for (const auto& r : scan.rows) EXPECT_NE(r.xyz.x, 0) << r.k;
  const Lemma21Report r = verify_lemma21(p.seq, 2, 5);
  EXPECT_FALSE(r.all_zero);
  EXPECT_TRUE(r.ratio_x.certainly_positive());
  EXPECT_THROW(verify_lemma21(sequence_from_rows(tribonacci_rows(6)), 2, 5), InvalidInput);
}

TEST(DeterminantIdentity, ConstantWord) {
  const ApproxSequence s = sequence_from_rows(tribonacci_rows(14));
  const RecurrenceWord w = fit_recurrence(s);
  EXPECT_EQ(w.alphabet.size(), 1u);
  for (std::size_t m = 2; m < 13; ++m)
    for (std::size_t k = m + 1; k < 14; ++k) EXPECT_EQ(verify_lemma22(s, w, m, k).status, Lemma22Status::Verified) << m << k;
}

TEST(DeterminantIdentity, PlasticWindow) {
  const PlasticSeq& p = plastic();
  int verified = 0;
  for (std::size_t m = 2; m + 1 < p.seq.size(); ++m)
    for (std::size_t k = m + 1; k < p.seq.size(); ++k) {
      const Lemma22Report r = verify_lemma22(p.seq, p.word, m, k);
      EXPECT_NE(r.status, Lemma22Status::Failed) << m << " " << k;
      verified += r.status == Lemma22Status::Verified;
    }
  EXPECT_GT(verified, 0);
}

TEST(DeterminantIdentity, SkippedWhenLettersDiffer) {
  std::vector<IntTriple> rows{row(0, 0, 1), row(0, 1, 0), row(1, 0, 0), row(2, 3, 5), row(9, 1, 1), row(7, 7, 2)};
  const ApproxSequence s = sequence_from_rows(rows);
  const RecurrenceWord w = fit_recurrence(s);
  ASSERT_NE(w.mu(3), w.mu(4));
  const Lemma22Report r = verify_lemma22(s, w, 3, 4);
  EXPECT_EQ(r.status, Lemma22Status::Skipped);
  EXPECT_FALSE(r.reason.empty());
  EXPECT_THROW(verify_lemma22(s, w, 4, 4), InvalidInput);
}

TEST(Ladder, ConstantWordStepsByOne) {
  const auto lad = recurrence_ladder(std::vector<int>(8, 0));
  ASSERT_GE(lad.size(), 2u);
  for (std::size_t i = 1; i < lad.size(); ++i) EXPECT_GT(lad[i], lad[i - 1]);
}

TEST(WitnessSearch, PlasticWitness) {
  const PlasticSeq& p = plastic();
  Thm13Options opt;
  opt.C_bad2 = scan_minimum(p.a, p.b, 100000).value.lo_rat();
  const LdivWitness w = theorem13_search(p.seq, p.word, Int(1), Rat(1), opt);
  EXPECT_EQ(w.provenance, Provenance::Thm13Search);
  EXPECT_GT(w.Q, 0);
  EXPECT_EQ(triple_gcd(w.Q, w.R, w.S), 1);
  EXPECT_TRUE(w.cert.alpha_bound.hi_leq(Rat(1)));
}

TEST(WitnessSearch, DivisibilityForLargerD) {
  const PlasticSeq& p = plastic();
  Thm13Options opt;
  opt.C_bad2 = scan_minimum(p.a, p.b, 100000).value.lo_rat();
  for (long D : {2L, 3L}) {
    try {
      const LdivWitness w = theorem13_search(p.seq, p.word, Int(D), Rat(1), opt);
      EXPECT_TRUE(divides(Int(D), w.Q));
      EXPECT_TRUE(divides(Int(D), w.R));
      EXPECT_EQ(triple_gcd(w.Q, w.R, w.S), 1);
    } catch (const NotFoundInWindow&) {
      SUCCEED() << "window too short for D = " << D;
    }
  }
}

TEST(WitnessSearch, HugeDNotFound) {
  const PlasticSeq& p = plastic();
  Thm13Options opt;
  opt.C_bad2 = Rat(1, 4);
  EXPECT_THROW(theorem13_search(p.seq, p.word, Int(1000003), Rat(1), opt), NotFoundInWindow);
  EXPECT_THROW(theorem13_search(p.seq, p.word, Int(1), Rat(1), Thm13Options{}), InvalidInput);
}

TEST(Lagrange, Examples) {
  const PlasticSeq& p = plastic();
  const LagrangeEstimate e = lagrange_estimate(p.a, p.b, 1, 3);
  EXPECT_EQ(e.q_star, 1);
  EXPECT_NEAR(e.c_hat.mid_double(), 0.3247, 1e-4);
  const LagrangeEstimate one = lagrange_estimate(p.a, p.b, 1, 1);
  // max(||theta||, ||theta^2||) = theta - 1
  const Interval tm1 = embed(p.t, 128).id_value - Interval::from_long(1, 128);
  EXPECT_TRUE(one.c_hat.overlaps(tm1));
  EXPECT_THROW(lagrange_estimate(p.a, p.b, 0, 10), InvalidInput);
}

TEST(Lagrange, AntitoneInQmax) {
  const PlasticSeq& p = plastic();
  for (long D : {1L, 2L, 5L}) {
    Rat prev_hi = 0;
    bool first = true;
    for (long long q : {1LL, 3LL, 10LL, 100LL, 1000LL, 10000LL, 100000LL}) {
      const LagrangeEstimate e = lagrange_estimate(p.a, p.b, Int(D), q);
      if (!first) {
        EXPECT_TRUE(e.c_hat.lo_rat() <= prev_hi) << D << " " << q;
      }
      prev_hi = e.c_hat.hi_rat();
      first = false;
    }
  }
}
