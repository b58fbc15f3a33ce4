// littlewood: command-line front end.
//
// Exit codes: 0 ok, 1 certification/verification failure, 2 invalid input,
// 3 precision exhaustion, 4 not found in the search window.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "littlewood/littlewood.hpp"

namespace lw = littlewood;

namespace {

struct RunConfig {
  std::string poly;
  std::string alpha = "t";
  std::string beta = "t^2";
  std::string D = "1";
  std::string eps = "1";
  long long qmax = 0;
  long prec_cap = lw::kMaxPrecision;
  std::string out;
  std::string fixtures;
  // command-specific
  std::string C;
  std::string zeta = "t";
  std::string primes = "2,3,5";
  unsigned long nu_max = 2;
  long D_max = 12;
  long unit_bound = lw::kDefaultUnitSearchBound;
  std::string word_out;
  bool no_thin = false;
  std::string witness;
};

struct Inputs {
  lw::FieldPtr field;
  lw::FieldElement alpha, beta;
};

Inputs parse_inputs(const RunConfig& cfg) {
  if (cfg.poly.empty()) throw lw::InvalidInput("--poly is required");
  lw::FieldPtr f = lw::field_create(cfg.poly);
  return {f, lw::parse_element(f, cfg.alpha), lw::parse_element(f, cfg.beta)};
}

lw::Int parse_positive(const std::string& text, const char* what) {
  const lw::Rat r = lw::parse_rational(text);
  if (r.get_den() != 1 || r < 1) throw lw::InvalidInput(std::string(what) + " must be a positive integer, got " + text);
  return r.get_num();
}

std::pair<long, long> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const long d = parse_positive(text, "--D").get_si();
    return {d, d};
  }
  const long a = parse_positive(text.substr(0, dots), "--D").get_si();
  const long b = parse_positive(text.substr(dots + 2), "--D").get_si();
  if (b < a) throw lw::InvalidInput("empty --D range " + text);
  return {a, b};
}

lw::Rat parse_eps(const std::string& text) {
  bool snapped = false;
  const lw::Rat raw = lw::parse_rational(text);
  const lw::Rat eps = lw::snap_eps(raw, &snapped);
  if (snapped) std::cerr << "warning: eps " << lw::rat_str(raw) << " snapped to " << lw::rat_str(eps) << "\n";
  return eps;
}

std::optional<lw::Fixtures> load_fixtures(const RunConfig& cfg) {
  if (cfg.fixtures.empty()) return std::nullopt;
  return lw::Fixtures::load(cfg.fixtures);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out);
  if (!out) throw lw::InvalidInput("cannot write " + cfg.out);
  out << text;
}

// Summary lines go to stdout when the payload goes to a file, else to stderr.
std::ostream& info(const RunConfig& cfg) { return cfg.out.empty() ? std::cerr : std::cout; }

std::string digits(const lw::Int& x) { return std::to_string(x.get_str().size() - (x < 0 ? 1 : 0)); }

/// G from fixtures, or from a fresh scan minimum and the h = 1 construction.
lw::Int resolve_G(const RunConfig& cfg, const std::optional<lw::Fixtures>& fx, const lw::PeckPlan& plan,
                  const Inputs& in, const lw::Int& D, const lw::Rat& eps, const lw::PeckOptions& opt) {
  const std::string sec = in.field->poly_str();
  if (fx && fx->has(sec, "G")) return fx->get_int(sec, "G");
  const long long qmax = cfg.qmax > 0 ? cfg.qmax : 1000000;
  const lw::Rat C = lw::scan_minimum(lw::RealSource::from_element(in.alpha), lw::RealSource::from_element(in.beta), qmax)
                        .value.lo_rat();
  const lw::LdivWitness w0 = lw::construct_unreduced(plan, in.alpha, in.beta, D, eps, opt);
  const lw::Rat c2 = std::max(w0.cert.alpha_bound.hi_rat(), w0.cert.beta_bound.hi_rat());
  const lw::Int G = lw::lemma23_G(lw::lemma23_C3(C, c2).ceiling);
  std::cerr << "warning: no G in fixtures; derived G = " << G.get_str() << " from this cell\n";
  return G;
}

void print_witness_summary(std::ostream& os, const lw::LdivWitness& w) {
  os << "provenance: " << lw::provenance_name(w.provenance) << "\n";
  os << "Q digits: " << digits(w.Q) << "\n";
  os << "D: " << w.D.get_str() << "  D_factor: " << w.D_factor.get_str() << "  gcd_factor: " << w.gcd_factor.get_str()
     << "  gcd removed: " << w.gcd_before.get_str() << "\n";
  os << "Q^(1/2)|Q alpha - R|: " << w.cert.alpha_bound.str(8) << "\n";
  os << "Q^(1/2)|Q beta - S|:  " << w.cert.beta_bound.str(8) << "\n";
  os << "log Q: " << w.cert.logQ.str(8) << "\n";
}

// -- commands -------------------------------------------------------------------

int cmd_peck(const RunConfig& cfg) {
  const Inputs in = parse_inputs(cfg);
  const lw::Int D = parse_positive(cfg.D, "--D");
  const lw::Rat eps = parse_eps(cfg.eps);
  const auto fx = load_fixtures(cfg);
  lw::PeckOptions opt;
  opt.prec_cap = cfg.prec_cap;
  const lw::PeckPlan plan = lw::plan_peck(in.alpha, in.beta, cfg.unit_bound);
  const lw::Int G = resolve_G(cfg, fx, plan, in, D, eps, opt);
  const lw::LdivWitness w = lw::peck_construct(plan, in.alpha, in.beta, D, eps, G, opt);
  emit(cfg, lw::witness_to_json(w).dump(2) + "\n");
  print_witness_summary(info(cfg), w);
  return 0;
}

int cmd_padic(const RunConfig& cfg) {
  const Inputs in = parse_inputs(cfg);
  const lw::FieldElement zeta = lw::parse_element(in.field, cfg.zeta);
  const lw::FieldElement gamma = lw::gamma_construct(in.alpha, in.beta);
  std::ostringstream os;
  bool ok = true;
  os << "check,p,nu,exponent,holds,min_valuation,exact\n";
  std::stringstream ps(cfg.primes);
  std::string tok;
  while (std::getline(ps, tok, ',')) {
    const lw::Int p = parse_positive(tok, "--primes");
    for (unsigned long nu = 1; nu <= cfg.nu_max; ++nu) {
      const lw::Lemma31Report r = lw::check_lemma31(zeta, p, nu);
      ok = ok && r.holds;
      os << "valuation," << p.get_str() << "," << nu << "," << r.exponent.get_str() << "," << (r.holds ? 1 : 0) << ","
         << lw::rat_str(r.min_valuation) << "," << (r.exact ? 1 : 0) << "\n";
    }
  }
  os << "check,D,exponent,trace_gamma_residue,trace_gamma_alpha_residue,holds\n";
  for (long d = 1; d <= cfg.D_max; ++d) {
    const lw::Int D(d);
    const lw::Lemma32Report a = lw::check_lemma32(gamma, zeta, D);
    const lw::Lemma32Report b = lw::check_lemma32(gamma * in.alpha, zeta, D);
    const bool holds = a.holds && b.holds;
    ok = ok && holds;
    os << "divisibility," << d << "," << a.exponent.get_str() << "," << a.residue.get_str() << ","
       << b.residue.get_str() << "," << (holds ? 1 : 0) << "\n";
  }
  emit(cfg, os.str());
  info(cfg) << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  return ok ? 0 : 1;
}

lw::Rat sequence_C(const RunConfig& cfg, const std::optional<lw::Fixtures>& fx, const Inputs& in,
                   const lw::RealSource& a, const lw::RealSource& b) {
  if (!cfg.C.empty()) return lw::parse_rational(cfg.C);
  const std::string sec = in.field->poly_str();
  if (fx && fx->has(sec, "seq_C")) return fx->get_rat(sec, "seq_C");
  return lw::default_extraction_C(a, b);
}

std::string dump_sequence(const lw::ApproxSequence& seq) {
  std::ostringstream os;
  for (const auto& t : seq.triples)
    os << t.q.get_str() << " " << t.r.get_str() << " " << t.s.get_str() << " " << t.residual_alpha.lo_str() << " "
       << t.residual_alpha.hi_str() << " " << t.residual_beta.lo_str() << " " << t.residual_beta.hi_str() << "\n";
  return os.str();
}

std::string dump_word(const lw::RecurrenceWord& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) os << i + 3 << " " << lw::letter_str(w.letters[i]) << "\n";
  return os.str();
}

int cmd_sequence(const RunConfig& cfg) {
  const Inputs in = parse_inputs(cfg);
  const auto fx = load_fixtures(cfg);
  const auto a = lw::RealSource::from_element(in.alpha), b = lw::RealSource::from_element(in.beta);
  const long long qmax = cfg.qmax > 0 ? cfg.qmax : 100000;
  const lw::Rat C = sequence_C(cfg, fx, in, a, b);
  lw::ApproxSequence seq = lw::extract_sequence(a, b, C, qmax, cfg.prec_cap);
  const std::size_t raw = seq.size();
  if (!cfg.no_thin) lw::thin_sequence(seq);
  emit(cfg, dump_sequence(seq));
  std::ostream& os = info(cfg);
  os << "C: " << lw::rat_str(C) << "  q_max: " << qmax << "\n";
  os << "triples: " << raw << "  dropped by thinning: " << seq.dropped.size() << "\n";
  const lw::SequenceProfile prof = lw::verify_profile(seq, cfg.prec_cap);
  os << "ratio_max: " << lw::rat_str(prof.ratio_max) << "\n";
  if (prof.chi)
    os << "chi: " << *prof.chi << "  K: " << lw::rat_str(prof.K) << "\n";
  else
    os << "chi: none within half the sequence\n";
  os << "Delta nonzero: " << (prof.all_delta_nonzero() ? "all" : "NOT all") << "  max |Delta|: " << prof.delta_bound.get_str()
     << "\n";
  if (prof.C_bad2) os << "C_bad2 scan minimum: " << prof.C_bad2->value.str(8) << " at q = " << prof.C_bad2->q_star.get_str() << "\n";
  if (seq.size() >= 4 && prof.all_delta_nonzero()) {
    const lw::RecurrenceWord w = lw::fit_recurrence(seq);
    os << "letters: " << w.letters.size() << "  alphabet: " << w.alphabet.size()
       << "  height bound: " << w.height_bound.get_str() << "\n";
    os << "recurrence table (N: k):";
    for (std::size_t n = 0; n < w.recurrence_table.size(); ++n)
      os << " " << n << ":" << (w.recurrence_table[n] ? std::to_string(*w.recurrence_table[n]) : "-");
    os << "\n";
    if (!cfg.word_out.empty()) {
      std::ofstream wo(cfg.word_out);
      if (!wo) throw lw::InvalidInput("cannot write " + cfg.word_out);
      wo << dump_word(w);
    }
  }
  return prof.all_delta_nonzero() ? 0 : 1;
}

int cmd_thm13(const RunConfig& cfg) {
  const Inputs in = parse_inputs(cfg);
  const auto fx = load_fixtures(cfg);
  const lw::Int D = parse_positive(cfg.D, "--D");
  const lw::Rat eps = parse_eps(cfg.eps);
  const auto a = lw::RealSource::from_element(in.alpha), b = lw::RealSource::from_element(in.beta);
  const long long qmax = cfg.qmax > 0 ? cfg.qmax : 100000;
  lw::ApproxSequence seq = lw::extract_sequence(a, b, sequence_C(cfg, fx, in, a, b), qmax, cfg.prec_cap);
  lw::thin_sequence(seq);
  const lw::RecurrenceWord word = lw::fit_recurrence(seq);
  lw::Thm13Options opt;
  opt.prec_cap = cfg.prec_cap;
  const std::string sec = in.field->poly_str();
  if (fx && fx->has(sec, "G")) {
    opt.G = fx->get_int(sec, "G");
  } else {
    opt.C_bad2 = lw::scan_minimum(a, b, qmax).value.lo_rat();
  }
  const lw::LdivWitness w = lw::theorem13_search(seq, word, D, eps, opt);
  emit(cfg, lw::witness_to_json(w).dump(2) + "\n");
  print_witness_summary(info(cfg), w);
  return 0;
}

int cmd_lagrange(const RunConfig& cfg) {
  const Inputs in = parse_inputs(cfg);
  const auto [d0, d1] = parse_range(cfg.D);
  const long long qmax = cfg.qmax > 0 ? cfg.qmax : 1000000;
  const auto a = lw::RealSource::from_element(in.alpha), b = lw::RealSource::from_element(in.beta);
  std::ostringstream os;
  os << "D,q_star,c_hat_lo,c_hat_hi,c_hat_times_sqrtD_hi\n";
  for (long d = d0; d <= d1; ++d) {
    const lw::LagrangeEstimate e = lw::lagrange_estimate(a, b, lw::Int(d), qmax, cfg.prec_cap);
    os << d << "," << e.q_star.get_str() << "," << e.c_hat.lo_str() << "," << e.c_hat.hi_str() << ","
       << e.c_hat_sqrtD.hi_str() << "\n";
  }
  emit(cfg, os.str());
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const lw::StoredWitness s = lw::load_witness(cfg.witness);
  const lw::VerifyReport rep = lw::verify_witness(s, cfg.prec_cap);
  for (const auto& c : rep.checks)
    std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  std::cout << (rep.ok ? "witness verified" : "witness REJECTED") << "\n";
  return rep.ok ? 0 : 1;
}

std::string fmt_up(const lw::Rat& x) { return lw::Interval::from_rat(x, 64).hi_str(6); }
std::string fmt_down(const lw::Rat& x) { return lw::Interval::from_rat(x, 64).lo_str(6); }

int cmd_calibrate(const RunConfig& cfg) {
  const Inputs in = parse_inputs(cfg);
  if (cfg.fixtures.empty()) throw lw::InvalidInput("calibrate needs --fixtures");
  lw::Fixtures fx;
  {
    std::ifstream probe(cfg.fixtures);
    if (probe) fx = lw::Fixtures::load(cfg.fixtures);
  }
  const std::string sec = in.field->poly_str();
  fx.erase_section(sec);
  const long long qmax = cfg.qmax > 0 ? cfg.qmax : 1000000;
  const auto a = lw::RealSource::from_element(in.alpha), b = lw::RealSource::from_element(in.beta);
  auto& log = std::cerr;

  fx.set(sec, "alpha", in.alpha.str());
  fx.set(sec, "beta", in.beta.str());
  fx.set(sec, "scan_qmax", std::to_string(qmax));
  const lw::ScanMinimum sm = lw::scan_minimum(a, b, qmax, cfg.prec_cap);
  const lw::Rat C = lw::parse_rational(fmt_down(sm.value.lo_rat()));
  fx.set(sec, "C_bad2", fmt_down(sm.value.lo_rat()));
  fx.set(sec, "C_bad2_q", sm.q_star.get_str());
  fx.set(sec, "seq_C", fmt_up(lw::default_extraction_C(a, b)));
  log << "C_bad2 " << sm.value.str(8) << " at q = " << sm.q_star.get_str() << "\n";

  lw::PeckOptions opt;
  opt.prec_cap = cfg.prec_cap;
  const lw::PeckPlan plan = lw::plan_peck(in.alpha, in.beta, cfg.unit_bound);
  const bool case_a = plan.signature == lw::Signature::OneReal;
  std::vector<std::pair<std::string, lw::LdivWitness>> cells;
  lw::Rat c2 = 0;
  for (long d : lw::kGridD) {
    for (const lw::Rat& eps : lw::kGridEps) {
      lw::LdivWitness w = lw::construct_unreduced(plan, in.alpha, in.beta, lw::Int(d), eps, opt);
      c2 = std::max({c2, w.cert.alpha_bound.hi_rat(), w.cert.beta_bound.hi_rat()});
      log << "unreduced " << lw::cell_key(d, eps) << ": Q bits " << mpz_sizeinbase(w.Q.get_mpz_t(), 2) << "\n";
      cells.emplace_back(lw::cell_key(d, eps), std::move(w));
    }
  }
  const lw::Rat C2 = lw::parse_rational(fmt_up(c2));
  const lw::C3Bound c3 = lw::lemma23_C3(C, C2);
  const lw::Int G = lw::lemma23_G(c3.ceiling);
  fx.set(sec, "C2", fmt_up(c2));
  fx.set(sec, "C3_ceiling", c3.ceiling.get_str());
  fx.set(sec, "G", G.get_str());

  lw::Rat Ka = 0, Kb = 0, Kcd = 0;
  std::size_t idx = 0;
  for (long d : lw::kGridD) {
    for (const lw::Rat& eps : lw::kGridEps) {
      auto& [key, w0] = cells[idx++];
      lw::LdivWitness r = lw::gcd_reduce(w0, G);
      if (!r.cert.div_ok) r = lw::peck_construct(plan, in.alpha, in.beta, lw::Int(d), eps, G, opt);
      Ka = std::max(Ka, lw::Rat(r.cert.alpha_bound.hi_rat() / eps));
      Kb = std::max(Kb, r.cert.beta_bound.hi_rat());
      lw::Rat s = lw::Rat(lw::psi(r.modulus));
      if (!case_a) s *= s;
      Kcd = std::max(Kcd, lw::Rat(r.cert.logQ.hi_rat() * eps / s));
      fx.set(sec, "fp." + key, lw::fingerprint(r.Q) + " " + lw::fingerprint(r.R) + " " + lw::fingerprint(r.S));
      fx.set(sec, "factor." + key, r.D_factor.get_str() + " " + r.gcd_factor.get_str() + " " + r.gcd_before.get_str());
      log << "reduced " << key << ": gcd " << r.gcd_before.get_str() << " alpha " << r.cert.alpha_bound.hi_str(6)
          << " beta " << r.cert.beta_bound.hi_str(6) << "\n";
    }
  }
  fx.set(sec, "K_a", fmt_up(Ka));
  fx.set(sec, "K_b", fmt_up(Kb));
  fx.set(sec, case_a ? "K_c" : "K_d", fmt_up(Kcd));

  if (case_a) {
    lw::Rat pmax = 0;
    for (const auto& row : lw::padic_lagrange_check(plan, in.alpha, in.beta, lw::Int(2), 3, opt))
      pmax = std::max(pmax, row.product.hi_rat());
    fx.set(sec, "padic_product_p2", fmt_up(pmax));
    lw::Rat c0 = 0;
    for (long d = 1; d <= 20; ++d)
      c0 = std::max(c0, lw::lagrange_estimate(a, b, lw::Int(d), qmax, cfg.prec_cap).c_hat_sqrtD.hi_rat());
    fx.set(sec, "C0", fmt_up(c0));
  }
  fx.save(cfg.fixtures);
  std::cout << fx.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divisibility-constrained simultaneous approximation in cubic fields"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--poly", cfg.poly, "defining cubic, e.g. \"x^3-x-1\"");
    sc->add_option("--alpha", cfg.alpha, "first element as a polynomial in t")->capture_default_str();
    sc->add_option("--beta", cfg.beta, "second element as a polynomial in t")->capture_default_str();
    sc->add_option("--prec-cap", cfg.prec_cap, "maximum working precision in bits")->capture_default_str();
    sc->add_option("--out", cfg.out, "output file (default stdout)");
    sc->add_option("--fixtures", cfg.fixtures, "calibration fixtures file");
    sc->add_option("--unit-bound", cfg.unit_bound, "coordinate bound of the unit search")->capture_default_str();
  };

  auto* calibrate = app.add_subcommand("calibrate", "compute and store the calibration constants of a field");
  common(calibrate);
  calibrate->add_option("--qmax", cfg.qmax, "scan length (default 10^6)");

  auto* peck = app.add_subcommand("peck", "trace construction of a witness");
  common(peck);
  peck->add_option("--D", cfg.D, "modulus")->capture_default_str();
  peck->add_option("--eps", cfg.eps, "epsilon in (0, 1], snapped to a unit fraction")->capture_default_str();
  peck->add_option("--qmax", cfg.qmax, "scan length used when G must be derived");

  auto* padic = app.add_subcommand("padic", "valuation and divisibility grids");
  common(padic);
  padic->add_option("--zeta", cfg.zeta, "unit")->capture_default_str();
  padic->add_option("--primes", cfg.primes, "comma-separated primes")->capture_default_str();
  padic->add_option("--nu-max", cfg.nu_max, "largest nu")->capture_default_str();
  padic->add_option("--D-max", cfg.D_max, "largest D of the divisibility grid")->capture_default_str();

  auto* sequence = app.add_subcommand("sequence", "extract, profile and fit an approximation sequence");
  common(sequence);
  sequence->add_option("--qmax", cfg.qmax, "scan length (default 10^5)");
  sequence->add_option("--C", cfg.C, "threshold (default from fixtures, else 2x the minimum over q <= 100)");
  sequence->add_option("--word-out", cfg.word_out, "write the recurrence word here");
  sequence->add_flag("--no-thin", cfg.no_thin, "keep triples with vanishing Delta");

  auto* thm13 = app.add_subcommand("thm13", "witness search on the recurrence word");
  common(thm13);
  thm13->add_option("--D", cfg.D, "modulus")->capture_default_str();
  thm13->add_option("--eps", cfg.eps, "epsilon in (0, 1]")->capture_default_str();
  thm13->add_option("--qmax", cfg.qmax, "scan length (default 10^5)");
  thm13->add_option("--C", cfg.C, "extraction threshold");

  auto* lagrange = app.add_subcommand("lagrange", "CSV of Lagrange-constant estimates over a range of D");
  common(lagrange);
  lagrange->add_option("--D", cfg.D, "D or a range a..b")->capture_default_str();
  lagrange->add_option("--qmax", cfg.qmax, "scan length (default 10^6)");

  auto* verify = app.add_subcommand("verify", "re-certify a stored witness");
  verify->add_option("witness", cfg.witness, "witness JSON file")->required();
  verify->add_option("--prec-cap", cfg.prec_cap, "maximum working precision in bits")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cfg.prec_cap < lw::kMinPrecision || cfg.prec_cap > lw::kMaxPrecision)
      throw lw::InvalidInput("--prec-cap must lie in [32, 2^20]");
    if (cfg.qmax < 0) throw lw::InvalidInput("--qmax must be >= 1");
    if (*calibrate) return cmd_calibrate(cfg);
    if (*peck) return cmd_peck(cfg);
    if (*padic) return cmd_padic(cfg);
    if (*sequence) return cmd_sequence(cfg);
    if (*thm13) return cmd_thm13(cfg);
    if (*lagrange) return cmd_lagrange(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const lw::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const lw::PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return 3;
  } catch (const lw::CertificationFailure& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 1;
  } catch (const lw::NotFoundInWindow& e) {
    std::cerr << "not found in window: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
