#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "littlewood/fixtures.hpp"
#include "littlewood/witness_io.hpp"

using namespace littlewood;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("littlewood_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout and stderr captured; returns the exit status.
int run(const std::string& args, const std::string& tag, std::string* out = nullptr, std::string* err = nullptr) {
  const fs::path o = scratch_dir() / (tag + ".out"), e = scratch_dir() / (tag + ".err");
  const std::string cmd = std::string("\"") + LITTLEWOOD_CLI + "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
  const int st = std::system(cmd.c_str());
  if (out) *out = slurp(o);
  if (err) *err = slurp(e);
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const std::string kPlastic = "--poly \"x^3-x-1\" --alpha t --beta t^2";

std::string fixtures_arg() { return std::string(" --fixtures \"") + LITTLEWOOD_FIXTURES + "\""; }

}  // namespace

TEST(Fixtures, RoundTrip) {
  Fixtures f;
  f.set("x^3 - x - 1", "C_bad2", "0.287691");
  f.set("x^3 - x - 1", "G", "60");
  f.set("x^3 - 3*x - 1", "K_d", "1.5");
  f.set("x^3 - x - 1", "G", "120");
  const fs::path p = scratch_dir() / "fx.txt";
  f.save(p.string());
  const Fixtures g = Fixtures::load(p.string());
  EXPECT_EQ(g.get_int("x^3 - x - 1", "G"), 120);
  EXPECT_EQ(g.get_rat("x^3 - x - 1", "C_bad2"), Rat(287691, 1000000));
  EXPECT_EQ(g.str(), f.str());
  EXPECT_THROW(g.get("x^3 - x - 1", "missing"), InvalidInput);
  EXPECT_FALSE(g.has_section("nope"));
  Fixtures h = g;
  h.erase_section("x^3 - x - 1");
  EXPECT_FALSE(h.has("x^3 - x - 1", "G"));
  EXPECT_TRUE(h.has("x^3 - 3*x - 1", "K_d"));
}

TEST(Fixtures, MalformedRejected) {
  const fs::path p = scratch_dir() / "bad.txt";
  std::ofstream(p) << "key = 1\n";
  EXPECT_THROW(Fixtures::load(p.string()), InvalidInput);
  std::ofstream(p) << "[sec\n";
  EXPECT_THROW(Fixtures::load(p.string()), InvalidInput);
  EXPECT_THROW(Fixtures::load((scratch_dir() / "absent.txt").string()), InvalidInput);
}

TEST(Fixtures, FingerprintSeparates) {
  EXPECT_EQ(fingerprint(Int(12345)), fingerprint(Int(12345)));
  EXPECT_NE(fingerprint(Int(12345)), fingerprint(Int(12346)));
  EXPECT_NE(fingerprint(Int(5)), fingerprint(Int(-5)));
  EXPECT_EQ(cell_key(Int(2), Rat(1, 4)), "D2_eps1/4");
}

TEST(Fixtures, CommittedCalibrationHasBothFields) {
  const Fixtures f = Fixtures::load(LITTLEWOOD_FIXTURES);
  for (const char* sec : {"x^3 - x - 1", "x^3 - 3*x - 1"})
    for (const char* key : {"C_bad2", "C2", "G", "K_a", "K_b", "seq_C"}) EXPECT_TRUE(f.has(sec, key)) << sec << " " << key;
  EXPECT_TRUE(f.has("x^3 - x - 1", "K_c"));
  EXPECT_TRUE(f.has("x^3 - x - 1", "C0"));
  EXPECT_TRUE(f.has("x^3 - 3*x - 1", "K_d"));
  // G must be a multiple of lcm(1..C3 ceiling)
  for (const char* sec : {"x^3 - x - 1", "x^3 - 3*x - 1"}) {
    const C3Bound c3 = lemma23_C3(f.get_rat(sec, "C_bad2"), f.get_rat(sec, "C2"));
    EXPECT_EQ(c3.ceiling, f.get_int(sec, "C3_ceiling"));
    EXPECT_TRUE(divides(lemma23_G(c3.ceiling), f.get_int(sec, "G")));
  }
}

TEST(WitnessJson, RoundTripAndVerify) {
  const FieldPtr fp = field_create("x^3-x-1");
  const FieldElement t = FieldElement::theta(fp);
  const PeckPlan plan = plan_peck(t, t * t);
  const LdivWitness w = peck_construct(plan, t, t * t, Int(2), Rat(1), lemma23_G(48));
  const json j = witness_to_json(w);
  for (const char* k : {"field", "alpha", "beta", "gamma", "D", "D_factor", "eps", "Q", "R", "S", "gcd_before_reduction",
                        "bounds", "provenance", "precision_bits"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["Q"].get<std::string>(), w.Q.get_str());
  const StoredWitness s = witness_from_json(json::parse(j.dump()));
  EXPECT_EQ(s.Q, w.Q);
  EXPECT_EQ(s.R, w.R);
  EXPECT_EQ(s.S, w.S);
  const VerifyReport ok = verify_witness(s);
  EXPECT_TRUE(ok.ok);
  StoredWitness bad = s;
  bad.Q += 1;
  EXPECT_FALSE(verify_witness(bad).ok);
  bad = s;
  bad.alpha_bound[1] = Rat(1, 1000000);
  EXPECT_FALSE(verify_witness(bad).ok);
  json broken = j;
  broken.erase("Q");
  EXPECT_THROW(witness_from_json(broken), InvalidInput);
  broken = j;
  broken["Q"] = 17;
  EXPECT_THROW(witness_from_json(broken), InvalidInput);
}

TEST(Cli, PeckWitnessVerifiesAndIsBitStable) {
  std::string err;
  const fs::path a = scratch_dir() / "peck_a.json", b = scratch_dir() / "peck_b.json";
  ASSERT_EQ(run("peck " + kPlastic + " --D 2 --eps 1" + fixtures_arg() + " --out \"" + a.string() + "\"", "peck_a", nullptr, &err), 0) << err;
  ASSERT_EQ(run("peck " + kPlastic + " --D 2 --eps 1" + fixtures_arg() + " --out \"" + b.string() + "\"", "peck_b"), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const StoredWitness s = load_witness(a.string());
  EXPECT_TRUE(divides(Int(2), s.Q));
  EXPECT_TRUE(divides(Int(2), s.R));
  EXPECT_EQ(triple_gcd(s.Q, s.R, s.S), 1);
  EXPECT_EQ(run("verify \"" + a.string() + "\"", "verify_ok"), 0);
}

TEST(Cli, VerifyRejectsPerturbedQ) {
  const fs::path a = scratch_dir() / "peck_q.json", bad = scratch_dir() / "peck_q1.json";
  ASSERT_EQ(run("peck " + kPlastic + " --D 2 --eps 1" + fixtures_arg() + " --out \"" + a.string() + "\"", "peck_q"), 0);
  json j = json::parse(slurp(a));
  j["Q"] = Int(Int(j["Q"].get<std::string>()) + 1).get_str();
  std::ofstream(bad) << j.dump(2);
  std::string out;
  EXPECT_EQ(run("verify \"" + bad.string() + "\"", "verify_bad", &out), 1);
  EXPECT_NE(out.find("FAIL D_divides_Q"), std::string::npos);
}

TEST(Cli, TotallyRealWitnessRoundTrip) {
  // Q has about 158000 digits: verification goes through the stored construction
  const std::string args = "--poly \"x^3-3x-1\" --alpha t --beta t^2 --D 4 --eps 1/4";
  const fs::path a = scratch_dir() / "peck_b.json", bad = scratch_dir() / "peck_b_zeta.json";
  ASSERT_EQ(run("peck " + args + fixtures_arg() + " --out \"" + a.string() + "\"", "peck_b"), 0);
  std::string out;
  EXPECT_EQ(run("verify \"" + a.string() + "\"", "verify_b", &out), 0);
  EXPECT_NE(out.find("ok   traces_match_construction"), std::string::npos) << out;
  json j = json::parse(slurp(a));
  j["exponent"] = Int(Int(j["exponent"].get<std::string>()) + 1).get_str();
  std::ofstream(bad) << j.dump(2);
  EXPECT_EQ(run("verify \"" + bad.string() + "\"", "verify_b_bad", &out), 1);
  EXPECT_NE(out.find("FAIL traces_match_construction"), std::string::npos) << out;
}

TEST(Cli, EpsSnapWarning) {
  std::string err;
  EXPECT_EQ(run("peck " + kPlastic + " --D 1 --eps 0.3" + fixtures_arg(), "snap", nullptr, &err), 0);
  EXPECT_NE(err.find("snapped to 1/4"), std::string::npos) << err;
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("peck --poly \"x^3-1\" --D 2", "reducible"), 2);
  EXPECT_EQ(run("peck " + kPlastic + " --D 0", "d0"), 2);
  EXPECT_EQ(run("peck " + kPlastic + " --eps 2", "eps2"), 2);
  EXPECT_EQ(run("peck " + kPlastic + " --bogus", "bogus"), 2);
  EXPECT_EQ(run("verify \"" + (scratch_dir() / "absent.json").string() + "\"", "absent"), 2);
  EXPECT_EQ(run("", "nosub"), 2);
}

TEST(Cli, PrecisionCapExitThree) {
  // re-certification evaluates Q alpha - R directly, so it needs about 2 bits(Q) bits
  const fs::path w = scratch_dir() / "cap.json";
  ASSERT_EQ(run("peck " + kPlastic + " --D 3 --eps 1/4" + fixtures_arg() + " --out \"" + w.string() + "\"", "cap_peck"), 0);
  EXPECT_EQ(run("verify \"" + w.string() + "\" --prec-cap 64", "cap"), 3);
  EXPECT_EQ(run("verify \"" + w.string() + "\"", "cap_ok"), 0);
}

TEST(Cli, ThmSearchNotFoundExitFour) {
  EXPECT_EQ(run("thm13 " + kPlastic + " --D 1000003 --qmax 10000" + fixtures_arg(), "thm13_nf"), 4);
}

TEST(Cli, LagrangeTable) {
  std::string out;
  ASSERT_EQ(run("lagrange " + kPlastic + " --D 1..5 --qmax 10000", "lagrange", &out), 0);
  std::istringstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "D,q_star,c_hat_lo,c_hat_hi,c_hat_times_sqrtD_hi");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    ASSERT_EQ(cols.size(), 5u) << line;
    EXPECT_EQ(cols[0], std::to_string(rows));
    const Rat lo = parse_rational(cols[2]), hi = parse_rational(cols[3]), scaled = parse_rational(cols[4]);
    EXPECT_LE(lo, hi);
    EXPECT_GT(lo, 0);
    EXPECT_GE(scaled, hi);
  }
  EXPECT_EQ(rows, 5);
}

TEST(Cli, PadicGridPasses) {
  std::string out;
  ASSERT_EQ(run("padic " + kPlastic + " --zeta t --primes 2,3,5 --nu-max 2", "padic", &out), 0);
  int valuation_rows = 0;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("valuation,", 0) == 0) {
      ++valuation_rows;
      EXPECT_NE(line.find(",1,"), std::string::npos) << line;
    }
  EXPECT_EQ(valuation_rows, 6);
}

TEST(Cli, SequenceAndWitnessSearch) {
  std::string out, err;
  ASSERT_EQ(run("sequence " + kPlastic + " --qmax 100000" + fixtures_arg(), "sequence", &out, &err), 0) << err;
  EXPECT_NE(err.find("Delta nonzero: all"), std::string::npos) << err;
  const fs::path w = scratch_dir() / "thm13.json";
  ASSERT_EQ(run("thm13 " + kPlastic + " --D 1 --eps 1 --qmax 100000" + fixtures_arg() + " --out \"" + w.string() + "\"",
                "thm13", nullptr, &err),
            0)
      << err;
  const json j = json::parse(slurp(w));
  EXPECT_TRUE(j["gamma"].is_null());
  EXPECT_EQ(j["provenance"], "thm13-search");
  EXPECT_EQ(run("verify \"" + w.string() + "\"", "thm13_verify"), 0);
}
