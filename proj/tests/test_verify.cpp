#include <doctest.h>

#include <cmath>
#include <sstream>

#include "orbitsum/verify.hpp"
#include "orbitsum/rng.hpp"

using namespace orbitsum;

TEST_CASE("envelope: formula plug-ins") {
  EnvelopeParams c22;
  c22.N = 1e4;
  c22.p = 1e4 + 7;
  c22.eps = 0.5;
  CHECK(envelope(BoundKind::Single, c22) ==
        doctest::Approx(1e4 * std::pow(1e4 + 7, -0.25)).epsilon(1e-12));

  EnvelopeParams l21;
  l21.s = 1;
  l21.M = 1;
  l21.t = 5000;
  l21.N = 5000;  // N = t
  l21.p = 99991;
  CHECK(envelope(BoundKind::MultiTerm, l21) ==
        doctest::Approx(2.0 * std::sqrt(99991.0) * std::log(99991.0)).epsilon(1e-12));

  EnvelopeParams t11;
  t11.N = 1e6;
  t11.Q = 50;
  t11.eps = 0.5;
  t11.B = 2;
  CHECK(envelope(BoundKind::Smooth, t11) ==
        doctest::Approx(std::pow(1e6, 1.0 - 1.0 / 32.0) * 50.0).epsilon(1e-12));

  EnvelopeParams missing;
  missing.p = 101;
  CHECK_THROWS_AS(envelope(BoundKind::Single, missing), MissingParam);
  try {
    envelope(BoundKind::Single, missing);
  } catch (const MissingParam& e) {
    CHECK(std::string(e.what()).find("N") != std::string::npos);
  }
}

TEST_CASE("envelope monotonicity") {
  // smooth-sum envelope strictly increasing in N and in Q
  for (double q : {2.0, 10.0, 50.0}) {
    double prev = 0;
    for (double n = 1e4; n <= 1e8; n *= 10) {
      EnvelopeParams prm;
      prm.N = n;
      prm.Q = q;
      prm.eps = 0.5;
      prm.B = 2;
      double e = envelope(BoundKind::Smooth, prm);
      CHECK(e > prev);
      prev = e;
    }
  }
  for (double n : {1e5, 1e6}) {
    double prev = 0;
    for (double q = 2; q <= 100; q += 7) {
      EnvelopeParams prm;
      prm.N = n;
      prm.Q = q;
      prm.eps = 0.5;
      prm.B = 2;
      double e = envelope(BoundKind::Smooth, prm);
      CHECK(e > prev);
      prev = e;
    }
  }
  // single-sum envelope decreasing in eps
  double prev = 1e18;
  for (double eps = 0.1; eps <= 1.0; eps += 0.1) {
    EnvelopeParams prm;
    prm.N = 1e5;
    prm.p = 99991;
    prm.eps = eps;
    double e = envelope(BoundKind::Single, prm);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("random_instance: determinism and constraint satisfaction") {
  InstanceConstraints c;
  c.p_min = 10000;
  c.p_max = 30000;
  c.t_min_coeff = 1.0;
  c.t_min_exp = 0.75;
  InstanceSpec a = random_instance(12345, c);
  InstanceSpec b = random_instance(12345, c);
  CHECK(a.p == b.p);
  CHECK(a.map == b.map);
  CHECK(a.u0 == b.u0);
  CHECK(a.h == b.h);
  CHECK(a.t == b.t);

  for (u64 seed = 1; seed <= 25; ++seed) {
    InstanceSpec inst = random_instance(seed, c);
    CHECK(is_prime_u64(inst.p));
    CHECK(inst.p >= c.p_min);
    CHECK(inst.p <= c.p_max);
    CHECK(inst.h >= 1);
    CHECK(inst.cls != SpectralClass::Parabolic);
    CHECK(static_cast<double>(inst.t) >=
          std::pow(static_cast<double>(inst.p), 0.75));
    // echoed t is the real period
    PrimeModulus p(inst.p);
    Orbit orbit(MoebiusMap(p, inst.map[0], inst.map[1], inst.map[2], inst.map[3]),
                inst.u0);
    CHECK(orbit.cycle().t == inst.t);
  }
}

TEST_CASE("random_instance: t > p is unsatisfiable") {
  InstanceConstraints c;
  c.p_min = 10000;
  c.p_max = 20000;
  c.t_min_coeff = 1.5;  // t >= 1.5 p, impossible since t <= p
  c.t_min_exp = 1.0;
  c.max_rejections = 300;
  CHECK_THROWS_AS(random_instance(7, c), Unsatisfiable);
}

TEST_CASE("random_instance: t = p is reachable (full projective cycle)") {
  InstanceConstraints c;
  c.p_min = 10000;
  c.p_max = 20000;
  c.t_min_coeff = 1.0;
  c.t_min_exp = 1.0;  // t >= p forces t = p
  InstanceSpec inst = random_instance(3, c);
  CHECK(inst.t == inst.p);
  CHECK(inst.cls == SpectralClass::Inert);
}

TEST_CASE("run_check: gating and a full single-sum pipeline run") {
  CHECK(run_check({}, BoundKind::Single).empty());

  InstanceConstraints c;
  c.p_min = 10000;
  c.p_max = 30000;
  c.t_min_coeff = 1.0;
  c.t_min_exp = 0.75;
  std::vector<InstanceSpec> insts;
  for (u64 seed = 100; seed < 103; ++seed) {
    InstanceSpec inst = random_instance(seed, c);
    inst.eps = 0.25;  // t >= p^{3/4} is exactly the eps = 1/4 hypothesis
    inst.N = inst.p;
    insts.push_back(inst);
  }
  auto reports = run_check(insts, BoundKind::Single);
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) {
    CHECK(r.envelope > 0);
    CHECK(r.ratio >= 0);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.empirical <= static_cast<double>(r.inst.N) + 1e-9);
  }
  // sorted by ratio descending
  for (size_t i = 1; i < reports.size(); ++i)
    CHECK(reports[i - 1].ratio >= reports[i].ratio);

  // violating instance: eps = 0.5 needs t >= p, which these t < p violate
  auto bad = insts;
  bool have_small_t = false;
  for (auto& inst : bad) {
    if (inst.t < inst.p) {
      inst.eps = 0.5;
      have_small_t = true;
    }
  }
  if (have_small_t) {
    try {
      run_check(bad, BoundKind::Single);
      FAIL("expected HypothesisViolated");
    } catch (const HypothesisViolated& e) {
      CHECK(std::string(e.what()).find("t >= p^(1/2+eps)") != std::string::npos);
    }
  }
}

TEST_CASE("run_check rejects parabolic instances by name") {
  InstanceSpec inst;
  inst.seed = 1;
  inst.p = 5;
  inst.map = {1, 1, 1, 0};  // disc = 0 mod 5
  inst.u0 = 2;
  inst.h = 1;
  inst.N = 5;
  inst.t = 4;
  inst.cls = SpectralClass::Parabolic;
  try {
    run_check({inst}, BoundKind::Single);
    FAIL("expected HypothesisViolated");
  } catch (const HypothesisViolated& e) {
    CHECK(std::string(e.what()).find("two distinct roots") != std::string::npos);
  }
}

TEST_CASE("run_check is reproducible apart from wall time") {
  InstanceConstraints c;
  c.p_min = 10000;
  c.p_max = 20000;
  std::vector<InstanceSpec> insts;
  for (u64 seed = 5; seed < 9; ++seed) {
    InstanceSpec inst = random_instance(seed, c);
    inst.eps = 0.1;
    inst.N = inst.p;
    insts.push_back(inst);
  }
  auto r1 = run_check(insts, BoundKind::Single, nullptr, {}, 1);
  auto r2 = run_check(insts, BoundKind::Single, nullptr, {}, 4);
  REQUIRE(r1.size() == r2.size());
  for (size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].inst.seed == r2[i].inst.seed);
    CHECK(r1[i].empirical == r2[i].empirical);
    CHECK(r1[i].envelope == r2[i].envelope);
    CHECK(r1[i].ratio == r2[i].ratio);
  }
}

TEST_CASE("double-sum bound kinds run end to end") {
  InstanceConstraints c;
  c.p_min = 1000;
  c.p_max = 5000;
  InstanceSpec base = random_instance(77, c);

  InstanceSpec l21 = base;
  l21.s = 2;
  l21.M = 10;
  l21.N = 500;
  auto r21 = run_check({l21}, BoundKind::MultiTerm);
  CHECK(r21.size() == 1);
  CHECK(std::isfinite(r21[0].ratio));

  InstanceSpec l23 = base;
  l23.K = 40;
  l23.M = 30;
  auto r23 = run_check({l23}, BoundKind::Bilinear);
  CHECK(r23.size() == 1);
  CHECK(r23[0].empirical <= 1200.0 + 1e-9);

  InstanceSpec l24 = l23;
  auto r24 = run_check({l24}, BoundKind::VarLimit);
  CHECK(r24.size() == 1);

  InstanceSpec l25 = base;
  l25.H = 3;
  l25.M = 20;
  l25.K = 200;
  auto r25 = run_check({l25}, BoundKind::Hyperbolic);
  CHECK(r25.size() == 1);
  CHECK(std::isfinite(r25[0].ratio));
}

TEST_CASE("discrepancy: constant, uniform, errors") {
  u64 p = 101;
  std::vector<u64> constant(500, 7);
  double d = discrepancy(constant, p, 10);
  CHECK(d == doctest::Approx(1.0 - 0.1).epsilon(0.02));

  std::vector<u64> all;
  for (u64 v = 0; v < p; ++v) all.push_back(v);
  CHECK(discrepancy(all, p, 10) <= 0.1 + 1.0 / static_cast<double>(p) + 1e-12);

  CHECK_THROWS_AS(discrepancy({}, p, 10), EmptyInput);
  CHECK_THROWS_AS(discrepancy(constant, p, 0), OutOfRange);
}

TEST_CASE("csv escaping and report serialization") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");

  InstanceConstraints c;
  c.p_min = 10000;
  c.p_max = 20000;
  InstanceSpec inst = random_instance(9, c);
  inst.eps = 0.1;
  inst.N = inst.p;
  auto reports = run_check({inst}, BoundKind::Single);
  std::ostringstream csv;
  write_reports_csv(csv, reports);
  std::string text = csv.str();
  CHECK(text.rfind("seed,p,t,class,h,N,Q,eps,B,kind,empirical,envelope,ratio,ms\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("single") != std::string::npos);

  std::ostringstream jsonl;
  write_reports_jsonl(jsonl, reports);
  CHECK(jsonl.str().find("\"kind\":\"single\"") != std::string::npos);
}
