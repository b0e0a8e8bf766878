// Command-line front end: orbit/period/sum/smooth/verify subcommands mapping
// one-to-one onto the library operations.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orbitsum/experiment.hpp"
#include "orbitsum/rng.hpp"

using namespace orbitsum;
using nlohmann::json;

namespace {

std::array<u64, 4> parse_map_arg(const std::string& s) {
  std::array<u64, 4> out{};
  std::stringstream ss(s);
  std::string part;
  size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 4) throw ParseError("map needs exactly four comma-separated values");
    try {
      size_t pos = 0;
      out[i] = std::stoull(part, &pos);
      if (pos != part.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad map coefficient: '" + part + "'");
    }
    ++i;
  }
  if (i != 4) throw ParseError("map needs exactly four comma-separated values");
  return out;
}

Orbit make_orbit(u64 p, const std::string& map_str, u64 u0) {
  auto c = parse_map_arg(map_str);
  PrimeModulus pm(p);
  return Orbit(MoebiusMap(pm, c[0], c[1], c[2], c[3]), u0);
}

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json record_json(const SumRecord& r) {
  return json{{"kind", r.kind},
              {"value", {{"re", r.value.real()}, {"im", r.value.imag()}}},
              {"modulus", r.modulus()},
              {"term_count", r.term_count},
              {"params",
               {{"p", r.p},
                {"h", r.h},
                {"N", r.N},
                {"Q", r.Q},
                {"L", r.L},
                {"t", r.t},
                {"map", r.map},
                {"u0", r.u0}}}};
}

WeightSeq cli_weights(const std::string& mode, size_t n, Rng& rng) {
  if (mode == "ones") return WeightSeq::ones(n);
  if (mode != "random") throw ParseError("weights must be 'ones' or 'random'");
  std::vector<std::complex<double>> w(n);
  for (auto& z : w) {
    double r = rng.unit();
    double phi = rng.unit() * 6.283185307179586;
    z = {r * std::cos(phi), r * std::sin(phi)};
  }
  return WeightSeq(std::move(w));
}

struct OrbitArgs {
  u64 p = 0;
  std::string map;
  u64 u0 = 0;
  u64 start = 0;
  u64 count = 0;
  u64 disc_bins = 0;
  std::string format = "csv";
  std::string out;
};

int cmd_orbit(const OrbitArgs& a) {
  Orbit orbit = make_orbit(a.p, a.map, a.u0);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw Error("cannot open " + a.out);
    os = &file;
  }
  if (a.disc_bins > 0) {
    std::vector<u64> vals = orbit.slice(a.start, a.count);
    *os << "discrepancy=" << fmt(discrepancy(vals, a.p, a.disc_bins)) << '\n';
    return 0;
  }
  if (a.format == "json") {
    json rows = json::array();
    u64 n = a.start;
    orbit.stream(a.start, a.count, [&](u64 u) { rows.push_back({n++, u}); });
    *os << json{{"p", a.p}, {"u0", a.u0}, {"rows", rows}}.dump() << '\n';
  } else {
    *os << "n,u\n";
    u64 n = a.start;
    orbit.stream(a.start, a.count, [&](u64 u) { *os << n++ << ',' << u << '\n'; });
  }
  return 0;
}

int cmd_period(u64 p, const std::string& map_str, u64 u0, const std::string& format) {
  Orbit orbit = make_orbit(p, map_str, u0);
  const CycleInfo& ci = orbit.cycle();
  const char* cls = to_string(orbit.map().spectral_class());
  if (format == "json") {
    json j{{"t", ci.t},
           {"t_true", ci.t_true},
           {"class", cls},
           {"pole_in_orbit", ci.pole_in_orbit}};
    if (ci.pole_in_orbit) j["inf_index"] = ci.inf_index;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "t=" << ci.t << '\n';
    std::cout << "t_true=" << ci.t_true << '\n';
    std::cout << "class=" << cls << '\n';
    std::cout << "pole_in_orbit=" << (ci.pole_in_orbit ? 1 : 0) << '\n';
    if (ci.pole_in_orbit) std::cout << "inf_index=" << ci.inf_index << '\n';
  }
  return 0;
}

struct SumArgs {
  std::string kind;
  u64 p = 0;
  std::string map;
  u64 u0 = 0;
  u64 h = 0;
  u64 N = 0, Q = 0, L = 0, K = 0, M = 0, H = 0;
  std::string weights = "ones";
  u64 seed = 1;
  unsigned threads = 1;
};

int cmd_sum(const SumArgs& a) {
  Orbit orbit = make_orbit(a.p, a.map, a.u0);
  SumOptions opt;
  opt.threads = a.threads;
  Rng rng(a.seed);
  json out;
  if (a.kind == "single") {
    out = record_json(single_sum(orbit, a.h, a.N, opt));
  } else if (a.kind == "prime") {
    FactorSieve sieve = FactorSieve::build(std::max<u64>(2, a.N));
    out = record_json(prime_time_sum(orbit, a.h, a.N, sieve, opt));
  } else if (a.kind == "smooth") {
    FactorSieve sieve = FactorSieve::build(std::max<u64>(2, a.N));
    out = record_json(smooth_sum(orbit, a.h, a.N, a.Q, sieve, opt));
  } else if (a.kind == "smooth-decomposed") {
    FactorSieve sieve = FactorSieve::build(std::max<u64>(2, a.N));
    DecomposedSmoothSum dec = smooth_sum_decomposed(orbit, a.h, a.N, a.Q, a.L, sieve, opt);
    out = record_json(dec.total);
    out["head"] = record_json(dec.head);
    json per_q = json::array();
    for (const auto& [q, rec] : dec.per_q)
      per_q.push_back({{"q", q},
                       {"re", rec.value.real()},
                       {"im", rec.value.imag()},
                       {"modulus", rec.modulus()},
                       {"term_count", rec.term_count}});
    out["per_q"] = per_q;
  } else if (a.kind == "bilinear") {
    WeightSeq alpha = cli_weights(a.weights, a.K, rng);
    WeightSeq beta = cli_weights(a.weights, a.M, rng);
    out = record_json(bilinear_sum(orbit, a.h, alpha, beta, opt));
    out["params"]["K"] = a.K;
    out["params"]["M"] = a.M;
  } else if (a.kind == "varlimit") {
    if (a.K < 2) throw BadLimits("varlimit needs K >= 2");
    WeightSeq alpha = cli_weights(a.weights, a.K, rng);
    WeightSeq beta = cli_weights(a.weights, a.M, rng);
    std::vector<std::pair<u64, u64>> limits(a.M);
    for (auto& lm : limits) {
      u64 lo = rng.uniform(0, a.K - 2);
      lm = {lo, rng.uniform(lo + 1, a.K - 1)};
    }
    out = record_json(varlimit_bilinear_sum(orbit, a.h, alpha, beta, limits, opt));
    out["params"]["K"] = a.K;
    out["params"]["M"] = a.M;
    out["params"]["seed"] = a.seed;
  } else if (a.kind == "hyperbolic") {
    if (a.H < 1 || a.M <= a.H) throw BadLimits("hyperbolic needs 1 <= H < M");
    WeightSeq alpha = cli_weights(a.weights, a.K / a.H, rng);
    WeightSeq beta = cli_weights(a.weights, a.M - a.H + 1, rng);
    std::vector<u64> lower(a.M - a.H + 1, 0);
    out = record_json(hyperbolic_sum(orbit, a.h, alpha, beta, a.H, a.K, lower, opt));
    out["params"]["K"] = a.K;
    out["params"]["M"] = a.M;
    out["params"]["H"] = a.H;
  } else {
    throw ParseError("unknown sum kind: " + a.kind);
  }
  std::cout << out.dump() << '\n';
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& out_override,
               unsigned threads_override, u64 seed_override,
               const std::string& format_override) {
  std::vector<ExperimentConfig> configs = load_experiment_configs(config_path);
  if (configs.empty()) throw ParseError("config file has no [experiment] sections");
  double worst = -1.0;
  bool any = false;
  for (size_t i = 0; i < configs.size(); ++i) {
    ExperimentConfig c = configs[i];
    if (threads_override > 0) c.threads = threads_override;
    if (seed_override > 0) c.seed = seed_override;
    if (!format_override.empty()) c.format = format_override;
    std::string prefix = c.output;
    if (!out_override.empty())
      prefix = configs.size() == 1 ? out_override : out_override + "-" + c.name;
    ExperimentResult res = run_experiment(c);
    if (c.format == "csv" || c.format == "both") {
      std::ofstream os(prefix + ".csv");
      if (!os) throw Error("cannot open " + prefix + ".csv");
      write_reports_csv(os, res.reports);
    }
    if (c.format == "jsonl" || c.format == "both") {
      std::ofstream os(prefix + ".jsonl");
      if (!os) throw Error("cannot open " + prefix + ".jsonl");
      write_reports_jsonl(os, res.reports);
    }
    for (const auto& r : res.reports) {
      any = true;
      worst = std::max(worst, r.ratio);
    }
  }
  if (any) std::cout << "worst_ratio=" << fmt(worst) << '\n';
  return 0;
}

struct SmoothArgs {
  u64 N = 0, Q = 0, L = 0;
  double u = 0.0;
  std::string format = "csv";
};

int cmd_smooth_count(const SmoothArgs& a) {
  FactorSieve sieve = FactorSieve::build(std::max<u64>(2, a.N));
  std::cout << psi_count(a.N, a.Q, sieve) << '\n';
  return 0;
}

int cmd_smooth_list(const SmoothArgs& a) {
  FactorSieve sieve = FactorSieve::build(std::max<u64>(2, a.N));
  if (a.format == "json") {
    json arr = json::array();
    for_each_smooth(a.N, a.Q, sieve, [&](u64 n) { arr.push_back(n); });
    std::cout << arr.dump() << '\n';
  } else {
    std::cout << "n\n";
    for_each_smooth(a.N, a.Q, sieve, [&](u64 n) { std::cout << n << '\n'; });
  }
  return 0;
}

int cmd_smooth_rho(const SmoothArgs& a) {
  std::cout << fmt(dickman_rho(a.u)) << '\n';
  return 0;
}

int cmd_smooth_pairs(const SmoothArgs& a) {
  FactorSieve sieve = FactorSieve::build(std::max<u64>(2, a.N));
  if (a.format == "json") {
    json arr = json::array();
    vaughan_pairs(a.N, a.Q, a.L, sieve, [&](u64 n, const VaughanPair& pr) {
      arr.push_back({{"n", n}, {"r", pr.r}, {"s", pr.s}, {"q", pr.q}});
    });
    std::cout << arr.dump() << '\n';
  } else {
    std::cout << "n,r,s,q\n";
    vaughan_pairs(a.N, a.Q, a.L, sieve, [&](u64 n, const VaughanPair& pr) {
      std::cout << n << ',' << pr.r << ',' << pr.s << ',' << pr.q << '\n';
    });
  }
  return 0;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const InvalidMap*>(&e) || dynamic_cast<const InvalidModulus*>(&e))
    return 2;
  if (dynamic_cast<const Unsatisfiable*>(&e)) return 4;
  if (dynamic_cast<const ZeroFrequency*>(&e) || dynamic_cast<const BadIndices*>(&e) ||
      dynamic_cast<const AllZeroCoefficients*>(&e) ||
      dynamic_cast<const WeightOutOfRange*>(&e) || dynamic_cast<const BadLimits*>(&e) ||
      dynamic_cast<const OutOfRange*>(&e) || dynamic_cast<const NotSmooth*>(&e) ||
      dynamic_cast<const TooSmall*>(&e) || dynamic_cast<const MissingParam*>(&e) ||
      dynamic_cast<const NegativeArgument*>(&e) ||
      dynamic_cast<const HypothesisViolated*>(&e) ||
      dynamic_cast<const ConditionViolation*>(&e) ||
      dynamic_cast<const LimitExceeded*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ModulusMismatch*>(&e) || dynamic_cast<const ZeroInverse*>(&e))
    return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moebius-orbit exponential sums over prime fields"};
  app.require_subcommand(1);
  u64 unused_seed = 1;       // accepted everywhere for interface uniformity
  unsigned unused_threads = 1;
  auto uniform_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", unused_seed, "accepted for interface uniformity");
    cmd->add_option("--threads", unused_threads, "accepted for interface uniformity");
  };

  OrbitArgs oa;
  CLI::App* orbit = app.add_subcommand("orbit", "print n,u_n rows of an orbit");
  orbit->add_option("--p", oa.p, "prime modulus")->required();
  orbit->add_option("--map", oa.map, "alpha,beta,gamma,delta")->required();
  orbit->add_option("--u0", oa.u0, "initial value")->required();
  orbit->add_option("--start", oa.start, "first index (default 0)");
  orbit->add_option("--count", oa.count, "number of rows")->required();
  orbit->add_option("--discrepancy-bins", oa.disc_bins,
                    "print the box discrepancy of the slice instead of rows");
  orbit->add_option("--format", oa.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  orbit->add_option("--out", oa.out, "write to file instead of stdout");
  uniform_flags(orbit);

  u64 pp = 0, pu0 = 0;
  std::string pmap, pformat = "csv";
  CLI::App* period = app.add_subcommand("period", "print t, t_true, class");
  period->add_option("--p", pp, "prime modulus")->required();
  period->add_option("--map", pmap, "alpha,beta,gamma,delta")->required();
  period->add_option("--u0", pu0, "initial value")->required();
  period->add_option("--format", pformat, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  uniform_flags(period);

  SumArgs sa;
  CLI::App* sum = app.add_subcommand("sum", "evaluate an exponential sum; prints JSON");
  sum->set_help_flag("--help", "print help");  // frees -h for the frequency flag
  sum->add_option("--kind", sa.kind,
                  "single|prime|smooth|smooth-decomposed|bilinear|varlimit|hyperbolic")
      ->required();
  sum->add_option("--p", sa.p, "prime modulus")->required();
  sum->add_option("--map", sa.map, "alpha,beta,gamma,delta")->required();
  sum->add_option("--u0", sa.u0, "initial value")->required();
  sum->add_option("--h", sa.h, "frequency (nonzero mod p)")->required();
  sum->add_option("--N", sa.N, "summation length / range end");
  sum->add_option("--Q", sa.Q, "smoothness bound");
  sum->add_option("--L", sa.L, "split threshold");
  sum->add_option("--K", sa.K, "outer weight count");
  sum->add_option("--M", sa.M, "inner weight count");
  sum->add_option("--H", sa.H, "hyperbolic lower m bound");
  sum->add_option("--weights", sa.weights, "ones|random");
  sum->add_option("--seed", sa.seed, "seed for random weights/limits");
  sum->add_option("--threads", sa.threads, "worker threads (0 = hardware)");
  std::string sformat = "json";
  sum->add_option("--format", sformat, "json (sum records are always JSON)")
      ->check(CLI::IsMember({"json"}));

  std::string vconfig, vout, vformat;
  unsigned vthreads = 0;
  u64 vseed = 0;
  CLI::App* verify = app.add_subcommand("verify", "run a config file of experiments");
  verify->add_option("--config", vconfig, "experiment config file")->required();
  verify->add_option("--out", vout, "output path prefix override");
  verify->add_option("--threads", vthreads, "worker override (0 = use config)");
  verify->add_option("--seed", vseed, "seed override (0 = use config)");
  verify->add_option("--format", vformat, "csv|jsonl|both override")
      ->check(CLI::IsMember({"", "csv", "jsonl", "both"}));

  SmoothArgs ma;
  CLI::App* smooth = app.add_subcommand("smooth", "smooth-number utilities");
  smooth->require_subcommand(1);
  CLI::App* sc = smooth->add_subcommand("count", "print Psi(N, Q)");
  sc->add_option("--N", ma.N)->required();
  sc->add_option("--Q", ma.Q)->required();
  uniform_flags(sc);
  CLI::App* sl = smooth->add_subcommand("list", "list Q-smooth n <= N");
  sl->add_option("--N", ma.N)->required();
  sl->add_option("--Q", ma.Q)->required();
  sl->add_option("--format", ma.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  uniform_flags(sl);
  CLI::App* sr = smooth->add_subcommand("rho", "print Dickman rho(u)");
  sr->add_option("--u", ma.u)->required();
  uniform_flags(sr);
  CLI::App* sp = smooth->add_subcommand("pairs", "print the n = r*s split table");
  sp->add_option("--N", ma.N)->required();
  sp->add_option("--Q", ma.Q)->required();
  sp->add_option("--L", ma.L)->required();
  sp->add_option("--format", ma.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  uniform_flags(sp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (orbit->parsed()) return cmd_orbit(oa);
    if (period->parsed()) return cmd_period(pp, pmap, pu0, pformat);
    if (sum->parsed()) return cmd_sum(sa);
    if (verify->parsed()) return cmd_verify(vconfig, vout, vthreads, vseed, vformat);
    if (smooth->parsed()) {
      if (sc->parsed()) return cmd_smooth_count(ma);
      if (sl->parsed()) return cmd_smooth_list(ma);
      if (sr->parsed()) return cmd_smooth_rho(ma);
      if (sp->parsed()) return cmd_smooth_pairs(ma);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
