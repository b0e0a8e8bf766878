#include "orbitsum/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "orbitsum/rng.hpp"

namespace orbitsum {

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::MultiTerm: return "multi-term";
    case BoundKind::Single: return "single";
    case BoundKind::Bilinear: return "bilinear";
    case BoundKind::VarLimit: return "varlimit";
    case BoundKind::Hyperbolic: return "hyperbolic";
    case BoundKind::Smooth: return "smooth";
  }
  return "?";
}

BoundKind bound_kind_from_string(const std::string& s) {
  for (BoundKind k : {BoundKind::MultiTerm, BoundKind::Single, BoundKind::Bilinear,
                      BoundKind::VarLimit, BoundKind::Hyperbolic, BoundKind::Smooth}) {
    if (s == to_string(k)) return k;
  }
  throw ParseError("unknown bound kind: " + s);
}

namespace {

double need(const std::optional<double>& v, const char* name) {
  if (!v) throw MissingParam(std::string("envelope parameter missing: ") + name);
  if (!(*v > 0)) throw MissingParam(std::string("envelope parameter must be positive: ") + name);
  return *v;
}

}  // namespace

double envelope(BoundKind kind, const EnvelopeParams& prm) {
  switch (kind) {
    case BoundKind::MultiTerm: {
      double s = need(prm.s, "s"), M = need(prm.M, "M"), N = need(prm.N, "N");
      double t = need(prm.t, "t"), p = need(prm.p, "p");
      return s * M * (1.0 + N / t) * std::sqrt(p) * std::log(p);
    }
    case BoundKind::Single: {
      double N = need(prm.N, "N"), p = need(prm.p, "p"), eps = need(prm.eps, "eps");
      return N * std::pow(p, -eps / 2.0);
    }
    case BoundKind::Bilinear:
    case BoundKind::VarLimit: {
      double K = need(prm.K, "K"), M = need(prm.M, "M");
      double p = need(prm.p, "p"), t = need(prm.t, "t");
      double core = K * M *
                    (1.0 / std::sqrt(M) + std::sqrt(M / K) * std::pow(p, 0.25) +
                     std::sqrt(M) * std::pow(p, 0.25) / std::sqrt(t)) *
                    std::sqrt(std::log(p));
      return kind == BoundKind::Bilinear ? core : core * std::log(K);
    }
    case BoundKind::Hyperbolic: {
      double K = need(prm.K, "K"), M = need(prm.M, "M"), H = need(prm.H, "H");
      double p = need(prm.p, "p"), t = need(prm.t, "t");
      return K *
             (1.0 / std::sqrt(H) + M * std::pow(p, 0.25) / std::sqrt(K) +
              std::sqrt(M) * std::pow(p, 0.25) / std::sqrt(t)) *
             std::sqrt(std::log(p)) * std::log(K);
    }
    case BoundKind::Smooth: {
      double N = need(prm.N, "N"), Q = need(prm.Q, "Q");
      double eps = need(prm.eps, "eps"), B = need(prm.B, "B");
      double delta = eps / (8.0 * B);
      return std::pow(N, 1.0 - delta) * Q;
    }
  }
  throw MissingParam("unknown envelope kind");
}

InstanceSpec random_instance(u64 seed, const InstanceConstraints& c) {
  if (c.p_min < 5 || c.p_min > c.p_max)
    throw OutOfRange("need 5 <= p_min <= p_max");
  Rng rng(seed);
  for (unsigned trial = 0; trial < c.max_rejections; ++trial) {
    u64 pc = rng.uniform(c.p_min, c.p_max);
    if (pc % 2 == 0) ++pc;
    if (pc > c.p_max || !is_prime_u64(pc)) continue;
    PrimeModulus p(pc);
    u64 a = rng.uniform(0, pc - 1), b = rng.uniform(0, pc - 1);
    u64 g = rng.uniform(1, pc - 1), d = rng.uniform(0, pc - 1);
    u64 det = p.sub(p.mul(a, d), p.mul(b, g));
    if (det == 0) continue;
    MoebiusMap map(p, a, b, g, d);
    if (map.spectral_class() == SpectralClass::Parabolic) continue;
    u64 u0 = rng.uniform(0, pc - 1);
    u64 h = rng.uniform(1, pc - 1);
    Orbit orbit(map, u0);
    u64 t = orbit.cycle().t;
    if (c.t_min_coeff > 0 &&
        static_cast<double>(t) <
            c.t_min_coeff * std::pow(static_cast<double>(pc), c.t_min_exp))
      continue;
    InstanceSpec inst;
    inst.seed = seed;
    inst.p = pc;
    inst.map = map.coeffs();
    inst.u0 = u0;
    inst.h = h;
    inst.t = t;
    inst.cls = map.spectral_class();
    return inst;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no instance with t >= %g * p^%g for p in [%llu, %llu] after %u draws",
                c.t_min_coeff, c.t_min_exp,
                static_cast<unsigned long long>(c.p_min),
                static_cast<unsigned long long>(c.p_max), c.max_rejections);
  throw Unsatisfiable(buf);
}

namespace {

void require(bool ok, const std::string& inequality, u64 seed) {
  if (!ok)
    throw HypothesisViolated("instance seed " + std::to_string(seed) +
                             " violates: " + inequality);
}

void check_hypotheses(const InstanceSpec& i, BoundKind kind) {
  require(i.p >= 5, "p >= 5", i.seed);
  require(i.h % i.p != 0, "h != 0 (mod p)", i.seed);
  require(i.cls != SpectralClass::Parabolic,
          "characteristic polynomial has two distinct roots (map not parabolic)", i.seed);
  double p = static_cast<double>(i.p);
  double t = static_cast<double>(i.t);
  double N = static_cast<double>(i.N);
  double Q = static_cast<double>(i.Q);
  switch (kind) {
    case BoundKind::Single:
      require(t >= std::pow(p, 0.5 + i.eps), "t >= p^(1/2+eps)", i.seed);
      require(N >= std::pow(p, 0.5 + i.eps), "N >= p^(1/2+eps)", i.seed);
      break;
    case BoundKind::Smooth:
      require(i.Q >= 1, "Q >= 1", i.seed);
      require(t >= Q * std::pow(p, 0.5 + i.eps), "t >= Q*p^(1/2+eps)", i.seed);
      require(N >= Q * Q * std::pow(p, 0.5 + i.eps), "N >= Q^2*p^(1/2+eps)", i.seed);
      require(std::pow(p, i.B) >= N, "p^B >= N", i.seed);
      break;
    case BoundKind::MultiTerm:
      require(i.s >= 1, "s >= 1", i.seed);
      require(i.M >= i.s, "M >= s", i.seed);
      require(i.N >= 1, "N >= 1", i.seed);
      break;
    case BoundKind::Bilinear:
      require(i.K >= 1 && i.M >= 1, "K, M >= 1", i.seed);
      break;
    case BoundKind::VarLimit:
      require(i.K >= 2 && i.M >= 1, "K >= 2 and M >= 1", i.seed);
      break;
    case BoundKind::Hyperbolic:
      require(i.H >= 1 && i.M > i.H, "1 <= H < M", i.seed);
      require(i.K >= 1, "K >= 1", i.seed);
      break;
  }
}

// deterministic per-instance shapes for the double/multi-term kinds
constexpr u64 kShapeSalt = 0x5851f42d4c957f2dULL;

SumRecord evaluate_sum(const InstanceSpec& i, BoundKind kind,
                       const FactorSieve* sieve, const SumOptions& opt) {
  PrimeModulus p(i.p);
  MoebiusMap map(p, i.map[0], i.map[1], i.map[2], i.map[3]);
  Orbit orbit(map, i.u0);
  switch (kind) {
    case BoundKind::Single:
      return single_sum(orbit, i.h, i.N, opt);
    case BoundKind::Smooth: {
      if (sieve == nullptr || sieve->limit() < i.N)
        throw MissingParam("the smooth bound needs a factor sieve covering N");
      return smooth_sum(orbit, i.h, i.N, i.Q, *sieve, opt);
    }
    case BoundKind::MultiTerm: {
      Rng rng(i.seed ^ kShapeSalt);
      // s distinct indices in [1, M], ascending; coefficients not all zero
      std::vector<u64> idx;
      while (idx.size() < i.s) {
        u64 m = rng.uniform(1, i.M);
        if (std::find(idx.begin(), idx.end(), m) == idx.end()) idx.push_back(m);
      }
      std::sort(idx.begin(), idx.end());
      std::vector<u64> coeff(i.s);
      bool any = false;
      while (!any) {
        for (auto& a : coeff) {
          a = rng.uniform(0, i.p - 1);
          any = any || a != 0;
        }
      }
      return multi_term_sum(orbit, coeff, idx, i.N, opt);
    }
    case BoundKind::Bilinear:
      return bilinear_sum(orbit, i.h, WeightSeq::ones(static_cast<size_t>(i.K)),
                          WeightSeq::ones(static_cast<size_t>(i.M)), opt);
    case BoundKind::VarLimit: {
      Rng rng(i.seed ^ kShapeSalt);
      std::vector<std::pair<u64, u64>> limits(static_cast<size_t>(i.M));
      for (auto& lm : limits) {
        u64 lo = rng.uniform(0, i.K - 2);
        lm = {lo, rng.uniform(lo + 1, i.K - 1)};
      }
      return varlimit_bilinear_sum(orbit, i.h,
                                   WeightSeq::ones(static_cast<size_t>(i.K)),
                                   WeightSeq::ones(static_cast<size_t>(i.M)), limits, opt);
    }
    case BoundKind::Hyperbolic: {
      std::vector<u64> lower(static_cast<size_t>(i.M - i.H + 1), 0);
      return hyperbolic_sum(orbit, i.h,
                            WeightSeq::ones(static_cast<size_t>(i.K / i.H)),
                            WeightSeq::ones(lower.size()), i.H, i.K, lower, opt);
    }
  }
  throw MissingParam("unknown bound kind");
}

EnvelopeParams envelope_params(const InstanceSpec& i, BoundKind kind) {
  EnvelopeParams prm;
  prm.p = static_cast<double>(i.p);
  prm.t = static_cast<double>(i.t);
  prm.eps = i.eps;
  prm.B = i.B;
  switch (kind) {
    case BoundKind::MultiTerm:
      prm.s = static_cast<double>(i.s);
      prm.M = static_cast<double>(i.M);
      prm.N = static_cast<double>(i.N);
      break;
    case BoundKind::Single:
      prm.N = static_cast<double>(i.N);
      break;
    case BoundKind::Bilinear:
    case BoundKind::VarLimit:
      prm.K = static_cast<double>(i.K);
      prm.M = static_cast<double>(i.M);
      break;
    case BoundKind::Hyperbolic:
      prm.K = static_cast<double>(i.K);
      prm.M = static_cast<double>(i.M);
      prm.H = static_cast<double>(i.H);
      break;
    case BoundKind::Smooth:
      prm.N = static_cast<double>(i.N);
      prm.Q = static_cast<double>(i.Q);
      break;
  }
  return prm;
}

}  // namespace

std::vector<BoundReport> run_check(const std::vector<InstanceSpec>& instances,
                                   BoundKind kind, const FactorSieve* sieve,
                                   const SumOptions& opt, unsigned workers) {
  for (const auto& inst : instances) check_hypotheses(inst, kind);
  std::vector<BoundReport> reports(instances.size());
  auto evaluate = [&](size_t idx) {
    const InstanceSpec& inst = instances[idx];
    auto start = std::chrono::steady_clock::now();
    SumRecord sum = evaluate_sum(inst, kind, sieve, opt);
    double env = envelope(kind, envelope_params(inst, kind));
    auto stop = std::chrono::steady_clock::now();
    BoundReport r;
    r.inst = inst;
    r.kind = kind;
    r.empirical = sum.modulus();
    r.envelope = env;
    r.ratio = env > 0 ? r.empirical / env : 0.0;
    r.ms = std::chrono::duration<double, std::milli>(stop - start).count();
    reports[idx] = r;
  };
  if (workers == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    workers = hw ? hw : 1;
  }
  if (workers == 1 || instances.size() <= 1) {
    for (size_t idx = 0; idx < instances.size(); ++idx) evaluate(idx);
  } else {
    std::atomic<size_t> next{0};
    auto loop = [&] {
      for (;;) {
        size_t idx = next.fetch_add(1);
        if (idx >= instances.size()) return;
        evaluate(idx);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < std::min<size_t>(workers, instances.size()); ++i)
      pool.emplace_back(loop);
    loop();
    for (auto& th : pool) th.join();
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const BoundReport& a, const BoundReport& b) {
                     if (a.ratio != b.ratio) return a.ratio > b.ratio;
                     return a.inst.seed < b.inst.seed;
                   });
  return reports;
}

double discrepancy(std::span<const u64> values, u64 p, u64 bins) {
  if (values.empty()) throw EmptyInput("discrepancy of an empty sequence");
  if (bins < 1) throw OutOfRange("bins must be >= 1");
  std::vector<u64> count(static_cast<size_t>(bins), 0);
  for (u64 v : values) {
    u64 b = static_cast<u64>(u128(v % p) * bins / p);
    ++count[static_cast<size_t>(b)];
  }
  double n = static_cast<double>(values.size());
  double worst = 0.0;
  u64 prefix = 0;
  for (u64 i = 1; i <= bins; ++i) {
    prefix += count[static_cast<size_t>(i - 1)];
    double dev = std::abs(static_cast<double>(prefix) / n -
                          static_cast<double>(i) / static_cast<double>(bins));
    worst = std::max(worst, dev);
  }
  return worst;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

namespace {

std::string fmt_double(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_reports_csv(std::ostream& os, const std::vector<BoundReport>& reports) {
  os << "seed,p,t,class,h,N,Q,eps,B,kind,empirical,envelope,ratio,ms\n";
  for (const auto& r : reports) {
    os << r.inst.seed << ',' << r.inst.p << ',' << r.inst.t << ','
       << csv_escape(to_string(r.inst.cls)) << ',' << r.inst.h << ',' << r.inst.N
       << ',' << r.inst.Q << ',' << fmt_double(r.inst.eps, "%.6g") << ','
       << fmt_double(r.inst.B, "%.6g") << ',' << csv_escape(to_string(r.kind)) << ','
       << fmt_double(r.empirical) << ',' << fmt_double(r.envelope) << ','
       << fmt_double(r.ratio) << ',' << fmt_double(r.ms, "%.3f") << '\n';
  }
}

void write_reports_jsonl(std::ostream& os, const std::vector<BoundReport>& reports) {
  for (const auto& r : reports) {
    nlohmann::json row{{"seed", r.inst.seed},
                       {"p", r.inst.p},
                       {"t", r.inst.t},
                       {"class", to_string(r.inst.cls)},
                       {"h", r.inst.h},
                       {"N", r.inst.N},
                       {"Q", r.inst.Q},
                       {"eps", r.inst.eps},
                       {"B", r.inst.B},
                       {"kind", to_string(r.kind)},
                       {"empirical", r.empirical},
                       {"envelope", r.envelope},
                       {"ratio", r.ratio},
                       {"ms", r.ms}};
    os << row.dump() << '\n';
  }
}

}  // namespace orbitsum
