#include "orbitsum/expsums.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace orbitsum {

WeightSeq::WeightSeq(std::vector<std::complex<double>> w) : w_(std::move(w)) {
  for (size_t i = 0; i < w_.size(); ++i) {
    if (!(std::abs(w_[i]) <= 1.0 + 1e-12))
      throw WeightOutOfRange("|weight[" + std::to_string(i + 1) + "]| exceeds 1");
  }
}

WeightSeq WeightSeq::ones(size_t n) {
  return WeightSeq(std::vector<std::complex<double>>(n, {1.0, 0.0}));
}

namespace {

unsigned resolve_threads(unsigned t) {
  if (t != 0) return t;
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

struct ChunkValue {
  std::complex<double> value{0.0, 0.0};
  u64 count = 0;
};

// Deterministic reduction: fixed chunks by index, subtotals combined in
// ascending chunk order, independent of the worker count.
template <typename ChunkFn>  // ChunkFn(b, e) -> std::complex<double>
ChunkValue chunked_reduce(u64 count, const SumOptions& opt, ChunkFn&& fn) {
  ChunkValue out;
  if (count == 0) return out;
  const u64 chunk = std::max<u64>(1, opt.chunk_size);
  const u64 nchunks = (count + chunk - 1) / chunk;
  std::vector<std::complex<double>> results(static_cast<size_t>(nchunks));
  const u64 T = std::min<u64>(resolve_threads(opt.threads), nchunks);
  auto run_chunk = [&](u64 k) {
    results[static_cast<size_t>(k)] = fn(k * chunk, std::min(count, (k + 1) * chunk));
  };
  if (T <= 1) {
    for (u64 k = 0; k < nchunks; ++k) run_chunk(k);
  } else {
    std::atomic<u64> next{0};
    auto worker = [&] {
      for (;;) {
        u64 k = next.fetch_add(1);
        if (k >= nchunks) return;
        run_chunk(k);
      }
    };
    std::vector<std::thread> pool;
    for (u64 i = 0; i + 1 < T; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }
  UnitSum master;
  for (const auto& v : results) master.add(v);
  out.value = master.value();
  out.count = count;
  return out;
}

// Random access to e_p(h u_n). For periods small enough to tabulate (and
// enough terms to amortize the pass over one period), one complex value per
// cycle position is precomputed; the fallback is a matrix-power lookup per
// term. Both paths evaluate the same function on the same integers, so the
// produced doubles are identical.
class OrbitPhase {
 public:
  OrbitPhase(const Orbit& orbit, u64 h, u64 expected_terms)
      : orbit_(orbit),
        p_(orbit.map().modulus()),
        h_(p_.reduce(h)),
        root_(p_),
        t_(orbit.cycle().t) {
    constexpr u64 kTableMax = 4000000;
    if (t_ <= kTableMax && expected_terms >= 1024 && expected_terms * 16 >= t_) {
      table_.reserve(static_cast<size_t>(t_));
      orbit.stream(0, t_, [&](u64 u) { table_.push_back(root_(p_.mul(h_, u))); });
    }
  }

  u64 period() const { return t_; }

  std::complex<double> operator()(u64 n) const {
    u64 j = n % t_;
    if (!table_.empty()) return table_[static_cast<size_t>(j)];
    return root_(p_.mul(h_, orbit_.element(j)));
  }

 private:
  const Orbit& orbit_;
  PrimeModulus p_;
  u64 h_;
  UnitRoot root_;
  u64 t_;
  std::vector<std::complex<double>> table_;
};

// sum over n = first .. first+count-1 of e_p(h u_n), one orbit seek per chunk.
ChunkValue consecutive_sum(const Orbit& orbit, u64 h, u64 first, u64 count,
                           const SumOptions& opt) {
  const PrimeModulus p = orbit.map().modulus();
  const UnitRoot root(p);
  return chunked_reduce(count, opt, [&](u64 b, u64 e) {
    UnitSum s;
    orbit.stream(first + b, e - b, [&](u64 u) { s.add(root(p.mul(h, u))); });
    return s.value();
  });
}

// indexed sum: sum over i of e_p(h u_{idx[i]})
ChunkValue indexed_sum(const OrbitPhase& phase, std::span<const u64> idx,
                       const SumOptions& opt) {
  return chunked_reduce(idx.size(), opt, [&](u64 b, u64 e) {
    UnitSum s;
    for (u64 i = b; i < e; ++i) s.add(phase(idx[static_cast<size_t>(i)]));
    return s.value();
  });
}

SumRecord base_record(const char* kind, const Orbit& orbit, u64 h) {
  SumRecord r;
  r.kind = kind;
  r.p = orbit.map().modulus().value();
  r.h = h;
  r.t = orbit.cycle().t;
  r.map = orbit.map().coeffs();
  r.u0 = orbit.initial();
  return r;
}

u64 checked_frequency(const Orbit& orbit, u64 h) {
  u64 hr = orbit.map().modulus().reduce(h);
  if (hr == 0) throw ZeroFrequency("frequency h must be nonzero mod p");
  return hr;
}

u64 mod_index(u64 a, u64 b, u64 t) {  // (a*b) mod t without overflow
  return static_cast<u64>(u128(a % t) * (b % t) % t);
}

}  // namespace

SumRecord single_sum(const Orbit& orbit, u64 h, u64 N, const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  SumRecord rec = base_record("single", orbit, hr);
  rec.N = N;
  if (N == 0) return rec;
  const u64 t = rec.t;
  if (opt.exploit_period && N > t) {
    ChunkValue full = consecutive_sum(orbit, hr, 1, t, opt);
    ChunkValue rem = consecutive_sum(orbit, hr, 1, N % t, opt);
    double reps = static_cast<double>(N / t);
    UnitSum s;
    s.add(reps * full.value);
    s.add(rem.value);
    rec.value = s.value();
  } else {
    rec.value = consecutive_sum(orbit, hr, 1, N, opt).value;
  }
  rec.term_count = N;
  return rec;
}

SumRecord multi_term_sum(const Orbit& orbit, std::span<const u64> coeffs,
                         std::span<const u64> indices, u64 N,
                         const SumOptions& opt) {
  if (indices.empty() || coeffs.size() != indices.size())
    throw BadIndices("need s >= 1 indices matching the coefficient count");
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || (i > 0 && indices[i] <= indices[i - 1]))
      throw BadIndices("indices must be strictly increasing and >= 1");
  }
  const PrimeModulus p = orbit.map().modulus();
  std::vector<u64> a(coeffs.size());
  bool any = false;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    a[i] = p.reduce(coeffs[i]);
    any = any || a[i] != 0;
  }
  if (!any) throw AllZeroCoefficients("coefficients are all zero mod p");

  SumRecord rec = base_record("multi", orbit, 0);
  rec.N = N;
  if (N == 0) return rec;
  const u64 t = rec.t;
  const UnitRoot root(p);
  // cache u over one period when reasonable; arguments mix several
  // progressions, so the cached object is the value table, not phases
  std::vector<u64> uvals;
  constexpr u64 kTableMax = 4000000;
  if (t <= kTableMax && N * indices.size() >= std::max<u64>(1024, t / 16)) {
    uvals.reserve(static_cast<size_t>(t));
    orbit.stream(0, t, [&](u64 u) { uvals.push_back(u); });
  }
  auto u_at = [&](u64 j) { return uvals.empty() ? orbit.element(j) : uvals[static_cast<size_t>(j)]; };
  ChunkValue v = chunked_reduce(N, opt, [&](u64 b, u64 e) {
    UnitSum s;
    for (u64 i = b; i < e; ++i) {
      u64 n = i + 1;
      u64 arg = 0;
      for (size_t j = 0; j < a.size(); ++j)
        arg = p.add(arg, p.mul(a[j], u_at(mod_index(indices[j], n, t))));
      s.add(root(arg));
    }
    return s.value();
  });
  rec.value = v.value;
  rec.term_count = v.count;
  return rec;
}

SumRecord prime_time_sum(const Orbit& orbit, u64 h, u64 N,
                         const FactorSieve& sieve, const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  if (N > sieve.limit()) throw OutOfRange("N exceeds sieve limit");
  SumRecord rec = base_record("prime", orbit, hr);
  rec.N = N;
  std::vector<u64> primes;
  for (u64 n = 2; n <= N; ++n)
    if (sieve.is_prime(n)) primes.push_back(n);
  OrbitPhase phase(orbit, hr, primes.size());
  ChunkValue v = indexed_sum(phase, primes, opt);
  rec.value = v.value;
  rec.term_count = v.count;
  return rec;
}

SumRecord smooth_sum(const Orbit& orbit, u64 h, u64 N, u64 Q,
                     const FactorSieve& sieve, const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  SumRecord rec = base_record("smooth", orbit, hr);
  rec.N = N;
  rec.Q = Q;
  std::vector<u64> ns = enumerate_smooth(N, Q, sieve);
  OrbitPhase phase(orbit, hr, ns.size());
  ChunkValue v = indexed_sum(phase, ns, opt);
  rec.value = v.value;
  rec.term_count = v.count;
  return rec;
}

DecomposedSmoothSum smooth_sum_decomposed(const Orbit& orbit, u64 h, u64 N,
                                          u64 Q, u64 L, const FactorSieve& sieve,
                                          const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  if (Q < 2 || L < Q) throw BadLimits("need Q >= 2 and L >= Q");
  if (N > sieve.limit()) throw OutOfRange("N exceeds sieve limit");

  DecomposedSmoothSum out;
  out.head = base_record("smooth-head", orbit, hr);
  out.head.N = N;
  out.head.Q = Q;
  out.head.L = L;

  // head: smooth n < L
  std::vector<u64> head_ns;
  u64 head_max = std::min(N, L == 0 ? 0 : L - 1);
  if (head_max >= 1) head_ns = enumerate_smooth(head_max, Q, sieve);

  // tail: one (r, s) pair per smooth n in [L, N], grouped by q = P(r)
  std::map<u64, std::vector<u64>> by_q;  // q -> products r*s in ascending n order
  if (L <= N) {
    vaughan_pairs(N, Q, L, sieve, [&](u64, const VaughanPair& pair) {
      by_q[pair.q].push_back(pair.r * pair.s);  // == n
    });
  }

  u64 expected = head_ns.size();
  for (const auto& [q, list] : by_q) expected += list.size();
  OrbitPhase phase(orbit, hr, expected);

  ChunkValue head_v = indexed_sum(phase, head_ns, opt);
  out.head.value = head_v.value;
  out.head.term_count = head_v.count;

  UnitSum master;
  master.add(head_v.value);
  u64 terms = head_v.count;
  for (const auto& [q, list] : by_q) {
    ChunkValue v = indexed_sum(phase, list, opt);
    SumRecord qrec = base_record("smooth-tail-q", orbit, hr);
    qrec.N = N;
    qrec.Q = Q;
    qrec.L = L;
    qrec.value = v.value;
    qrec.term_count = v.count;
    master.add(v.value);
    terms += v.count;
    out.per_q.emplace_back(q, std::move(qrec));
  }

  out.total = base_record("smooth-decomposed", orbit, hr);
  out.total.N = N;
  out.total.Q = Q;
  out.total.L = L;
  out.total.value = master.value();
  out.total.term_count = terms;
  return out;
}

SumRecord bilinear_sum(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                       const WeightSeq& beta, const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  SumRecord rec = base_record("bilinear", orbit, hr);
  const u64 K = alpha.size(), M = beta.size();
  if (K == 0 || M == 0) return rec;
  if (u128(K) * M >= (u128(1) << 62)) throw LimitExceeded("K*M too large");
  const u64 t = rec.t;
  OrbitPhase phase(orbit, hr, K * M);
  ChunkValue v = chunked_reduce(K * M, opt, [&](u64 b, u64 e) {
    UnitSum s;
    for (u64 i = b; i < e; ++i) {
      u64 k = i / M + 1, m = i % M + 1;
      s.add(alpha[static_cast<size_t>(k - 1)] * beta[static_cast<size_t>(m - 1)] *
            phase(mod_index(k, m, t)));
    }
    return s.value();
  });
  rec.value = v.value;
  rec.term_count = v.count;
  return rec;
}

namespace {

// shared ragged-region driver: rows indexed r = 0..R-1, inner k in
// (lo[r], hi[r]]; term = alpha_k * row_weight_r * e_p(h u_{k * m_r})
SumRecord ragged_sum(const char* kind, const Orbit& orbit, u64 hr,
                     const WeightSeq& alpha, const WeightSeq& beta,
                     std::span<const u64> lo, std::span<const u64> hi,
                     u64 first_m, const SumOptions& opt) {
  SumRecord rec = base_record(kind, orbit, hr);
  const u64 R = beta.size();
  std::vector<u64> offset(static_cast<size_t>(R) + 1, 0);
  for (u64 r = 0; r < R; ++r) {
    u64 rows = hi[static_cast<size_t>(r)] > lo[static_cast<size_t>(r)]
                   ? hi[static_cast<size_t>(r)] - lo[static_cast<size_t>(r)]
                   : 0;
    offset[static_cast<size_t>(r) + 1] = offset[static_cast<size_t>(r)] + rows;
  }
  const u64 total = offset[static_cast<size_t>(R)];
  if (total == 0) return rec;
  const u64 t = rec.t;
  OrbitPhase phase(orbit, hr, total);
  ChunkValue v = chunked_reduce(total, opt, [&](u64 b, u64 e) {
    UnitSum s;
    // find the row containing b, then walk forward
    u64 r = static_cast<u64>(std::upper_bound(offset.begin(), offset.end(), b) -
                             offset.begin()) - 1;
    u64 k = lo[static_cast<size_t>(r)] + (b - offset[static_cast<size_t>(r)]) + 1;
    u64 m = first_m + r;
    for (u64 i = b; i < e; ++i) {
      while (i >= offset[static_cast<size_t>(r) + 1]) {
        ++r;
        k = lo[static_cast<size_t>(r)] + 1;
        m = first_m + r;
      }
      s.add(alpha[static_cast<size_t>(k - 1)] * beta[static_cast<size_t>(r)] *
            phase(mod_index(k, m, t)));
      ++k;
    }
    return s.value();
  });
  rec.value = v.value;
  rec.term_count = v.count;
  return rec;
}

}  // namespace

SumRecord varlimit_bilinear_sum(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                                const WeightSeq& beta,
                                std::span<const std::pair<u64, u64>> limits,
                                const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  const u64 K = alpha.size(), M = beta.size();
  if (limits.size() != M) throw BadLimits("need one (L_m, K_m) pair per m");
  std::vector<u64> lo(M), hi(M);
  for (u64 m = 0; m < M; ++m) {
    auto [Lm, Km] = limits[static_cast<size_t>(m)];
    if (!(Lm < Km && Km < K))
      throw BadLimits("require L_m < K_m < K at m = " + std::to_string(m + 1));
    lo[static_cast<size_t>(m)] = Lm;
    hi[static_cast<size_t>(m)] = Km;
  }
  return ragged_sum("varlimit", orbit, hr, alpha, beta, lo, hi, 1, opt);
}

namespace {

void validate_hyperbolic(const WeightSeq& alpha, const WeightSeq& beta, u64 H,
                         u64 K, std::span<const u64> lower) {
  if (H < 1 || beta.size() < 2)
    throw BadLimits("need 1 <= H < M (beta covers m = H..M with M > H)");
  if (lower.size() != beta.size())
    throw BadLimits("need one lower limit per m in H..M");
  u64 kmax = H == 0 ? 0 : K / H;
  if (alpha.size() < kmax)
    throw BadLimits("alpha must cover k <= floor(K/H) = " + std::to_string(kmax));
}

}  // namespace

SumRecord hyperbolic_sum(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                         const WeightSeq& beta, u64 H, u64 K,
                         std::span<const u64> lower, const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  validate_hyperbolic(alpha, beta, H, K, lower);
  const u64 M = H + beta.size() - 1;
  std::vector<u64> lo(beta.size()), hi(beta.size());
  for (u64 m = H; m <= M; ++m) {
    lo[static_cast<size_t>(m - H)] = lower[static_cast<size_t>(m - H)];
    hi[static_cast<size_t>(m - H)] = K / m;
  }
  SumRecord rec = ragged_sum("hyperbolic", orbit, hr, alpha, beta, lo, hi, H, opt);
  return rec;
}

SumRecord hyperbolic_sum_blocked(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                                 const WeightSeq& beta, u64 H, u64 K,
                                 std::span<const u64> lower,
                                 [[maybe_unused]] const SumOptions& opt) {
  u64 hr = checked_frequency(orbit, h);
  validate_hyperbolic(alpha, beta, H, K, lower);
  const u64 M = H + beta.size() - 1;
  SumRecord rec = base_record("hyperbolic-blocked", orbit, hr);
  const u64 t = rec.t;
  u64 expected = 0;
  for (u64 m = H; m <= M; ++m) {
    u64 himax = K / m;
    if (himax > lower[static_cast<size_t>(m - H)])
      expected += himax - lower[static_cast<size_t>(m - H)];
  }
  OrbitPhase phase(orbit, hr, expected);

  const long double e1 = std::exp(1.0L);
  long long I = static_cast<long long>(std::floor(std::log(static_cast<double>(H)))) - 1;
  long long J = static_cast<long long>(std::ceil(std::log(static_cast<double>(M))));
  UnitSum master;
  u64 terms = 0;
  long double block_lo = std::pow(e1, static_cast<long double>(I));
  for (long long j = I; j <= J; ++j, block_lo *= e1) {
    long double block_hi = block_lo * e1;
    u64 mlo = std::max<u64>(H, static_cast<u64>(std::floor(block_lo)) + 1);
    u64 mhi = block_hi >= static_cast<long double>(M) ? M
              : std::min<u64>(M, static_cast<u64>(std::floor(block_hi)));
    if (mlo > mhi) continue;
    UnitSum block;
    for (u64 m = mlo; m <= mhi; ++m) {
      u64 himax = K / m;
      for (u64 k = lower[static_cast<size_t>(m - H)] + 1; k <= himax; ++k) {
        block.add(alpha[static_cast<size_t>(k - 1)] * beta[static_cast<size_t>(m - H)] *
                  phase(mod_index(k, m, t)));
        ++terms;
      }
    }
    master.add(block.value());
  }
  rec.value = master.value();
  rec.term_count = terms;
  return rec;
}

}  // namespace orbitsum
