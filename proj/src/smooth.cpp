#include "orbitsum/smooth.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>

namespace orbitsum {

FactorSieve FactorSieve::build(u64 limit) {
  if (limit < 2) throw OutOfRange("sieve limit must be >= 2");
  if (limit > kMaxLimit)
    throw LimitExceeded("sieve limit " + std::to_string(limit) + " exceeds " +
                        std::to_string(kMaxLimit));
  std::vector<u32> spf(static_cast<size_t>(limit) + 1, 0);
  std::vector<u32> primes;
  for (u64 i = 2; i <= limit; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<u32>(i);
      primes.push_back(static_cast<u32>(i));
    }
    for (u32 p : primes) {
      if (p > spf[i] || i * p > limit) break;
      spf[i * p] = p;
    }
  }
  return FactorSieve(limit, std::move(spf));
}

u64 FactorSieve::largest_prime_factor(u64 n) const {
  if (n == 1) return 1;
  check_range(n);
  u64 best = 1;
  while (n > 1) {
    u64 p = spf_[static_cast<size_t>(n)];
    best = p;  // spf of the remaining cofactor only grows
    while (n % p == 0) n /= p;
  }
  return best;
}

bool FactorSieve::is_smooth(u64 n, u64 q) const {
  if (n == 1) return true;
  check_range(n);
  while (n > 1) {
    u64 p = spf_[static_cast<size_t>(n)];
    if (p > q) return false;
    while (n % p == 0) n /= p;
  }
  return true;
}

std::vector<PrimePower> FactorSieve::factor(u64 n) const {
  std::vector<PrimePower> out;
  if (n == 1) return out;
  check_range(n);
  while (n > 1) {
    u64 p = spf_[static_cast<size_t>(n)];
    unsigned e = 0;
    while (n % p == 0) { n /= p; ++e; }
    out.push_back({p, e});
  }
  return out;
}

namespace {

void put_u32_le(std::ostream& os, u32 v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64_le(std::ostream& os, u64 v) {
  put_u32_le(os, static_cast<u32>(v));
  put_u32_le(os, static_cast<u32>(v >> 32));
}

u32 get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ParseError("truncated sieve file");
  return u32(b[0]) | u32(b[1]) << 8 | u32(b[2]) << 16 | u32(b[3]) << 24;
}

u64 get_u64_le(std::istream& is) {
  u64 lo = get_u32_le(is);
  u64 hi = get_u32_le(is);
  return lo | hi << 32;
}

}  // namespace

void FactorSieve::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write("SPF1", 4);
  put_u64_le(os, limit_);
  for (u32 v : spf_) put_u32_le(os, v);
  if (!os) throw Error("short write to " + path);
}

FactorSieve FactorSieve::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SPF1", 4) != 0)
    throw ParseError(path + ": bad sieve magic");
  u64 limit = get_u64_le(is);
  if (limit < 2 || limit > kMaxLimit) throw ParseError(path + ": bad sieve limit");
  std::vector<u32> spf(static_cast<size_t>(limit) + 1);
  for (auto& v : spf) v = get_u32_le(is);
  // spot-check a few entries before trusting the table
  for (u64 n : {u64(2), limit / 2, limit}) {
    if (n < 2) continue;
    u32 p = spf[static_cast<size_t>(n)];
    if (p < 2 || n % p != 0) throw ParseError(path + ": corrupt sieve entry");
  }
  return FactorSieve(limit, std::move(spf));
}

std::vector<u64> enumerate_smooth(u64 N, u64 Q, const FactorSieve& sieve) {
  std::vector<u64> out;
  for_each_smooth(N, Q, sieve, [&](u64 n) { out.push_back(n); });
  return out;
}

u64 psi_count(u64 N, u64 Q, const FactorSieve& sieve) {
  u64 count = 0;
  for_each_smooth(N, Q, sieve, [&](u64) { ++count; });
  return count;
}

RhoTable RhoTable::build(double u_max, double step) {
  if (!(step > 0) || !(u_max > 1)) throw OutOfRange("need step > 0 and u_max > 1");
  const u64 res = static_cast<u64>(std::llround(1.0 / step));
  if (res < 2 || std::abs(res * step - 1.0) > 1e-12)
    throw OutOfRange("1/step must be an integer");
  const u64 n = static_cast<u64>(std::ceil(u_max * static_cast<double>(res)));
  std::vector<long double> v(static_cast<size_t>(n) + 1);
  for (u64 k = 0; k <= res && k <= n; ++k) v[static_cast<size_t>(k)] = 1.0L;
  const long double h = 1.0L / static_cast<long double>(res);
  for (u64 k = res; k < n; ++k) {
    // midpoint of [k*h, (k+1)*h]; the delayed argument lands exactly halfway
    // between grid points, so its second-order interpolant is the mean
    long double u_mid = (static_cast<long double>(k) + 0.5L) * h;
    long double x = u_mid - 1.0L;
    long double rho_x;
    if (x <= 1.0L) {
      rho_x = 1.0L;
    } else {
      u64 j = k - res;  // x sits between grid j and j+1
      rho_x = 0.5L * (v[static_cast<size_t>(j)] + v[static_cast<size_t>(j) + 1]);
    }
    v[static_cast<size_t>(k) + 1] = v[static_cast<size_t>(k)] - h * rho_x / u_mid;
  }
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
  return RhoTable(step, std::move(out));
}

double RhoTable::operator()(double u) const {
  if (u < 0) throw NegativeArgument("rho argument must be >= 0");
  if (u <= 1.0) return 1.0;
  double pos = u / step_;
  size_t i = static_cast<size_t>(pos);
  if (i + 1 >= values_.size()) {
    // exactly the last grid point still resolves; anything past the table is 0
    return pos <= static_cast<double>(values_.size() - 1) ? values_.back() : 0.0;
  }
  double frac = pos - static_cast<double>(i);
  return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
}

namespace {
std::once_flag g_rho_once;
const RhoTable* g_rho_table = nullptr;
}  // namespace

double dickman_rho(double u) {
  std::call_once(g_rho_once, [] { g_rho_table = new RhoTable(RhoTable::build()); });
  return (*g_rho_table)(u);
}

double psi_estimate(u64 N, u64 Q, const RhoTable& table) {
  if (Q < 2) throw OutOfRange("psi_estimate requires Q >= 2");
  if (N == 0) return 0.0;
  double u = std::log(static_cast<double>(N)) / std::log(static_cast<double>(Q));
  return static_cast<double>(N) * table(u);
}

double psi_estimate(u64 N, u64 Q) {
  if (Q < 2) throw OutOfRange("psi_estimate requires Q >= 2");
  if (N == 0) return 0.0;
  double u = std::log(static_cast<double>(N)) / std::log(static_cast<double>(Q));
  return static_cast<double>(N) * dickman_rho(u);
}

VaughanPair vaughan_factor(u64 n, u64 L, u64 Q, const FactorSieve& sieve) {
  if (Q < 2 || L < Q) throw BadLimits("need Q >= 2 and L >= Q");
  if (n < L) throw TooSmall("n = " + std::to_string(n) + " below L = " + std::to_string(L));
  if (!sieve.is_smooth(n, Q))
    throw NotSmooth(std::to_string(n) + " is not " + std::to_string(Q) + "-smooth");

  // ascending prime factors with multiplicity
  VaughanPair pair;
  u64 rest = n;
  u64 r = 1;
  while (rest > 1) {
    u64 p = sieve.spf(rest);
    if (u128(r) * p >= L) break;
    r *= p;
    rest /= p;
  }
  pair.r = r;
  pair.s = n / r;
  pair.q = sieve.largest_prime_factor(r);

  u64 ps = pair.s == 1 ? FactorSieve::kNoPrime : sieve.spf(pair.s);
  bool ok = u128(pair.r) * Q >= L && pair.r < L;
  ok = ok && pair.q <= ps;
  ok = ok && (ps == FactorSieve::kNoPrime || u128(pair.r) * ps >= L);
  if (!ok)
    throw ConditionViolation("split of n = " + std::to_string(n) + " violates the (r, s) region");
  return pair;
}

}  // namespace orbitsum
