#include "orbitsum/modarith.hpp"

#include <algorithm>
#include <numeric>

namespace orbitsum {

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  // This base set is a proven witness set for all n < 2^64.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { witness = false; break; }
    }
    if (witness) return false;
  }
  return true;
}

PrimeModulus::PrimeModulus(u64 p) : p_(p) {
  if (p < 5 || p >= (u64(1) << 62))
    throw InvalidModulus("modulus must satisfy 5 <= p < 2^62, got " + std::to_string(p));
  if (p % 2 == 0 || !is_prime_u64(p))
    throw InvalidModulus("modulus must be an odd prime, got " + std::to_string(p));
}

u64 PrimeModulus::reduce_signed(i64 x) const {
  i64 r = x % static_cast<i64>(p_);
  if (r < 0) r += static_cast<i64>(p_);
  return static_cast<u64>(r);
}

u64 PrimeModulus::pow(u64 a, u64 e) const { return powmod(a % p_, e, p_); }

u64 PrimeModulus::inv(u64 a) const {
  a %= p_;
  if (a == 0) throw ZeroInverse("no inverse of 0 mod " + std::to_string(p_));
  i64 old_r = static_cast<i64>(p_), r = static_cast<i64>(a);
  i64 old_s = 0, s = 1;
  while (r != 0) {
    i64 q = old_r / r;
    old_r -= q * r; std::swap(old_r, r);
    old_s -= q * s; std::swap(old_s, s);
  }
  return reduce_signed(old_s);
}

int PrimeModulus::legendre(u64 a) const {
  a %= p_;
  if (a == 0) return 0;
  u64 e = pow(a, (p_ - 1) / 2);
  return e == 1 ? 1 : -1;
}

Residue Residue::from_signed(i64 value, PrimeModulus m) {
  return Residue(m.reduce_signed(value), m);
}

const Residue& Residue::same(const Residue& o) const {
  if (!(m_ == o.m_))
    throw ModulusMismatch("operands bound to different moduli");
  return o;
}

Residue mod_inv(const Residue& a) {
  return Residue(a.modulus().inv(a.value()), a.modulus());
}

Residue mod_pow(const Residue& a, u64 e) {
  return Residue(a.modulus().pow(a.value(), e), a.modulus());
}

int legendre(const Residue& a) { return a.modulus().legendre(a.value()); }

namespace {

// Brent's variant of the rho cycle finder. Deterministic: the caller walks
// c = 1, 2, ... until a proper factor shows up.
u64 brent_rho(u64 n, u64 c) {
  auto f = [n, c](u64 x) { return (mulmod(x, x, n) + c) % n; };
  u64 x = 2, y = 2, d = 1, q = 1, ys = y;
  u64 r = 1;
  const u64 batch = 128;
  while (d == 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    for (u64 k = 0; k < r && d == 1; k += batch) {
      ys = y;
      u64 lim = std::min(batch, r - k);
      for (u64 i = 0; i < lim; ++i) {
        y = f(y);
        q = mulmod(q, x > y ? x - y : y - x, n);
      }
      d = std::gcd(q, n);
    }
    r <<= 1;
  }
  if (d == n) {
    // backtrack one step at a time
    do {
      ys = f(ys);
      d = std::gcd(x > ys ? x - ys : ys - x, n);
    } while (d == 1);
  }
  return d;
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) { out.push_back(n); return; }
  u64 d = n;
  for (u64 c = 1; d == n; ++c) d = brent_rho(n, c);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<PrimePower> factorize(u64 n) {
  if (n == 0 || n >= (u64(1) << 63))
    throw OutOfRange("factorize requires 1 <= n < 2^63");
  std::vector<u64> primes;
  for (u64 q : {2ull, 3ull, 5ull}) {
    while (n % q == 0) { primes.push_back(q); n /= q; }
  }
  // 2,3,5-wheel trial division up to 10^6
  static constexpr u64 wheel[8] = {4, 2, 4, 2, 4, 6, 2, 6};
  u64 q = 7;
  for (int i = 0; q <= 1000000 && q * q <= n; q += wheel[i], i = (i + 1) & 7) {
    while (n % q == 0) { primes.push_back(q); n /= q; }
  }
  if (n > 1) {
    if (q * q > n) {
      primes.push_back(n);
    } else {
      factor_into(n, primes);
    }
  }
  std::sort(primes.begin(), primes.end());
  std::vector<PrimePower> out;
  for (size_t i = 0; i < primes.size();) {
    size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    out.push_back({primes[i], static_cast<unsigned>(j - i)});
    i = j;
  }
  return out;
}

u64 factorization_product(const std::vector<PrimePower>& f) {
  u64 n = 1;
  for (const auto& pp : f)
    for (unsigned e = 0; e < pp.exponent; ++e) n *= pp.prime;
  return n;
}

}  // namespace orbitsum
