#ifndef ORBITSUM_MODARITH_HPP
#define ORBITSUM_MODARITH_HPP

#include <vector>

#include "orbitsum/common.hpp"

namespace orbitsum {

/// Deterministic Miller-Rabin, exact for every n < 2^64.
bool is_prime_u64(u64 n);

/// A validated odd prime modulus p with 5 <= p < 2^62.
///
/// All products go through 128-bit intermediates, so no sequence of
/// operations can overflow. Instances are immutable values; copying is a
/// single word.
class PrimeModulus {
 public:
  explicit PrimeModulus(u64 p);

  u64 value() const { return p_; }

  u64 reduce(u64 x) const { return x % p_; }
  /// Reduces a possibly negative value into [0, p).
  u64 reduce_signed(i64 x) const;

  // a, b already in [0, p)
  u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= p_ ? s - p_ : s; }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const { return static_cast<u64>(u128(a) * b % p_); }

  /// Square-and-multiply; pow(a, 0) == 1 for every a, including 0.
  u64 pow(u64 a, u64 e) const;

  /// Modular inverse by extended gcd. Throws ZeroInverse for a == 0.
  u64 inv(u64 a) const;

  /// Euler criterion a^((p-1)/2) mapped to {-1, 0, +1}.
  int legendre(u64 a) const;

  friend bool operator==(const PrimeModulus&, const PrimeModulus&) = default;

 private:
  u64 p_;
};

/// Least residue in [0, p) bound to its modulus.
class Residue {
 public:
  Residue(u64 value, PrimeModulus m) : v_(m.reduce(value)), m_(m) {}
  static Residue from_signed(i64 value, PrimeModulus m);

  u64 value() const { return v_; }
  PrimeModulus modulus() const { return m_; }

  Residue operator+(const Residue& o) const { return raw(m_.add(v_, same(o).v_), m_); }
  Residue operator-(const Residue& o) const { return raw(m_.sub(v_, same(o).v_), m_); }
  Residue operator*(const Residue& o) const { return raw(m_.mul(v_, same(o).v_), m_); }
  Residue operator/(const Residue& o) const { return raw(m_.mul(v_, m_.inv(same(o).v_)), m_); }
  Residue operator-() const { return raw(m_.neg(v_), m_); }
  friend bool operator==(const Residue& a, const Residue& b) {
    return a.m_ == b.m_ && a.v_ == b.v_;
  }

 private:
  static Residue raw(u64 v, PrimeModulus m) { Residue r(0, m); r.v_ = v; return r; }
  const Residue& same(const Residue& o) const;

  u64 v_;
  PrimeModulus m_;
};

Residue mod_inv(const Residue& a);           // throws ZeroInverse
Residue mod_pow(const Residue& a, u64 e);
int legendre(const Residue& a);

struct PrimePower {
  u64 prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Complete prime factorization, primes strictly increasing.
/// factorize(1) == {}. Trial division below 10^6, then deterministic
/// Brent-cycle splitting (fixed start x0 = 2, increments c = 1, 2, ...).
/// Accepts 1 <= n < 2^63.
std::vector<PrimePower> factorize(u64 n);

/// Recomputes the product of prime^exponent (test/diagnostic helper).
u64 factorization_product(const std::vector<PrimePower>& f);

}  // namespace orbitsum

#endif  // ORBITSUM_MODARITH_HPP
