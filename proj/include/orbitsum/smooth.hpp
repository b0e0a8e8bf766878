#ifndef ORBITSUM_SMOOTH_HPP
#define ORBITSUM_SMOOTH_HPP

#include <limits>
#include <string>
#include <vector>

#include "orbitsum/modarith.hpp"

namespace orbitsum {

/// Smallest-prime-factor table for 2..limit from a linear sieve.
///
/// Conventions for n == 1: largest_prime_factor(1) == 1 and
/// smallest_prime_factor(1) == kNoPrime (an "infinite" prime), so 1 counts as
/// Q-smooth for every Q >= 1.
class FactorSieve {
 public:
  static constexpr u64 kNoPrime = std::numeric_limits<u64>::max();
  static constexpr u64 kMaxLimit = 1000000000;  // memory guard

  /// Linear sieve; throws LimitExceeded above kMaxLimit.
  static FactorSieve build(u64 limit);

  u64 limit() const { return limit_; }

  /// Smallest prime factor of n, 2 <= n <= limit.
  u64 spf(u64 n) const {
    check_range(n);
    return spf_[static_cast<size_t>(n)];
  }

  u64 smallest_prime_factor(u64 n) const {
    if (n == 1) return kNoPrime;
    return spf(n);
  }

  /// Largest prime factor by dividing out spf repeatedly; P(1) == 1.
  u64 largest_prime_factor(u64 n) const;

  bool is_prime(u64 n) const { return n >= 2 && spf(n) == n; }
  bool is_smooth(u64 n, u64 q) const;

  std::vector<PrimePower> factor(u64 n) const;

  /// Binary cache: magic "SPF1", little-endian 64-bit limit, then
  /// little-endian 32-bit spf entries for n = 0..limit (entries 0 and 1
  /// are zero placeholders).
  void save(const std::string& path) const;
  static FactorSieve load(const std::string& path);

 private:
  FactorSieve(u64 limit, std::vector<u32> spf)
      : limit_(limit), spf_(std::move(spf)) {}
  void check_range(u64 n) const {
    if (n < 2 || n > limit_)
      throw OutOfRange("n = " + std::to_string(n) + " outside sieve range [2, " +
                       std::to_string(limit_) + "]");
  }

  u64 limit_;
  std::vector<u32> spf_;
};

/// Calls fn(n) for every Q-smooth n in [1, N], ascending. Includes n = 1.
template <typename F>
void for_each_smooth(u64 N, u64 Q, const FactorSieve& sieve, F&& fn) {
  if (Q < 1) throw OutOfRange("Q must be >= 1");
  if (N > sieve.limit()) throw OutOfRange("N exceeds sieve limit");
  if (N >= 1) fn(u64(1));
  for (u64 n = 2; n <= N; ++n)
    if (sieve.is_smooth(n, Q)) fn(n);
}

std::vector<u64> enumerate_smooth(u64 N, u64 Q, const FactorSieve& sieve);

/// Exact Psi(N, Q) = #{n <= N : P(n) <= Q}.
u64 psi_count(u64 N, u64 Q, const FactorSieve& sieve);

/// Dickman rho tabulated on a uniform grid by midpoint quadrature of
/// u rho'(u) = -rho(u - 1); rho == 1 on [0, 1]. step must divide 1 exactly
/// (1/step integral). Values beyond u_max (where rho < 1e-33 for the default
/// table) are reported as 0.
class RhoTable {
 public:
  static RhoTable build(double u_max = 32.0, double step = 1e-4);

  /// Linear interpolation between grid points; throws NegativeArgument.
  double operator()(double u) const;

  double step() const { return step_; }
  double u_max() const { return step_ * static_cast<double>(values_.size() - 1); }
  const std::vector<double>& values() const { return values_; }

 private:
  RhoTable(double step, std::vector<double> values)
      : step_(step), values_(std::move(values)) {}
  double step_;
  std::vector<double> values_;
};

/// rho(u) from a shared default table (u_max = 32, step = 1e-4).
double dickman_rho(double u);

/// N * rho(log N / log Q); requires Q >= 2.
double psi_estimate(u64 N, u64 Q, const RhoTable& table);
double psi_estimate(u64 N, u64 Q);

/// The factorization n = r * s with L/Q <= r < L, P(r) <= p(s), r*p(s) >= L.
/// q == P(r); q == 1 happens only in the L == Q corner where r == 1.
struct VaughanPair {
  u64 r = 1;
  u64 s = 1;
  u64 q = 1;
  friend bool operator==(const VaughanPair&, const VaughanPair&) = default;
};

/// Greedy split of a Q-smooth n >= L: r is the largest product of an
/// ascending prefix of the prime factors (with multiplicity) staying < L.
/// The three region conditions are checked on the way out; their failure
/// raises ConditionViolation.
VaughanPair vaughan_factor(u64 n, u64 L, u64 Q, const FactorSieve& sieve);

/// Calls fn(n, pair) for every Q-smooth n in [L, N], ascending.
template <typename F>
void vaughan_pairs(u64 N, u64 Q, u64 L, const FactorSieve& sieve, F&& fn) {
  if (Q < 2 || L < Q) throw BadLimits("need Q >= 2 and L >= Q");
  if (N > sieve.limit()) throw OutOfRange("N exceeds sieve limit");
  for (u64 n = L; n <= N; ++n)
    if (sieve.is_smooth(n, Q)) fn(n, vaughan_factor(n, L, Q, sieve));
}

}  // namespace orbitsum

#endif  // ORBITSUM_SMOOTH_HPP
