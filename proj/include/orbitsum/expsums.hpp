#ifndef ORBITSUM_EXPSUMS_HPP
#define ORBITSUM_EXPSUMS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orbitsum/moebius.hpp"
#include "orbitsum/smooth.hpp"

namespace orbitsum {

/// Neumaier-compensated scalar accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated accumulator for sums of unit-modulus complex terms.
class UnitSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
    ++count_;
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }
  u64 term_count() const { return count_; }

 private:
  CompensatedSum re_, im_;
  u64 count_ = 0;
};

/// Evaluator of e_p(z) = exp(2 pi i z / p). The angle is formed in extended
/// precision from the precomputed 2 pi / p, so the per-term error stays well
/// under 2^-50.
class UnitRoot {
 public:
  explicit UnitRoot(PrimeModulus p)
      : p_(p.value()),
        step_(6.283185307179586476925286766559L / static_cast<long double>(p.value())) {}

  std::complex<double> operator()(u64 z) const {
    long double a = step_ * static_cast<long double>(z % p_);
    return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
  }

 private:
  u64 p_;
  long double step_;
};

/// Complex weight sequence with the sup-norm bound |w_k| <= 1.
class WeightSeq {
 public:
  explicit WeightSeq(std::vector<std::complex<double>> w);
  static WeightSeq ones(size_t n);

  size_t size() const { return w_.size(); }
  bool empty() const { return w_.empty(); }
  /// Weight of 1-based index i+1 (storage is 0-based).
  std::complex<double> operator[](size_t i) const { return w_[i]; }

 private:
  std::vector<std::complex<double>> w_;
};

/// Evaluation controls. Terms are partitioned into fixed chunks by index and
/// chunk subtotals are combined in ascending order, so the value is identical
/// for every thread count.
struct SumOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
  u64 chunk_size = 65536;
  bool exploit_period = true;
};

/// A computed sum plus the parameters that produced it.
struct SumRecord {
  std::complex<double> value{0.0, 0.0};
  u64 term_count = 0;
  std::string kind;
  u64 p = 0, h = 0;
  u64 N = 0, Q = 0, L = 0;
  u64 t = 0;
  std::array<u64, 4> map{};
  u64 u0 = 0;

  double modulus() const { return std::abs(value); }
};

/// S_h(N) = sum_{n=1}^{N} e_p(h u_n). For N > t the full-period subtotal is
/// reused floor(N/t) times plus a remainder (disable via
/// SumOptions::exploit_period).
SumRecord single_sum(const Orbit& orbit, u64 h, u64 N, const SumOptions& opt = {});

/// sum_{n=1}^{N} e_p(a_1 u_{m_1 n} + ... + a_s u_{m_s n}) with strictly
/// increasing indices m_1 < ... < m_s, coefficients not all zero mod p.
SumRecord multi_term_sum(const Orbit& orbit, std::span<const u64> coeffs,
                         std::span<const u64> indices, u64 N,
                         const SumOptions& opt = {});

/// T_h(N) = sum over primes l <= N of e_p(h u_l).
SumRecord prime_time_sum(const Orbit& orbit, u64 h, u64 N,
                         const FactorSieve& sieve, const SumOptions& opt = {});

/// T_h(N, Q) = sum over Q-smooth n <= N of e_p(h u_n) (n = 1 included).
SumRecord smooth_sum(const Orbit& orbit, u64 h, u64 N, u64 Q,
                     const FactorSieve& sieve, const SumOptions& opt = {});

struct DecomposedSmoothSum {
  SumRecord total;  // head + all per-q subtotals; equals smooth_sum to roundoff
  SumRecord head;   // smooth n in [1, min(L-1, N)]
  std::vector<std::pair<u64, SumRecord>> per_q;  // ascending q = P(r)
};

/// The same smooth sum evaluated through the r*s split: head of smooth
/// n < L plus tail terms e_p(h u_{r s}) grouped by q = P(r).
DecomposedSmoothSum smooth_sum_decomposed(const Orbit& orbit, u64 h, u64 N,
                                          u64 Q, u64 L, const FactorSieve& sieve,
                                          const SumOptions& opt = {});

/// sum_{k <= K} sum_{m <= M} alpha_k beta_m e_p(h u_{k m}),
/// K = alpha.size(), M = beta.size().
SumRecord bilinear_sum(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                       const WeightSeq& beta, const SumOptions& opt = {});

/// sum_m sum_{L_m < k <= K_m} alpha_k beta_m e_p(h u_{k m}) with
/// limits[m-1] = (L_m, K_m), 0 <= L_m < K_m < K = alpha.size().
SumRecord varlimit_bilinear_sum(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                                const WeightSeq& beta,
                                std::span<const std::pair<u64, u64>> limits,
                                const SumOptions& opt = {});

/// sum_{m=H}^{M} sum_{L_m < k <= K/m} alpha_k beta_m e_p(h u_{k m});
/// beta holds weights for m = H..M, lower[m-H] = L_m, and alpha must cover
/// k <= floor(K/H). Empty inner ranges are allowed.
SumRecord hyperbolic_sum(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                         const WeightSeq& beta, u64 H, u64 K,
                         std::span<const u64> lower, const SumOptions& opt = {});

/// Same value as hyperbolic_sum, traversed in blocks e^j < m <= e^{j+1}.
SumRecord hyperbolic_sum_blocked(const Orbit& orbit, u64 h, const WeightSeq& alpha,
                                 const WeightSeq& beta, u64 H, u64 K,
                                 std::span<const u64> lower,
                                 const SumOptions& opt = {});

}  // namespace orbitsum

#endif  // ORBITSUM_EXPSUMS_HPP
