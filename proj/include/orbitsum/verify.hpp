#ifndef ORBITSUM_VERIFY_HPP
#define ORBITSUM_VERIFY_HPP

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "orbitsum/expsums.hpp"

namespace orbitsum {

/// Which closed-form bound to evaluate (implied constant 1). Each kind is
/// named after the sum it bounds.
enum class BoundKind { MultiTerm, Single, Bilinear, VarLimit, Hyperbolic, Smooth };

const char* to_string(BoundKind k);
BoundKind bound_kind_from_string(const std::string& s);  // ParseError

/// Parameters for envelope(); each kind reads the fields it needs and throws
/// MissingParam (naming the field) when one is absent. Logs are natural.
struct EnvelopeParams {
  std::optional<double> s, M, N, K, H, t, p, eps, B, Q;
};

/// Right-hand sides:
///   MultiTerm:  s M (1 + N/t) p^{1/2} log p
///   Single:     N p^{-eps/2}
///   Bilinear:   K M (M^{-1/2} + K^{-1/2} M^{1/2} p^{1/4} + M^{1/2} p^{1/4} t^{-1/2}) (log p)^{1/2}
///   VarLimit:   Bilinear * log K
///   Hyperbolic: K (H^{-1/2} + M K^{-1/2} p^{1/4} + M^{1/2} p^{1/4} t^{-1/2}) (log p)^{1/2} log K
///   Smooth:     N^{1-delta} Q with delta = eps/(8B)
double envelope(BoundKind kind, const EnvelopeParams& params);

/// One experiment instance: the sampled dynamical system plus the sum shape.
struct InstanceSpec {
  u64 seed = 0;
  u64 p = 0;
  std::array<u64, 4> map{};  // alpha, beta, gamma, delta
  u64 u0 = 0;
  u64 h = 0;
  u64 N = 0;
  u64 Q = 1;
  double eps = 0.5;
  double B = 2.0;
  u64 K = 0, M = 0, H = 0, s = 0;  // double/multi-term sum shapes
  // derived at sampling time
  u64 t = 0;
  SpectralClass cls = SpectralClass::Split;
};

struct InstanceConstraints {
  u64 p_min = 10000;
  u64 p_max = 100000;
  double t_min_coeff = 0.0;  // require t >= t_min_coeff * p^t_min_exp; 0 = off
  double t_min_exp = 0.0;
  unsigned max_rejections = 10000;
};

/// Rejection-samples (p, map, u0, h) with the map never parabolic, recomputing
/// the period until the t constraint holds. Deterministic in the seed; throws
/// Unsatisfiable after max_rejections failures.
InstanceSpec random_instance(u64 seed, const InstanceConstraints& constraints);

struct BoundReport {
  InstanceSpec inst;
  BoundKind kind = BoundKind::Single;
  double empirical = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
  double ms = 0.0;
};

/// Validates every instance against the kind's hypotheses (throwing
/// HypothesisViolated naming the failing inequality), computes the relevant
/// sum and envelope, and returns reports sorted by (ratio desc, seed asc).
/// The Smooth kind needs a sieve covering max N; pass workers > 1 to
/// evaluate instances concurrently.
std::vector<BoundReport> run_check(const std::vector<InstanceSpec>& instances,
                                   BoundKind kind,
                                   const FactorSieve* sieve = nullptr,
                                   const SumOptions& opt = {},
                                   unsigned workers = 1);

/// Box discrepancy of {v/p} against the uniform law: the largest deviation of
/// the binned empirical CDF from the uniform CDF at the bin edges.
double discrepancy(std::span<const u64> values, u64 p, u64 bins);

/// CSV columns: seed,p,t,class,h,N,Q,eps,B,kind,empirical,envelope,ratio,ms
void write_reports_csv(std::ostream& os, const std::vector<BoundReport>& reports);
/// One JSON object per line, mirroring the CSV columns.
void write_reports_jsonl(std::ostream& os, const std::vector<BoundReport>& reports);

std::string csv_escape(const std::string& field);

}  // namespace orbitsum

#endif  // ORBITSUM_VERIFY_HPP
