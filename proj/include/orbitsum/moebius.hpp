#ifndef ORBITSUM_MOEBIUS_HPP
#define ORBITSUM_MOEBIUS_HPP

#include <array>
#include <memory>
#include <vector>

#include "orbitsum/modarith.hpp"

namespace orbitsum {

/// Discriminant classification of the defining matrix: nonzero square,
/// nonsquare, or zero.
enum class SpectralClass { Split, Inert, Parabolic };

const char* to_string(SpectralClass c);

/// A point of the projective line over F_p: a finite residue or infinity.
class ProjectivePoint {
 public:
  static ProjectivePoint infinity() { return ProjectivePoint(0, true); }
  static ProjectivePoint finite(u64 x) { return ProjectivePoint(x, false); }

  bool is_infinity() const { return inf_; }
  /// Finite coordinate; only valid when !is_infinity().
  u64 value() const {
    if (inf_) throw OutOfRange("value() on the point at infinity");
    return x_;
  }
  friend bool operator==(const ProjectivePoint&, const ProjectivePoint&) = default;

 private:
  ProjectivePoint(u64 x, bool inf) : x_(x), inf_(inf) {}
  u64 x_;
  bool inf_;
};

/// The fractional-linear map x -> (alpha x + beta) / (gamma x + delta) on F_p,
/// with nonzero determinant and gamma != 0, made total on F_p by the
/// convention that the pole -delta/gamma maps to alpha/gamma (the projective
/// dynamics with the step through infinity contracted).
class MoebiusMap {
 public:
  MoebiusMap(PrimeModulus p, u64 alpha, u64 beta, u64 gamma, u64 delta);

  PrimeModulus modulus() const { return p_; }
  u64 alpha() const { return a_; }
  u64 beta() const { return b_; }
  u64 gamma() const { return c_; }
  u64 delta() const { return d_; }
  std::array<u64, 4> coeffs() const { return {a_, b_, c_, d_}; }

  u64 determinant() const { return det_; }
  u64 trace() const { return p_.add(a_, d_); }
  /// (alpha + delta)^2 - 4 det, reduced mod p.
  u64 discriminant() const { return disc_; }
  SpectralClass spectral_class() const { return class_; }

  /// The unique finite point with gamma x + delta == 0.
  u64 pole() const { return p_.mul(p_.neg(d_), p_.inv(c_)); }

  /// Convention-total evaluation on F_p; a bijection of [0, p).
  u64 apply(u64 x) const;

  /// True action on the projective line (no convention).
  ProjectivePoint apply(ProjectivePoint pt) const;

  friend bool operator==(const MoebiusMap&, const MoebiusMap&) = default;

 private:
  PrimeModulus p_;
  u64 a_, b_, c_, d_;
  u64 det_, disc_;
  SpectralClass class_;
};

/// Projective action of the n-th matrix power in O(log n) multiplications.
ProjectivePoint apply_power(const MoebiusMap& m, ProjectivePoint pt, u64 n);

/// Order of the defining matrix in PGL_2(F_p): least n >= 1 with A^n scalar.
/// Computed by divisor descent from p-1 / p+1 / p according to the spectral
/// class, with a p(p-1)(p+1) fallback if the class bound ever fails to verify.
u64 map_order(const MoebiusMap& m);

/// Cycle structure of one orbit.
///
/// t_true is the period of the start point on the projective line; t is the
/// period of the convention sequence, which equals t_true minus one exactly
/// when the projective cycle passes through infinity. inf_index (valid iff
/// pole_in_orbit) is the position of infinity in the projective cycle,
/// counted from the start point.
struct CycleInfo {
  u64 t = 0;
  u64 t_true = 0;
  bool pole_in_orbit = false;
  u64 inf_index = 0;
};

/// An orbit u_0, u_1 = psi(u_0), ... of the convention dynamics, with lazily
/// computed, globally cached cycle structure (keyed by (p, coeffs, u0) value,
/// so equal orbits share one cache entry across threads).
class Orbit {
 public:
  struct CacheEntry;  // opaque shared cycle-cache slot

  Orbit(MoebiusMap map, u64 u0);

  const MoebiusMap& map() const { return map_; }
  u64 initial() const { return u0_; }

  /// Cycle structure; first call fills the shared cache entry (race-free).
  /// Locating where the cycle passes through infinity is a baby-step
  /// giant-step search needing sqrt(period) memory, so periods above 2^42
  /// raise LimitExceeded when that search is required.
  const CycleInfo& cycle() const;

  /// u_n in O(log n) multiplications after the cycle is known.
  u64 element(u64 n) const;

  /// Calls fn(u_n) for n = start, ..., start+count-1: one seek, then one
  /// map application per step.
  template <typename F>
  void stream(u64 start, u64 count, F&& fn) const {
    if (count == 0) return;
    u64 x = element(start);
    for (u64 i = 0;;) {
      fn(x);
      if (++i == count) break;
      x = map_.apply(x);
    }
  }

  std::vector<u64> slice(u64 start, u64 count) const;

 private:
  MoebiusMap map_;
  u64 u0_;
  std::shared_ptr<CacheEntry> entry_;
};

}  // namespace orbitsum

#endif  // ORBITSUM_MOEBIUS_HPP
