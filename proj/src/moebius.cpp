#include "orbitsum/moebius.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>

namespace orbitsum {

const char* to_string(SpectralClass c) {
  switch (c) {
    case SpectralClass::Split: return "split";
    case SpectralClass::Inert: return "inert";
    case SpectralClass::Parabolic: return "parabolic";
  }
  return "?";
}

MoebiusMap::MoebiusMap(PrimeModulus p, u64 alpha, u64 beta, u64 gamma, u64 delta)
    : p_(p),
      a_(p.reduce(alpha)),
      b_(p.reduce(beta)),
      c_(p.reduce(gamma)),
      d_(p.reduce(delta)) {
  det_ = p_.sub(p_.mul(a_, d_), p_.mul(b_, c_));
  if (det_ == 0) throw InvalidMap("matrix is singular (alpha*delta == beta*gamma)");
  if (c_ == 0) throw InvalidMap("gamma must be nonzero");
  u64 tr = p_.add(a_, d_);
  disc_ = p_.sub(p_.mul(tr, tr), p_.mul(4 % p_.value(), det_));
  int l = p_.legendre(disc_);
  class_ = l == 0 ? SpectralClass::Parabolic
                  : (l > 0 ? SpectralClass::Split : SpectralClass::Inert);
}

u64 MoebiusMap::apply(u64 x) const {
  x = p_.reduce(x);
  u64 den = p_.add(p_.mul(c_, x), d_);
  if (den == 0) return p_.mul(a_, p_.inv(c_));  // pole -> alpha/gamma
  u64 num = p_.add(p_.mul(a_, x), b_);
  return p_.mul(num, p_.inv(den));
}

ProjectivePoint MoebiusMap::apply(ProjectivePoint pt) const {
  if (pt.is_infinity()) return ProjectivePoint::finite(p_.mul(a_, p_.inv(c_)));
  u64 x = pt.value();
  u64 den = p_.add(p_.mul(c_, x), d_);
  if (den == 0) return ProjectivePoint::infinity();
  u64 num = p_.add(p_.mul(a_, x), b_);
  return ProjectivePoint::finite(p_.mul(num, p_.inv(den)));
}

namespace {

struct Mat2 {
  u64 a, b, c, d;
};

Mat2 mat_mul(const Mat2& x, const Mat2& y, const PrimeModulus& p) {
  return {p.add(p.mul(x.a, y.a), p.mul(x.b, y.c)),
          p.add(p.mul(x.a, y.b), p.mul(x.b, y.d)),
          p.add(p.mul(x.c, y.a), p.mul(x.d, y.c)),
          p.add(p.mul(x.c, y.b), p.mul(x.d, y.d))};
}

Mat2 mat_pow(Mat2 base, u64 e, const PrimeModulus& p) {
  Mat2 r{1, 0, 0, 1};
  while (e) {
    if (e & 1) r = mat_mul(r, base, p);
    base = mat_mul(base, base, p);
    e >>= 1;
  }
  return r;
}

bool mat_is_scalar(const Mat2& m) { return m.b == 0 && m.c == 0 && m.a == m.d; }

Mat2 map_matrix(const MoebiusMap& m) {
  return {m.alpha(), m.beta(), m.gamma(), m.delta()};
}

// Projective adjugate: A^{-1} up to the (irrelevant) determinant scalar.
Mat2 mat_adjugate(const Mat2& m, const PrimeModulus& p) {
  return {m.d, p.neg(m.b), p.neg(m.c), m.a};
}

ProjectivePoint mat_apply(const Mat2& m, ProjectivePoint pt, const PrimeModulus& p) {
  // Powers of the defining matrix can have zero lower-left entry, so every
  // case of the P^1 action is handled here.
  if (pt.is_infinity()) {
    if (m.c == 0) return ProjectivePoint::infinity();
    return ProjectivePoint::finite(p.mul(m.a, p.inv(m.c)));
  }
  u64 x = pt.value();
  u64 den = p.add(p.mul(m.c, x), m.d);
  if (den == 0) return ProjectivePoint::infinity();
  u64 num = p.add(p.mul(m.a, x), m.b);
  return ProjectivePoint::finite(p.mul(num, p.inv(den)));
}

// Least n >= 1 dividing `bound` with A^n scalar, given that A^bound is
// scalar. Standard descent through the prime factors of the bound.
u64 order_descent(const Mat2& A, u64 bound, const PrimeModulus& p) {
  u64 n = bound;
  for (const auto& pp : factorize(bound)) {
    for (unsigned e = 0; e < pp.exponent; ++e) {
      if (n % pp.prime != 0) break;
      u64 cand = n / pp.prime;
      if (mat_is_scalar(mat_pow(A, cand, p))) n = cand;
      else break;
    }
  }
  return n;
}

// Least n >= 1 dividing `bound` with A^n fixing pt, given A^bound does.
u64 point_period_descent(const Mat2& A, ProjectivePoint pt, u64 bound,
                         const PrimeModulus& p) {
  u64 n = bound;
  for (const auto& pp : factorize(bound)) {
    for (unsigned e = 0; e < pp.exponent; ++e) {
      if (n % pp.prime != 0) break;
      u64 cand = n / pp.prime;
      if (mat_apply(mat_pow(A, cand, p), pt, p) == pt) n = cand;
      else break;
    }
  }
  return n;
}

u64 encode_point(ProjectivePoint pt, u64 p) {
  return pt.is_infinity() ? p : pt.value();
}

Mat2 mat_pow_wide(Mat2 base, u128 e, const PrimeModulus& p) {
  Mat2 r{1, 0, 0, 1};
  while (e) {
    if (e & 1) r = mat_mul(r, base, p);
    base = mat_mul(base, base, p);
    e >>= 1;
  }
  return r;
}

// Order descent over the full group order p(p-1)(p+1), prime by prime.
// Only reached if the class-specific bound ever fails to verify.
u64 full_group_order_descent(const Mat2& A, const PrimeModulus& p) {
  u64 q = p.value();
  std::map<u64, unsigned> merged;  // 2 divides both q-1 and q+1
  for (const auto& pp : factorize(q - 1)) merged[pp.prime] += pp.exponent;
  for (const auto& pp : factorize(q + 1)) merged[pp.prime] += pp.exponent;
  merged[q] += 1;
  u64 result = 1;
  for (const auto& [prime, expo] : merged) {
    u128 rest = 1;
    for (const auto& [prime2, expo2] : merged) {
      if (prime2 == prime) continue;
      for (unsigned e = 0; e < expo2; ++e) rest *= prime2;
    }
    Mat2 B = mat_pow_wide(A, rest, p);
    u64 part = 1;
    while (!mat_is_scalar(B)) {
      B = mat_pow(B, prime, p);
      part *= prime;
      if (part > q * 4) throw Error("order descent failed to terminate");
    }
    result *= part;
  }
  return result;
}

// Baby-step giant-step: least k in [0, period) with A^k(infinity) == target,
// or period if no such k exists (different cycles of equal length).
u64 bsgs_locate(const Mat2& A, ProjectivePoint target, u64 period,
                const PrimeModulus& p) {
  if (period > (u64(1) << 42))
    throw LimitExceeded("cycle search needs sqrt(period) memory; period too large");
  u64 m = static_cast<u64>(std::sqrt(static_cast<long double>(period)));
  while (m * m < period) ++m;
  std::unordered_map<u64, u64> baby;
  baby.reserve(static_cast<size_t>(m));
  ProjectivePoint y = ProjectivePoint::infinity();
  for (u64 j = 0; j < m; ++j) {
    baby.emplace(encode_point(y, p.value()), j);
    y = mat_apply(A, y, p);
  }
  Mat2 giant = mat_adjugate(mat_pow(A, m, p), p);  // projective A^{-m}
  ProjectivePoint z = target;
  for (u64 i = 0; i * m <= period; ++i) {
    auto it = baby.find(encode_point(z, p.value()));
    if (it != baby.end()) {
      u64 k = i * m + it->second;
      if (k < period) return k;
    }
    z = mat_apply(giant, z, p);
  }
  return period;
}

}  // namespace

ProjectivePoint apply_power(const MoebiusMap& m, ProjectivePoint pt, u64 n) {
  return mat_apply(mat_pow(map_matrix(m), n, m.modulus()), pt, m.modulus());
}

u64 map_order(const MoebiusMap& m) {
  const PrimeModulus p = m.modulus();
  Mat2 A = map_matrix(m);
  u64 bound = p.value();
  switch (m.spectral_class()) {
    case SpectralClass::Split: bound = p.value() - 1; break;
    case SpectralClass::Inert: bound = p.value() + 1; break;
    case SpectralClass::Parabolic: bound = p.value(); break;
  }
  if (!mat_is_scalar(mat_pow(A, bound, p)))
    return full_group_order_descent(A, p);
  return order_descent(A, bound, p);
}

struct Orbit::CacheEntry {
  std::once_flag once;
  CycleInfo info;
};

namespace {

using CycleKey = std::tuple<u64, u64, u64, u64, u64, u64>;  // p, a, b, c, d, u0

std::mutex g_cycle_mutex;
std::map<CycleKey, std::shared_ptr<Orbit::CacheEntry>>& cycle_registry() {
  static std::map<CycleKey, std::shared_ptr<Orbit::CacheEntry>> reg;
  return reg;
}

CycleInfo compute_cycle(const MoebiusMap& map, u64 u0) {
  const PrimeModulus p = map.modulus();
  Mat2 A = map_matrix(map);
  u64 ord = map_order(map);
  ProjectivePoint start = ProjectivePoint::finite(u0);
  CycleInfo info;
  info.t_true = point_period_descent(A, start, ord, p);
  u64 t_inf = point_period_descent(A, ProjectivePoint::infinity(), ord, p);
  info.pole_in_orbit = false;
  if (t_inf == info.t_true) {
    u64 k = bsgs_locate(A, start, info.t_true, p);
    if (k < info.t_true) {
      info.pole_in_orbit = true;
      info.inf_index = (info.t_true - k) % info.t_true;
    }
  }
  info.t = info.pole_in_orbit ? info.t_true - 1 : info.t_true;
  return info;
}

}  // namespace

Orbit::Orbit(MoebiusMap map, u64 u0) : map_(map), u0_(map.modulus().reduce(u0)) {
  CycleKey key{map_.modulus().value(), map_.alpha(), map_.beta(),
               map_.gamma(), map_.delta(), u0_};
  std::lock_guard<std::mutex> lock(g_cycle_mutex);
  auto& slot = cycle_registry()[key];
  if (!slot) slot = std::make_shared<CacheEntry>();
  entry_ = slot;
}

const CycleInfo& Orbit::cycle() const {
  std::call_once(entry_->once,
                 [this] { entry_->info = compute_cycle(map_, u0_); });
  return entry_->info;
}

u64 Orbit::element(u64 n) const {
  const CycleInfo& ci = cycle();
  u64 m = n % ci.t;
  if (ci.pole_in_orbit && m >= ci.inf_index) ++m;  // skip the infinity slot
  ProjectivePoint pt = apply_power(map_, ProjectivePoint::finite(u0_), m);
  return pt.value();  // never infinity by construction of the index map
}

std::vector<u64> Orbit::slice(u64 start, u64 count) const {
  std::vector<u64> out;
  out.reserve(static_cast<size_t>(count));
  stream(start, count, [&](u64 v) { out.push_back(v); });
  return out;
}

}  // namespace orbitsum
