#ifndef ORBITSUM_COMMON_HPP
#define ORBITSUM_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbitsum {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// Base class of every error this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidModulus : Error { using Error::Error; };
struct ModulusMismatch : Error { using Error::Error; };
struct ZeroInverse : Error { using Error::Error; };
struct InvalidMap : Error { using Error::Error; };
struct LimitExceeded : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct NotSmooth : Error { using Error::Error; };
struct TooSmall : Error { using Error::Error; };
struct ConditionViolation : Error { using Error::Error; };
struct NegativeArgument : Error { using Error::Error; };
struct ZeroFrequency : Error { using Error::Error; };
struct BadIndices : Error { using Error::Error; };
struct AllZeroCoefficients : Error { using Error::Error; };
struct WeightOutOfRange : Error { using Error::Error; };
struct BadLimits : Error { using Error::Error; };
struct HypothesisViolated : Error { using Error::Error; };
struct Unsatisfiable : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct MissingParam : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace orbitsum

#endif  // ORBITSUM_COMMON_HPP
