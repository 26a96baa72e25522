#ifndef BMLAB_ERRORS_HPP
#define BMLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bmlab {

/// Base class for all library failures. Subclasses distinguish numerical /
/// precondition problems so callers (and the CLI exit-code mapping) can react
/// without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// chaos calculus
struct NonFiniteQuadrature final : Error { using Error::Error; };
struct RankNotFound final : Error { using Error::Error; };
struct ZeroRank final : Error { using Error::Error; };
struct NonzeroConstant final : Error { using Error::Error; };
struct NegativeTime final : Error { using Error::Error; };

// covariance / series
struct DivergentSeries final : Error { using Error::Error; };
struct CriticalRankOne final : Error { using Error::Error; };
struct ConditionH1Violated final : Error { using Error::Error; };

// simulation
struct NotEmbeddable final : Error { using Error::Error; };

// partial sums
struct NonCenteredExpansion final : Error { using Error::Error; };
struct GridOutOfRange final : Error { using Error::Error; };
struct PathTooShort final : Error { using Error::Error; };

// statistics
struct DegenerateSample final : Error { using Error::Error; };
struct InsufficientReplications final : Error { using Error::Error; };

// configuration / CLI
struct ConfigError final : Error { using Error::Error; };

}  // namespace bmlab

#endif  // BMLAB_ERRORS_HPP
