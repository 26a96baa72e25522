#ifndef BMLAB_HERMITE_HPP
#define BMLAB_HERMITE_HPP

#include <functional>
#include <vector>

namespace bmlab {

/// H_q(x) for Hermite polynomials with leading coefficient 1:
/// H_0 = 1, H_1 = x, H_{q+1}(x) = x H_q(x) - q H_{q-1}(x).
/// They are orthogonal under N(0,1) with E[H_p H_q] = q! delta_{pq}.
double hermite_eval(int q, double x);

/// q! as a double. Exact up to 22!, correctly-rounded product up to 170!,
/// +inf beyond.
double factorial(int q);

/// q! * c^2 without overflowing the intermediate factorial (log-gamma route
/// above 170).
double factorial_times_sq(int q, double c);

/// A function of a standard Gaussian represented by its truncated Hermite
/// series  phi(x) = mean + sum_{q=1}^{Q} c_q H_q(x).
///
/// The mean part (level-0 coefficient) is stored separately from `coeffs`;
/// coeffs[0] is always 0 so that coeffs[q] lines up with H_q. `rank` is the
/// smallest q >= 1 whose coefficient is nonzero at the rank tolerance, or 0
/// if the expansion is constant.
struct HermiteExpansion {
  double mean = 0.0;
  std::vector<double> coeffs;  // c_0..c_Q, coeffs[0] == 0
  int rank = 0;
  double discarded_l2 = 0.0;  // estimated L2 mass beyond the truncation

  int truncation() const { return static_cast<int>(coeffs.size()) - 1; }

  /// mean + sum c_q H_q(x), single pass over the recurrence.
  double eval(double x) const;
};

/// Coefficients considered nonzero when above 1e-10 * max(1, sum |c_q|).
double rank_tolerance(const HermiteExpansion& e);

/// Canonical constructor: levels[q] = c_q including the level-0 entry, which
/// is moved into the mean part. Rank is recomputed.
HermiteExpansion make_expansion(std::vector<double> levels);

/// Smallest q >= 1 with |c_q| above tolerance, or 0.
int recompute_rank(const HermiteExpansion& e);

/// sum_{q>=1} q! c_q^2, the squared L2(gamma) norm of the centered part.
double chaos_l2_norm_sq(const HermiteExpansion& e);

/// Hermite coefficients c_q = E[f(N) H_q(N)] / q! for q = 0..trunc, by
/// Gauss-Hermite quadrature in the probabilists' normalization. The level-0
/// coefficient becomes the mean part; discarded_l2 estimates the L2 mass
/// beyond the truncation from quadrature of f^2.
///
/// Throws NonFiniteQuadrature if f is non-finite at a node, RankNotFound if
/// every coefficient c_1..c_trunc sits below the rank tolerance.
HermiteExpansion expand(const std::function<double(double)>& f, int trunc,
                        int quad_order = 128);

/// The rank-shifted function phi_d = sum_{q>=d} c_q H_{q-d}. Its level-0
/// coefficient (the original c_d) lands in the mean part. Throws ZeroRank
/// for constant input, NonCenteredExpansion if the mean part is nonzero.
HermiteExpansion shift_operator(const HermiteExpansion& e);

/// Coefficient shadow of a chaos decomposition carrying r lowering steps;
/// coeffs[k] multiplies the level-k component and tensor_power counts the
/// accumulated h-tensor factors.
struct ShiftedExpansion {
  std::vector<double> coeffs;  // level 0.. (level 0 = constant part)
  int tensor_power = 0;
};

/// Embed an expansion as a ShiftedExpansion with tensor_power 0.
ShiftedExpansion to_shifted(const HermiteExpansion& e);

/// One lowering step: level q moves to q-1 with the coefficient unchanged,
/// tensor_power increments. The level-0 coefficient must be zero (the
/// derivative annihilates constants); throws NonzeroConstant otherwise.
ShiftedExpansion shift_down(const ShiftedExpansion& s);

/// Ornstein-Uhlenbeck semigroup on coefficients: c_q -> e^{-qt} c_q, mean
/// part unchanged. Throws NegativeTime for t < 0.
HermiteExpansion ou_semigroup(const HermiteExpansion& e, double t);

/// Number-operator power on coefficients: c_q -> q^r c_q for q >= 1. For
/// r < 0 the mean part must vanish (throws NonzeroConstant).
HermiteExpansion neg_L_power(const HermiteExpansion& e, double r);

/// E || D^k (phi_d) ||^2 at coefficient level:
///   sum_{q>=d} c_q^2 [(q-d)(q-d-1)...(q-d-k+1)]^2 (q-d-k)!
/// with terms q-d-k < 0 contributing zero. d is the rank of e.
double derivative_norm_sq(const HermiteExpansion& e, int k);

}  // namespace bmlab

#endif  // BMLAB_HERMITE_HPP
