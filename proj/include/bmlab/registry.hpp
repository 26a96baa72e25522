#ifndef BMLAB_REGISTRY_HPP
#define BMLAB_REGISTRY_HPP

#include <functional>
#include <string>

#include "bmlab/hermite.hpp"

namespace bmlab {

/// Built-in test functions addressable from the CLI and configs:
///   "hermite:q"       H_q
///   "poly:[a0,a1,..]" a0 + a1 x + a2 x^2 + ...
///   "cube"            x^3
///   "sign"            sign(x)
///   "abs-centered"    |x| - sqrt(2/pi)
///   "indicator:a"     1{x > a} - P(N > a)
std::function<double(double)> registry_function(const std::string& spec);

/// Expansion of a registry entry. Polynomial entries (hermite:, poly:, cube)
/// are converted to Hermite coefficients exactly via the monomial identity
/// x^n = sum_j n! / (2^j j! (n-2j)!) H_{n-2j}; the rest go through
/// Gauss-Hermite quadrature.
HermiteExpansion registry_expand(const std::string& spec, int trunc = 40,
                                 int quad_order = 128);

/// Exact Hermite levels of a monomial-coefficient polynomial.
std::vector<double> poly_to_hermite_levels(const std::vector<double>& mono);

}  // namespace bmlab

#endif  // BMLAB_REGISTRY_HPP
