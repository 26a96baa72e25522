#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bmlab/errors.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/json_io.hpp"
#include "bmlab/quadrature.hpp"
#include "bmlab/registry.hpp"
#include "bmlab/rng.hpp"

using namespace bmlab;

namespace {

// random centered expansion with a forced rank
HermiteExpansion random_expansion(SplitMix64& rng, int max_trunc = 12) {
  const int trunc = 2 + static_cast<int>(rng.next() % (max_trunc - 1));
  std::vector<double> levels(static_cast<std::size_t>(trunc) + 1, 0.0);
  const int d = 1 + static_cast<int>(rng.next() % trunc);
  for (int q = d; q <= trunc; ++q)
    levels[static_cast<std::size_t>(q)] =
        (rng.next_double() < 0.3) ? 0.0 : 2.0 * (rng.next_double() - 0.5);
  levels[static_cast<std::size_t>(d)] = 1.0 + rng.next_double();
  return make_expansion(levels);
}

}  // namespace

TEST_CASE("hermite_eval matches the fixed examples") {
  CHECK(hermite_eval(0, 7.3) == 1.0);
  CHECK(hermite_eval(1, 0.0) == 0.0);
  CHECK(hermite_eval(3, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(hermite_eval(2, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("hermite_eval matches explicit polynomials up to q=5") {
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const double x = 8.0 * (rng.next_double() - 0.5);
    const double explicit_h[6] = {
        1.0,
        x,
        x * x - 1.0,
        x * x * x - 3.0 * x,
        x * x * x * x - 6.0 * x * x + 3.0,
        x * x * x * x * x - 10.0 * x * x * x + 15.0 * x};
    for (int q = 0; q <= 5; ++q) {
      const double scale = std::max(1.0, std::abs(explicit_h[q]));
      CHECK(std::abs(hermite_eval(q, x) - explicit_h[q]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("gauss-hermite rule: moments of the standard Gaussian") {
  const auto& rule = gauss_hermite(64);
  double w_sum = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    w_sum += w;
    m1 += w * x;
    m2 += w * x * x;
    m3 += w * x * x * x;
    m4 += w * x * x * x * x;
  }
  CHECK(w_sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(m1) <= 1e-15);  // symmetric nodes, roundoff only
  CHECK(std::abs(m3) <= 1e-14);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("orthogonality: quadrature of H_p H_q equals q! delta_pq") {
  const auto& rule = gauss_hermite(64);
  for (int p = 0; p <= 10; ++p) {
    for (int q = 0; q <= 10; ++q) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * hermite_eval(p, rule.nodes[i]) *
               hermite_eval(q, rule.nodes[i]);
      const double want = p == q ? factorial(q) : 0.0;
      const double scale = std::max(1.0, std::sqrt(factorial(p) * factorial(q)));
      CHECK(std::abs(acc - want) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("expand: polynomial inputs are recovered exactly") {
  SUBCASE("f = H_2 identically") {
    const auto e = expand([](double x) { return x * x - 1.0; }, 6);
    CHECK(e.rank == 2);
    CHECK(e.mean == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e.coeffs[2] == doctest::Approx(1.0).epsilon(1e-13));
    for (int q : {1, 3, 4, 5, 6})
      CHECK(std::abs(e.coeffs[static_cast<std::size_t>(q)]) <= 1e-12);
    CHECK(e.discarded_l2 <= 1e-10);
  }
  SUBCASE("f = x^3 = H_3 + 3 H_1") {
    const auto e = expand([](double x) { return x * x * x; }, 6);
    CHECK(e.rank == 1);
    CHECK(e.coeffs[1] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(e.coeffs[3] == doctest::Approx(1.0).epsilon(1e-13));
    for (int q : {2, 4, 5, 6})
      CHECK(std::abs(e.coeffs[static_cast<std::size_t>(q)]) <= 1e-12);
  }
}

TEST_CASE("expand: sign function against closed-form Gaussian moments") {
  // E[sign(N) H_q(N)] = 2 H_{q-1}(0) gamma(0) for odd q, zero for even q
  const double c1_exact = 0.7978845608028654;    // sqrt(2/pi)
  const double c3_exact = -0.13298076013381089;  // -sqrt(2/pi)/6
  const double c5_exact = 0.019947114020071635;  // gamma(0)/20

  const auto e = expand(registry_function("sign"), 5, 128);
  CHECK(e.rank == 1);
  // the integrand is discontinuous, so quadrature converges slowly; the
  // tolerances reflect the measured order-128 error, not roundoff
  CHECK(std::abs(e.coeffs[1] - c1_exact) <= 5e-3);
  CHECK(std::abs(e.coeffs[3] - c3_exact) <= 5e-3);
  CHECK(std::abs(e.coeffs[5] - c5_exact) <= 5e-3);
  CHECK(std::abs(e.coeffs[2]) <= 1e-14);  // exact zero by node symmetry
  CHECK(std::abs(e.coeffs[4]) <= 1e-14);
  CHECK(std::abs(e.mean) <= 1e-14);
  CHECK(e.discarded_l2 > 0.0);  // sign has an infinite expansion

  // refinement: higher order gets closer to the exact coefficient
  const auto coarse = expand(registry_function("sign"), 5, 64);
  const auto fine = expand(registry_function("sign"), 5, 256);
  CHECK(std::abs(fine.coeffs[1] - c1_exact) <
        std::abs(coarse.coeffs[1] - c1_exact));
}

TEST_CASE("expand: error conditions") {
  CHECK_THROWS_AS(expand([](double) { return 0.0; }, 6), RankNotFound);
  CHECK_THROWS_AS(expand([](double) { return 5.0; }, 6), RankNotFound);
  CHECK_THROWS_AS(expand([](double x) { return std::log(x); }, 6),
                  NonFiniteQuadrature);
  CHECK_THROWS_AS(expand([](double x) { return x; }, 0), ConfigError);
  CHECK_THROWS_AS(expand([](double x) { return x; }, 6, 4), ConfigError);
}

TEST_CASE("expand is linear in the function") {
  const auto f = registry_function("cube");
  const auto g = registry_function("sign");
  const double alpha = 1.75, beta = -0.4;
  const auto ef = expand(f, 8);
  const auto eg = expand(g, 8);
  const auto combo =
      expand([&](double x) { return alpha * f(x) + beta * g(x); }, 8);
  for (int q = 1; q <= 8; ++q) {
    const double want = alpha * ef.coeffs[static_cast<std::size_t>(q)] +
                        beta * eg.coeffs[static_cast<std::size_t>(q)];
    CHECK(combo.coeffs[static_cast<std::size_t>(q)] ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("shift_operator: fixed examples") {
  SUBCASE("H_2 collapses to the constant 1") {
    const auto e = make_expansion({0, 0, 1});
    const auto s = shift_operator(e);
    CHECK(s.mean == 1.0);
    CHECK(s.rank == 0);
    for (double c : s.coeffs) CHECK(c == 0.0);
  }
  SUBCASE("H_3 + 3H_1 shifts to H_2 + 3") {
    const auto e = make_expansion({0, 3, 0, 1});
    const auto s = shift_operator(e);
    CHECK(e.rank == 1);
    CHECK(s.mean == 3.0);
    CHECK(s.coeffs[2] == 1.0);
    CHECK(s.coeffs[1] == 0.0);
    CHECK(s.rank == 2);
  }
  SUBCASE("H_4 + 2H_3 shifts by rank 3 to H_1 + 2") {
    const auto e = make_expansion({0, 0, 0, 2, 1});
    CHECK(e.rank == 3);
    const auto s = shift_operator(e);
    CHECK(s.mean == 2.0);
    CHECK(s.coeffs[1] == 1.0);
    CHECK(s.rank == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(shift_operator(make_expansion({1.0})), ZeroRank);
    CHECK_THROWS_AS(shift_operator(make_expansion({2.0, 0.0, 1.0})),
                    NonCenteredExpansion);
  }
}

TEST_CASE("shift_down: fixed examples") {
  SUBCASE("H_d lowered d times is the constant 1 with tensor power d") {
    for (int d = 1; d <= 5; ++d) {
      std::vector<double> levels(static_cast<std::size_t>(d) + 1, 0.0);
      levels[static_cast<std::size_t>(d)] = 1.0;
      ShiftedExpansion s = to_shifted(make_expansion(levels));
      for (int i = 0; i < d; ++i) s = shift_down(s);
      CHECK(s.tensor_power == d);
      CHECK(s.coeffs[0] == 1.0);
      for (std::size_t l = 1; l < s.coeffs.size(); ++l) CHECK(s.coeffs[l] == 0.0);
    }
  }
  SUBCASE("one step on H_3 + 3H_1 matches the shift operator") {
    const auto e = make_expansion({0, 3, 0, 1});
    ShiftedExpansion s = shift_down(to_shifted(e));
    CHECK(s.tensor_power == 1);
    CHECK(s.coeffs[0] == 3.0);
    CHECK(s.coeffs[2] == 1.0);
    const auto via_op = shift_operator(e);
    CHECK(s.coeffs[0] == via_op.mean);
    CHECK(s.coeffs[2] == via_op.coeffs[2]);
  }
  SUBCASE("nonzero constant level is rejected") {
    ShiftedExpansion s;
    s.coeffs = {0.5, 1.0};
    CHECK_THROWS_AS(shift_down(s), NonzeroConstant);
  }
}

TEST_CASE("lowering rank-many times equals the shift operator exactly") {
  SplitMix64 rng(42);
  for (int it = 0; it < 200; ++it) {
    const auto e = random_expansion(rng);
    const auto want = shift_operator(e);
    ShiftedExpansion s = to_shifted(e);
    for (int i = 0; i < e.rank; ++i) s = shift_down(s);
    CHECK(s.tensor_power == e.rank);
    for (std::size_t lvl = 0; lvl < s.coeffs.size(); ++lvl) {
      const double w = lvl == 0 ? want.mean
                                : (lvl < want.coeffs.size() ? want.coeffs[lvl] : 0.0);
      CHECK(s.coeffs[lvl] == w);  // moved, never recomputed: bitwise equal
    }
  }
}

TEST_CASE("ou_semigroup") {
  const auto e = make_expansion({0, 0.5, 0, 1.5});
  SUBCASE("t = 0 is the identity") {
    const auto p = ou_semigroup(e, 0.0);
    for (std::size_t q = 0; q < e.coeffs.size(); ++q)
      CHECK(p.coeffs[q] == e.coeffs[q]);
  }
  SUBCASE("H_2 at t = ln 2 scales by 1/4") {
    const auto p = ou_semigroup(make_expansion({0, 0, 1}), std::log(2.0));
    CHECK(p.coeffs[2] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("large t kills every nonconstant level") {
    const auto p = ou_semigroup(make_expansion({0, 1, 0, 1}), 200.0);
    for (std::size_t q = 1; q < p.coeffs.size(); ++q)
      CHECK(std::abs(p.coeffs[q]) < 1e-80);
    CHECK(p.rank == 0);
  }
  SUBCASE("composition equals the combined time") {
    SplitMix64 rng(7);
    for (int it = 0; it < 100; ++it) {
      const auto x = random_expansion(rng);
      const double s = rng.next_double(), t = rng.next_double();
      const auto lhs = ou_semigroup(ou_semigroup(x, s), t);
      const auto rhs = ou_semigroup(x, s + t);
      for (std::size_t q = 1; q < x.coeffs.size(); ++q)
        CHECK(std::abs(lhs.coeffs[q] - rhs.coeffs[q]) <=
              1e-15 * std::max(1.0, std::abs(rhs.coeffs[q])));
    }
  }
  SUBCASE("negative time is rejected") {
    CHECK_THROWS_AS(ou_semigroup(e, -0.1), NegativeTime);
  }
}

TEST_CASE("neg_L_power") {
  SUBCASE("r = 0 is the identity") {
    const auto e = make_expansion({0, 2, 3});
    const auto p = neg_L_power(e, 0.0);
    CHECK(p.coeffs[1] == 2.0);
    CHECK(p.coeffs[2] == 3.0);
  }
  SUBCASE("H_4 with r = -1 scales by 1/4") {
    const auto p = neg_L_power(make_expansion({0, 0, 0, 0, 1}), -1.0);
    CHECK(p.coeffs[4] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("inverse pair restores a centered expansion") {
    SplitMix64 rng(3);
    for (int it = 0; it < 50; ++it) {
      const auto e = random_expansion(rng);
      const auto back = neg_L_power(neg_L_power(e, -1.0), 1.0);
      for (std::size_t q = 1; q < e.coeffs.size(); ++q)
        CHECK(std::abs(back.coeffs[q] - e.coeffs[q]) <=
              1e-15 * std::max(1.0, std::abs(e.coeffs[q])));
    }
  }
  SUBCASE("negative power rejects a mean part") {
    CHECK_THROWS_AS(neg_L_power(make_expansion({1.0, 1.0}), -1.0),
                    NonzeroConstant);
  }
}

TEST_CASE("derivative_norm_sq") {
  SUBCASE("phi = H_d gives a constant shift, derivative vanishes") {
    for (int d = 1; d <= 4; ++d) {
      std::vector<double> levels(static_cast<std::size_t>(d) + 1, 0.0);
      levels[static_cast<std::size_t>(d)] = 1.0;
      CHECK(derivative_norm_sq(make_expansion(levels), 1) == 0.0);
    }
  }
  SUBCASE("rank-1 expansion with an H_3 part: hand value") {
    // tolerance check first: a negligible c_1 does not lower the rank
    CHECK(make_expansion({0, 1e-25, 0, 1}).rank == 3);
    // with c_1 above tolerance the rank is 1; at k=1 only q=3 contributes:
    // c_3^2 (q-d)^2 (q-d-1)! = 1*4*1 = 4 (the q=1 term is annihilated)
    const auto e = make_expansion({0, 1e-3, 0, 1});
    CHECK(e.rank == 1);
    CHECK(derivative_norm_sq(e, 1) == doctest::Approx(4.0).epsilon(1e-15));
  }
  SUBCASE("k = 0 is the L2 norm of the shifted function") {
    // phi = 3H_1 + H_3, d = 1: sum c_q^2 (q-1)! = 9*1 + 1*2 = 11
    const auto e = make_expansion({0, 3, 0, 1});
    CHECK(derivative_norm_sq(e, 0) == doctest::Approx(11.0).epsilon(1e-15));
  }
  SUBCASE("series stays below the sum q! c_q^2 bound for k <= d") {
    SplitMix64 rng(11);
    for (int it = 0; it < 200; ++it) {
      const auto e = random_expansion(rng);
      const double bound = chaos_l2_norm_sq(e);
      for (int k = 0; k <= e.rank; ++k)
        CHECK(derivative_norm_sq(e, k) <= bound * (1.0 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("registry: exact polynomial conversions") {
  SUBCASE("monomial identities") {
    CHECK(poly_to_hermite_levels({0, 0, 1}) == std::vector<double>{1, 0, 1});
    CHECK(poly_to_hermite_levels({0, 0, 0, 1}) == std::vector<double>{0, 3, 0, 1});
    CHECK(poly_to_hermite_levels({0, 0, 0, 0, 1}) ==
          std::vector<double>{3, 0, 6, 0, 1});
  }
  SUBCASE("hermite:q is a unit coefficient") {
    const auto e = registry_expand("hermite:3", 10);
    CHECK(e.rank == 3);
    CHECK(e.coeffs[3] == 1.0);
    CHECK(e.mean == 0.0);
    CHECK(e.truncation() == 10);
  }
  SUBCASE("cube matches the symbolic expansion exactly") {
    const auto e = registry_expand("cube", 6);
    CHECK(e.coeffs[1] == 3.0);
    CHECK(e.coeffs[3] == 1.0);
    CHECK(e.rank == 1);
    CHECK(e.discarded_l2 == 0.0);
  }
  SUBCASE("poly keeps its mean part without auto-centering") {
    const auto e = registry_expand("poly:[1,0,1]", 6);  // 1 + x^2 = H_2 + 2
    CHECK(e.mean == 2.0);
    CHECK(e.coeffs[2] == 1.0);
  }
  SUBCASE("unknown names are rejected") {
    CHECK_THROWS_AS(registry_function("nope"), ConfigError);
    CHECK_THROWS_AS(registry_expand("poly:[]", 6), ConfigError);
  }
}

TEST_CASE("registry: quadrature entries against closed forms") {
  SUBCASE("indicator: c_q = H_{q-1}(a) gamma(a) / q!") {
    const double a = 0.5;
    const double gamma_a = std::exp(-0.125) * 0.3989422804014327;
    const auto e = registry_expand("indicator:0.5", 6);
    CHECK(e.rank == 1);
    CHECK(e.mean == 0.0);  // centered by definition, c_0 noise dropped
    CHECK(std::abs(e.coeffs[1] - gamma_a) <= 1e-2);
    CHECK(std::abs(e.coeffs[2] - a * gamma_a / 2.0) <= 1e-2);
    CHECK(std::abs(e.coeffs[3] - (a * a - 1.0) * gamma_a / 6.0) <= 1e-2);
  }
  SUBCASE("abs-centered: c_2 = gamma(0), c_4 = -gamma(0)/12") {
    const double g0 = 0.3989422804014327;
    const auto e = registry_expand("abs-centered", 6);
    CHECK(e.rank == 2);
    CHECK(e.mean == 0.0);
    CHECK(std::abs(e.coeffs[2] - g0) <= 5e-3);
    CHECK(std::abs(e.coeffs[4] + g0 / 12.0) <= 5e-3);
    CHECK(std::abs(e.coeffs[1]) <= 1e-14);  // odd part vanishes exactly
  }
}

TEST_CASE("expansion json round trip") {
  const auto e = registry_expand("poly:[0,2,0,1]", 8);
  const auto j = expansion_to_json(e);
  CHECK(j["rank"] == e.rank);
  CHECK(j["truncation"] == 8);
  const auto back = expansion_from_json(j);
  CHECK(back.mean == e.mean);
  CHECK(back.rank == e.rank);
  CHECK(back.coeffs == e.coeffs);
}
