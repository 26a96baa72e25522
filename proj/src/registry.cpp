#include "bmlab/registry.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "bmlab/errors.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {

namespace {

using nlohmann::json;

std::vector<double> parse_poly_list(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("registry: bad poly coefficient list: ") +
                      e.what());
  }
  if (!j.is_array() || j.empty())
    throw ConfigError("registry: poly wants a nonempty coefficient array");
  std::vector<double> mono;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("registry: poly coefficients must be numbers");
    mono.push_back(v.get<double>());
  }
  return mono;
}

double parse_number(const std::string& body, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(body, &used);
    if (used != body.size()) throw std::invalid_argument(body);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("registry: bad ") + what + " '" + body + "'");
  }
}

}  // namespace

std::vector<double> poly_to_hermite_levels(const std::vector<double>& mono) {
  std::vector<double> levels(mono.size(), 0.0);
  for (std::size_t n = 0; n < mono.size(); ++n) {
    const double a = mono[n];
    if (a == 0.0) continue;
    // x^n = sum_j n! / (2^j j! (n-2j)!) H_{n-2j}
    double coeff = 1.0;  // j = 0 term: n!/n! = 1
    for (std::size_t j = 0; 2 * j <= n; ++j) {
      if (j > 0) {
        // ratio of consecutive terms: (n-2j+2)(n-2j+1) / (2j)
        coeff *= static_cast<double>((n - 2 * j + 2) * (n - 2 * j + 1)) /
                 static_cast<double>(2 * j);
      }
      levels[n - 2 * j] += a * coeff;
    }
  }
  return levels;
}

std::function<double(double)> registry_function(const std::string& spec) {
  if (spec.rfind("hermite:", 0) == 0) {
    const int q = static_cast<int>(parse_number(spec.substr(8), "hermite order"));
    if (q < 0) throw ConfigError("registry: hermite order must be >= 0");
    return [q](double x) { return hermite_eval(q, x); };
  }
  if (spec.rfind("poly:", 0) == 0) {
    auto mono = parse_poly_list(spec.substr(5));
    return [mono](double x) {
      double acc = 0.0;
      for (std::size_t i = mono.size(); i-- > 0;) acc = acc * x + mono[i];
      return acc;
    };
  }
  if (spec == "cube") return [](double x) { return x * x * x; };
  if (spec == "sign") return [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
  if (spec == "abs-centered") {
    const double c = std::sqrt(2.0 / std::numbers::pi);
    return [c](double x) { return std::abs(x) - c; };
  }
  if (spec.rfind("indicator:", 0) == 0) {
    const double a = parse_number(spec.substr(10), "indicator threshold");
    const double tail = normal_cdf(-a);  // P(N > a)
    return [a, tail](double x) { return (x > a ? 1.0 : 0.0) - tail; };
  }
  throw ConfigError("registry: unknown function '" + spec + "'");
}

HermiteExpansion registry_expand(const std::string& spec, int trunc,
                                 int quad_order) {
  if (trunc < 1) throw ConfigError("registry_expand: truncation must be >= 1");

  if (spec.rfind("hermite:", 0) == 0) {
    const int q = static_cast<int>(parse_number(spec.substr(8), "hermite order"));
    if (q < 0 || q > trunc)
      throw ConfigError("registry_expand: hermite order outside 0..truncation");
    std::vector<double> levels(static_cast<std::size_t>(trunc) + 1, 0.0);
    levels[static_cast<std::size_t>(q)] = 1.0;
    return make_expansion(std::move(levels));
  }

  auto expand_exact_poly = [&](const std::vector<double>& mono) {
    if (static_cast<int>(mono.size()) - 1 > trunc)
      throw ConfigError("registry_expand: polynomial degree exceeds truncation");
    std::vector<double> levels = poly_to_hermite_levels(mono);
    levels.resize(static_cast<std::size_t>(trunc) + 1, 0.0);
    return make_expansion(std::move(levels));
  };

  if (spec.rfind("poly:", 0) == 0)
    return expand_exact_poly(parse_poly_list(spec.substr(5)));
  if (spec == "cube") return expand_exact_poly({0.0, 0.0, 0.0, 1.0});

  HermiteExpansion e = expand(registry_function(spec), trunc, quad_order);
  // sign, abs-centered and indicator are centered by definition; whatever
  // lands in c_0 is quadrature discretization error on a discontinuous
  // integrand, not a mean part, and would poison the centering check later
  e.mean = 0.0;
  return e;
}

}  // namespace bmlab
