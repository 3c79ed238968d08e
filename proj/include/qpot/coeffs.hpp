#pragma once

#include "qpot/rational.hpp"
#include "qpot/units.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qpot::coeffs {

/// Coefficient a_{2n} of the complete quantum potential,
///   a_{2n} = (-1)^{n+1} / (2n - 1) * (2n)! / (4^n (n!)^2).
inline Rational a2n(int n) {
  if (n < 0) {
    throw std::invalid_argument("a2n: n must be non-negative");
  }
  const auto un = static_cast<unsigned>(n);
  const BigInt central = factorial(2 * un) / (factorial(un) * factorial(un));
  const BigInt four_n = BigInt(1) << (2 * un);
  Rational value = Rational(central) / Rational(four_n * BigInt(2 * n - 1));
  if (n % 2 == 0) {
    value = -value;
  }
  return value;
}

/// Coefficient of x^n in the Maclaurin series of (1 + x)^{1/2}, from the
/// recurrence c_0 = 1, c_{k+1} = c_k (1/2 - k) / (k + 1).
inline Rational sqrt_binomial_coeff(int n) {
  if (n < 0) {
    throw std::invalid_argument("sqrt_binomial_coeff: n must be non-negative");
  }
  Rational c = 1;
  const Rational half = make_rational(1, 2);
  for (int k = 0; k < n; ++k) {
    c = c * (half - k) / (k + 1);
  }
  return c;
}

struct CoefficientEntry {
  int n;
  Rational a_2n;
};

using CoefficientTable = std::vector<CoefficientEntry>;

inline CoefficientTable table(int max_n) {
  CoefficientTable t;
  t.reserve(static_cast<std::size_t>(max_n) + 1);
  for (int n = 0; n <= max_n; ++n) {
    t.push_back({n, a2n(n)});
  }
  return t;
}

struct TruncatedEnergy {
  double energy;
  /// |pc/eps0| >= 1: the partial sums do not approach the square root.
  bool outside_convergence;
};

/// eps0 * sum_{n <= order_max} a_{2n} (pc/eps0)^{2n}.
inline TruncatedEnergy truncated_energy(double p_momentum, const PhysicalParams& params, int order_max) {
  if (order_max < 0) {
    throw std::invalid_argument("truncated_energy: order_max must be non-negative");
  }
  const double eps0 = params.rest_energy();
  const double ratio = p_momentum * params.c() / eps0;
  const double x = ratio * ratio;
  double term = 1.0;
  double sum = 0.0;
  for (int n = 0; n <= order_max; ++n) {
    sum += to_double(a2n(n)) * term;
    term *= x;
  }
  return {eps0 * sum, std::abs(ratio) >= 1.0};
}

/// eps0 * sqrt(1 + (pc/eps0)^2), the closed form the series targets.
inline double relativistic_energy(double p_momentum, const PhysicalParams& params) {
  const double eps0 = params.rest_energy();
  const double ratio = p_momentum * params.c() / eps0;
  return eps0 * std::sqrt(1.0 + ratio * ratio);
}

}  // namespace qpot::coeffs
