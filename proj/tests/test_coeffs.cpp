#include <gtest/gtest.h>

#include <cmath>

#include "qpot/coeffs.hpp"

using namespace qpot;
using namespace qpot::coeffs;

TEST(A2n, known_values)
{
  EXPECT_EQ(a2n(0), make_rational(1));
  EXPECT_EQ(a2n(1), make_rational(1, 2));
  EXPECT_EQ(a2n(2), make_rational(-1, 8));
  EXPECT_EQ(a2n(3), make_rational(1, 16));
  EXPECT_EQ(a2n(4), make_rational(-5, 128));
  EXPECT_THROW(a2n(-1), std::invalid_argument);
}

TEST(SqrtBinomial, recurrence_values)
{
  EXPECT_EQ(sqrt_binomial_coeff(0), make_rational(1));
  EXPECT_EQ(sqrt_binomial_coeff(2), make_rational(-1, 8));
  EXPECT_EQ(sqrt_binomial_coeff(4), make_rational(-5, 128));
  EXPECT_THROW(sqrt_binomial_coeff(-2), std::invalid_argument);
}

TEST(A2n, exact_identity_with_binomial_series)
{
  for (int n = 0; n <= 50; ++n) {
    EXPECT_EQ(a2n(n), sqrt_binomial_coeff(n)) << "n = " << n;
  }
}

TEST(A2n, alternating_signs_and_decay)
{
  for (int n = 1; n <= 50; ++n) {
    const Rational a = a2n(n);
    EXPECT_EQ(a > 0, n % 2 == 1) << "n = " << n;
    if (n < 50) {
      EXPECT_LT(abs(a2n(n + 1)), abs(a)) << "n = " << n;
    }
  }
  // 50 is far beyond double range for the factorials involved.
  EXPECT_GT(boost::multiprecision::denominator(a2n(50)), BigInt(1) << 90);
}

TEST(Table, first_entries)
{
  const auto t = table(3);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[1].n, 1);
  EXPECT_EQ(to_fraction_string(t[1].a_2n), "1/2");
  EXPECT_EQ(to_fraction_string(t[2].a_2n), "-1/8");
  EXPECT_EQ(to_fraction_string(t[0].a_2n), "1");
}

TEST(TruncatedEnergy, rest_energy_at_zero_momentum)
{
  const auto p = PhysicalParams::electron();
  const auto e = truncated_energy(0.0, p, 7);
  EXPECT_DOUBLE_EQ(e.energy, p.rest_energy());
  EXPECT_FALSE(e.outside_convergence);
}

TEST(TruncatedEnergy, first_two_terms)
{
  const auto p = PhysicalParams::electron();
  const double momentum = 0.1 * p.rest_energy() / p.c();
  EXPECT_NEAR(truncated_energy(momentum, p, 1).energy / p.rest_energy(), 1.005, 1e-15);
}

TEST(TruncatedEnergy, converges_to_square_root)
{
  const auto p = PhysicalParams::electron();
  const double momentum = 0.1 * p.rest_energy() / p.c();
  const double exact = p.rest_energy() * std::sqrt(1.01);
  EXPECT_LT(std::abs(truncated_energy(momentum, p, 10).energy - exact) / exact, 1e-12);
  EXPECT_NEAR(relativistic_energy(momentum, p), exact, 1e-9);
}

TEST(TruncatedEnergy, error_is_monotone_in_order)
{
  const auto p = PhysicalParams::natural(137.036);
  for (double ratio : {0.01, 0.1, 0.5}) {
    const double momentum = ratio * p.rest_energy() / p.c();
    const double exact = relativistic_energy(momentum, p);
    double previous = std::abs(truncated_energy(momentum, p, 2).energy - exact);
    for (int order = 3; order <= 30; ++order) {
      const double err = std::abs(truncated_energy(momentum, p, order).energy - exact);
      EXPECT_LE(err, previous * (1.0 + 1e-12) + 1e-13 * exact) << "ratio " << ratio << " order " << order;
      previous = err;
    }
    EXPECT_LT(previous / exact, ratio == 0.5 ? 1e-12 : 1e-15);
  }
}

TEST(TruncatedEnergy, flags_divergent_regime)
{
  const auto p = PhysicalParams::electron();
  EXPECT_TRUE(truncated_energy(1.5 * p.rest_energy() / p.c(), p, 4).outside_convergence);
  EXPECT_THROW(truncated_energy(0.0, p, -1), std::invalid_argument);
}
