#include <gtest/gtest.h>

#include <random>

#include "qpot/elcheck.hpp"
#include "qpot/parser.hpp"

using namespace qpot;
using namespace qpot::expr;
using qpot::elcheck::build_el_residual;
using qpot::elcheck::certify;
using qpot::elcheck::CertifyOptions;

namespace {

Expression parse1(const char* text) { return parse_q_expression(text, 1); }

const JetVariable R0{};
const JetVariable Rx = JetVariable::along_x(1);
const JetVariable Rxx = JetVariable::along_x(2);

}  // namespace

TEST(BuildResidual, constant_potential_is_trivial)
{
  EXPECT_TRUE(build_el_residual(parse1("A0"), 1).is_zero());
  EXPECT_TRUE(build_el_residual(parse1("0"), 1).is_zero());
}

TEST(BuildResidual, bohmian_form_cancels)
{
  EXPECT_TRUE(build_el_residual(parse1("A2 * lap(R) / R"), 1).is_zero());
  EXPECT_TRUE(build_el_residual(parse_q_expression("A2 * lap(R) / R", 3), 3).is_zero());
}

TEST(BuildResidual, odd_order_counterexample)
{
  // R^2 (-C R_x / R^2) - D_x(R^2 C / R) = -2 C R_x
  const Expression expected = Expression::constant(-2) * Expression::symbol("C") * Expression::jet(Rx);
  EXPECT_EQ(build_el_residual(parse1("C * R_x / R"), 1), expected);
}

TEST(BuildResidual, squared_gradient_counterexample)
{
  // -2 C R_x^2 / R - 2 C R_xx
  const Expression C = Expression::symbol("C");
  const Expression expected = Expression::constant(-2) * C * pow(Expression::jet(Rx), 2) / Expression::jet(R0) -
                              Expression::constant(2) * C * Expression::jet(Rxx);
  EXPECT_EQ(build_el_residual(parse1("C * R_x^2 / R^2"), 1), expected);
}

TEST(BuildResidual, rejects_time_derivatives)
{
  const Expression q = Expression::jet(JetVariable({expr::time_axis})) / Expression::jet(R0);
  EXPECT_THROW(build_el_residual(q, 1), std::invalid_argument);
  EXPECT_THROW(build_el_residual(parse_q_expression("R_yy/R", 2), 1), std::invalid_argument);
}

TEST(BuildResidual, order_bound)
{
  for (const char* text : {"A4 * lap2(R) / R", "C * R_x^2 / R^2", "R_xxx / R", "A2*R_xx/R + R_x^3"}) {
    const Expression q = parse1(text);
    EXPECT_LE(build_el_residual(q, 1).max_jet_order(), 2 * q.max_jet_order()) << text;
  }
}

TEST(BuildResidual, linear_in_candidate)
{
  const std::vector<Expression> candidates = {parse1("R_x/R"), parse1("R_x^2/R^2"), parse1("R_xx/R"),
                                              parse1("R^2 * R_xxx"), parse1("(R + R_x)^(-1)")};
  for (const auto& q1 : candidates) {
    for (const auto& q2 : candidates) {
      const Rational a = make_rational(3, 7);
      const Rational b = make_rational(-5, 2);
      EXPECT_EQ(build_el_residual(a * q1 + b * q2, 1),
                a * build_el_residual(q1, 1) + b * build_el_residual(q2, 1));
    }
  }
}

TEST(Certify, even_family_passes_in_one_dimension)
{
  const char* family[] = {"A0", "A2 * lap(R) / R", "A4 * lap2(R) / R", "A6 * lap(lap2(R)) / R",
                          "A0 + A2*lap(R)/R + A4*lap2(R)/R"};
  for (const char* text : family) {
    const auto report = certify(parse1(text), 1, {.trials = 100, .tolerance = 1e-10, .seed = 3});
    EXPECT_TRUE(report.passes) << text;
    EXPECT_LT(report.max_relative_residual, 1e-10) << text;
    EXPECT_EQ(report.samples_used, 100);
    EXPECT_EQ(report.exact_nonzero, 0);
    EXPECT_GT(report.exact_checks, 0);
  }
}

TEST(Certify, even_family_passes_in_three_dimensions)
{
  for (const char* text : {"A2 * lap(R) / R", "A4 * lap2(R) / R"}) {
    const auto report = certify(parse_q_expression(text, 3), 3, {.trials = 40, .seed = 5});
    EXPECT_TRUE(report.passes) << text;
  }
}

TEST(Certify, counterexamples_fail)
{
  for (const char* text : {"C * R_x / R", "C * R_x^2 / R^2"}) {
    const auto report = certify(parse1(text), 1, {.trials = 100, .seed = 9});
    EXPECT_FALSE(report.passes) << text;
    EXPECT_GT(report.max_abs_residual, 1e-3) << text;
    EXPECT_GT(report.exact_nonzero, 0) << text;
  }
}

TEST(Certify, zero_potential_passes_trivially)
{
  const auto report = certify(parse1("0"), 1, {.trials = 20});
  EXPECT_TRUE(report.passes);
  EXPECT_TRUE(report.residual.is_zero());
  EXPECT_EQ(report.max_abs_residual, 0.0);
}

TEST(Certify, requires_enough_trials)
{
  EXPECT_THROW(certify(parse1("A0"), 1, {.trials = 5}), std::invalid_argument);
}

TEST(Certify, deterministic_given_seed)
{
  const auto a = certify(parse1("C * R_x / R"), 1, {.trials = 30, .seed = 42});
  const auto b = certify(parse1("C * R_x / R"), 1, {.trials = 30, .seed = 42});
  EXPECT_EQ(a.max_abs_residual, b.max_abs_residual);
  EXPECT_EQ(a.resamples, b.resamples);
}

TEST(Certify, linearity_holds_numerically)
{
  // residual(a Q1 + b Q2) = a residual(Q1) + b residual(Q2) at random jets.
  const Expression q1 = parse1("R_x/R");
  const Expression q2 = parse1("R_x^2/R^2 + R_xxx");
  const Rational a = make_rational(2, 3);
  const Rational b = make_rational(-7, 5);
  const Expression lhs = build_el_residual(a * q1 + b * q2, 1);
  const Expression r1 = build_el_residual(q1, 1);
  const Expression r2 = build_el_residual(q2, 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    JetPoint p;
    for (int k = 0; k <= 6; ++k) {
      p.values[JetVariable::along_x(k)] = k == 0 ? 0.5 + std::abs(u(rng)) : u(rng);
    }
    const double expected = to_double(a) * evaluate(r1, p) + to_double(b) * evaluate(r2, p);
    EXPECT_NEAR(evaluate(lhs, p), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(BohmianRecovery, cancellation_terms_sum_to_zero)
{
  // With Q = -(hbar^2/2m) lap(R)/R the two extra terms produced by varying R are
  //   R^2 (hbar^2/2m) lap(R)/R^2   and   lap(R^2 (-hbar^2/2m) / R),
  // built here in three dimensions without simplification and evaluated separately.
  const int d = 3;
  const Expression k = Expression::symbol("K");  // hbar^2 / 2m
  const Expression R = Expression::jet(R0);
  const Expression first = pow(R, 2) * k * expr::laplacian(R, d) / pow(R, 2);
  const Expression second = expr::laplacian(pow(R, 2) * (-k) / R, d);
  EXPECT_EQ(first + second, Expression());

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    JetPoint p;
    p.dimension = d;
    p.values[R0] = 0.3 + std::abs(u(rng));
    for (int a = 0; a < d; ++a) {
      p.values[JetVariable({a, a})] = u(rng);
    }
    const ConstantMap c{{"K", 0.5 + std::abs(u(rng))}};
    const double t1 = evaluate(first, p, c);
    const double t2 = evaluate(second, p, c);
    EXPECT_LE(std::abs(t1 + t2), 1e-12 * std::max(std::abs(t1), std::abs(t2)));
  }
}
