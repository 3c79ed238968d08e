#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qpot/grid.hpp"

using namespace qpot::grid;

namespace {

constexpr double pi = std::numbers::pi;

double max_rel_interior(const GridFunction& got, const std::function<double(double)>& want, std::size_t skip) {
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t i = skip; i + skip < got.size(); ++i) {
    const double w = want((*got.grid)[i]);
    err = std::max(err, std::abs(got[i] - w));
    scale = std::max(scale, std::abs(w));
  }
  return err / scale;
}

}  // namespace

TEST(Grid, construction_invariants)
{
  EXPECT_THROW(Grid::dirichlet(0.0, 1.0, 15), GridError);
  EXPECT_THROW(Grid::dirichlet(1.0, 1.0, 64), GridError);
  EXPECT_THROW(Grid::radial_log(0.0, 1.0, 64), GridError);
  EXPECT_THROW(Grid::periodic(0.0, -1.0, 64), GridError);
  const auto g = Grid::radial_log(1e-3, 10.0, 64);
  for (std::size_t i = 1; i < g->size(); ++i) {
    EXPECT_GT((*g)[i], (*g)[i - 1]);
  }
  EXPECT_DOUBLE_EQ(g->x_min(), 1e-3);
  EXPECT_DOUBLE_EQ(g->x_max(), 10.0);
  EXPECT_THROW(g->with_backend(Backend::spectral), GridError);
  EXPECT_THROW(GridFunction(g, std::vector<double>(3)), GridError);
}

TEST(Laplacian, exact_on_quadratic)
{
  const auto g = Grid::dirichlet(-1.0, 2.0, 40);
  const auto f = GridFunction::sample(g, [](double x) { return x * x; });
  const auto lap = laplacian(f);
  for (std::size_t i = 2; i + 2 < g->size(); ++i) {
    EXPECT_NEAR(lap[i], 2.0, 1e-10);
  }
}

TEST(Laplacian, sine_eigenfunction_finite_difference)
{
  const double L = 1.7;
  const auto g = Grid::dirichlet(0.0, L, 256);
  const auto f = GridFunction::sample(g, [&](double x) { return std::sin(pi * x / L); });
  const double k2 = (pi / L) * (pi / L);
  EXPECT_LT(max_rel_interior(laplacian(f), [&](double x) { return -k2 * std::sin(pi * x / L); }, 0), 1e-6);
}

TEST(Laplacian, sine_eigenfunction_spectral)
{
  const double L = 2.0;
  const auto g = Grid::dirichlet(0.0, L, 64, Backend::spectral);
  for (int tau : {1, 3, 7}) {
    const double k = tau * pi / L;
    const auto f = GridFunction::sample(g, [&](double x) { return std::sin(k * x); });
    EXPECT_LT(max_rel_interior(laplacian(f), [&](double x) { return -k * k * std::sin(k * x); }, 0), 1e-12);
    EXPECT_LT(max_rel_interior(power_laplacian(f, 2), [&](double x) { return std::pow(k, 4) * std::sin(k * x); }, 0),
              1e-12);
  }
}

TEST(Laplacian, periodic_spectral_is_exact)
{
  const double L = 3.0;
  const auto g = Grid::periodic(-1.0, L, 48);
  const double k = 3.0 * 2.0 * pi / L;
  const auto f = GridFunction::sample(g, [&](double x) { return std::cos(k * x) + 0.5; });
  EXPECT_LT(max_rel_interior(power_laplacian(f, 3), [&](double x) { return -std::pow(k, 6) * std::cos(k * x); }, 0),
            1e-12);
  const auto d = gradient(f);
  EXPECT_LT(max_rel_interior(d, [&](double x) { return -k * std::sin(k * x); }, 0), 1e-12);
}

TEST(Laplacian, periodic_finite_difference_wraps)
{
  const auto g = Grid::periodic(0.0, 1.0, 128, Backend::finite_difference);
  const auto f = GridFunction::sample(g, [](double x) { return std::sin(2.0 * pi * x); });
  const double k2 = 4.0 * pi * pi;
  EXPECT_LT(max_rel_interior(laplacian(f), [&](double x) { return -k2 * std::sin(2.0 * pi * x); }, 0), 1e-6);
}

TEST(Laplacian, radial_exponential)
{
  const double a = 0.529;
  const auto g = Grid::radial_log(1e-4 * a, 50.0 * a, 2048);
  const auto f = GridFunction::sample(g, [&](double r) { return std::exp(-r / a); });
  const auto lap = laplacian(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = (*g)[i];
    if (r > 20.0 * a) {
      break;
    }
    const double want = std::exp(-r / a) * (1.0 / (a * a) - 2.0 / (a * r));
    worst = std::max(worst, std::abs(lap[i] - want) / std::abs(want));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(PowerLaplacian, order_one_matches_laplacian)
{
  for (auto backend : {Backend::finite_difference, Backend::spectral}) {
    const auto g = Grid::dirichlet(0.0, 1.0, 100, backend);
    const auto f = GridFunction::sample(g, [](double x) { return x * x * (1.0 - x) * std::sin(3.0 * x); });
    EXPECT_EQ(power_laplacian(f, 1).values, laplacian(f).values);
  }
  const auto g = Grid::dirichlet(0.0, 1.0, 64);
  EXPECT_THROW(power_laplacian(GridFunction::zeros(g), 0), GridError);
  EXPECT_THROW(power_laplacian(GridFunction::zeros(g), 40), GridError);
}

TEST(PowerLaplacian, bilaplacian_of_sine)
{
  const auto g = Grid::dirichlet(0.0, 1.0, 128);
  const auto f = GridFunction::sample(g, [](double x) { return std::sin(pi * x); });
  const double k4 = std::pow(pi, 4);
  EXPECT_LT(max_rel_interior(power_laplacian(f, 2), [&](double x) { return k4 * std::sin(pi * x); }, 0), 1e-6);
}

TEST(Gradient, dirichlet_backends)
{
  const double L = 2.0;
  for (auto backend : {Backend::finite_difference, Backend::spectral}) {
    const auto g = Grid::dirichlet(0.0, L, 256, backend);
    const auto f = GridFunction::sample(g, [&](double x) { return std::sin(pi * x / L) + 0.2 * std::sin(3 * pi * x / L); });
    const auto d = gradient(f);
    const double tol = backend == Backend::spectral ? 1e-12 : 1e-6;
    EXPECT_LT(max_rel_interior(d, [&](double x) {
                return pi / L * std::cos(pi * x / L) + 0.6 * pi / L * std::cos(3 * pi * x / L);
              }, 0),
              tol);
  }
}

TEST(Gradient, radial)
{
  const auto g = Grid::radial_log(1e-3, 30.0, 1024);
  const auto d = gradient(GridFunction::sample(g, [](double r) { return std::exp(-r); }));
  EXPECT_LT(max_rel_interior(d, [](double r) { return -std::exp(-r); }, 0), 1e-5);
}

TEST(Integrate, constant_on_unit_interval)
{
  const auto g = Grid::dirichlet(0.0, 1.0, 101);
  EXPECT_NEAR(integrate(GridFunction::sample(g, [](double) { return 1.0; })), 1.0, 1e-12);
}

TEST(Integrate, sine_squared)
{
  const auto g = Grid::dirichlet(0.0, 1.0, 101);
  EXPECT_NEAR(integrate(GridFunction::sample(g, [](double x) { return std::pow(std::sin(pi * x), 2); })), 0.5, 1e-8);
}

TEST(Integrate, normalized_hydrogen_ground_state)
{
  const double a = 0.529177;
  const auto g = Grid::radial_log(1e-4 * a, 50.0 * a, 2048);
  const auto f = GridFunction::sample(g, [&](double r) {
    const double psi = 2.0 * std::pow(a, -1.5) * std::exp(-r / a) / std::sqrt(4.0 * pi);
    return psi * psi;
  });
  EXPECT_NEAR(integrate(f), 1.0, 1e-6);
}

TEST(Integrate, normalize_and_periodic_weights)
{
  const auto g = Grid::periodic(0.0, 2.0, 64);
  auto f = GridFunction::sample(g, [](double x) { return 1.0 + std::cos(pi * x); });
  EXPECT_NEAR(integrate(f), 2.0, 1e-13);
  normalize(f);
  EXPECT_NEAR(integrate_product(f, f), 1.0, 1e-13);
  auto z = GridFunction::zeros(g);
  EXPECT_THROW(normalize(z), GridError);
}

TEST(Properties, laplacian_is_self_adjoint)
{
  for (auto backend : {Backend::finite_difference, Backend::spectral}) {
    const auto g = Grid::dirichlet(0.0, 1.0, 200, backend);
    const auto f = GridFunction::sample(g, [](double x) { return x * (1.0 - x) * std::exp(x); });
    const auto h = GridFunction::sample(g, [](double x) { return std::sin(pi * x) * (1.0 + x * x); });
    const double lhs = integrate_product(f, laplacian(h));
    const double rhs = integrate_product(h, laplacian(f));
    EXPECT_LT(std::abs(lhs - rhs), 1e-8 * std::abs(lhs));
  }
  const auto g = Grid::periodic(0.0, 1.0, 128, Backend::finite_difference);
  const auto f = GridFunction::sample(g, [](double x) { return std::exp(std::sin(2 * pi * x)); });
  const auto h = GridFunction::sample(g, [](double x) { return std::cos(4 * pi * x) + x * 0.0; });
  EXPECT_LT(std::abs(integrate_product(f, laplacian(h)) - integrate_product(h, laplacian(f))),
            1e-8 * std::abs(integrate_product(f, laplacian(h))));
}

TEST(Properties, integration_by_parts_for_bilaplacian)
{
  const auto g = Grid::dirichlet(0.0, 1.0, 400);
  const auto R = GridFunction::sample(g, [](double x) { return std::pow(x * (1.0 - x), 3); });
  const auto lap = laplacian(R);
  const double lhs = integrate_product(R, power_laplacian(R, 2));
  const double rhs = integrate_product(lap, lap);
  EXPECT_LT(std::abs(lhs - rhs), 1e-6 * rhs);
}

TEST(Properties, fourth_order_convergence)
{
  std::vector<double> errors;
  for (std::size_t n : {33u, 65u, 129u, 257u}) {
    const auto g = Grid::dirichlet(0.0, 1.0, n);
    const auto f = GridFunction::sample(g, [](double x) { return std::sin(pi * x); });
    errors.push_back(max_rel_interior(laplacian(f), [](double x) { return -pi * pi * std::sin(pi * x); }, 0));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double order = std::log2(errors[i - 1] / errors[i]);
    EXPECT_NEAR(order, 4.0, 0.15);
  }
}

TEST(Properties, deterministic_reduction)
{
  const auto g = Grid::radial_log(1e-3, 10.0, 777);
  const auto f = GridFunction::sample(g, [](double r) { return std::exp(-r) * std::cos(r); });
  EXPECT_EQ(integrate(f), integrate(f));
  EXPECT_EQ(laplacian(f).values, laplacian(f).values);
}
