#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qpot/spectra.hpp"

using namespace qpot;
using namespace qpot::spectra;
using grid::Backend;
using grid::GridFunction;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double alpha = fine_structure;

double box_energy(double L, int tau, const PhysicalParams& p) {
  const double pc = tau * pi * p.hbar_c() / L;
  return pc * pc / (2.0 * p.rest_energy());
}

double box_q4_shift(double L, int tau, const PhysicalParams& p) {
  const double pc = tau * pi * p.hbar_c() / L;
  return -std::pow(pc, 4) / (8.0 * std::pow(p.rest_energy(), 3));
}

}  // namespace

TEST(BoxEigenstate, energy_and_normalization)
{
  const auto p = PhysicalParams::electron();
  const auto s1 = box_eigenstate(1.0, 1, 256, p);
  EXPECT_NEAR(s1.E0, 37.6, 0.05);
  EXPECT_NEAR(s1.E0, box_energy(1.0, 1, p), 1e-12);
  const auto s2 = box_eigenstate(1.0, 2, 256, p);
  EXPECT_NEAR(s2.E0 / s1.E0, 4.0, 1e-14);
  EXPECT_NEAR(grid::integrate_product(s1.R0, s1.R0), 1.0, 1e-10);
  EXPECT_NEAR(grid::integrate_product(s2.R0, s2.R0), 1.0, 1e-10);
  EXPECT_EQ(s1.S0, 0.0);
  EXPECT_THROW(box_eigenstate(1.0, 0, 256, p), std::invalid_argument);
}

TEST(HydrogenState, energies_and_node)
{
  const auto p = PhysicalParams::electron();
  const auto s1 = hydrogen_radial_state(1, 0, p);
  const auto s2 = hydrogen_radial_state(2, 0, p);
  EXPECT_NEAR(s1.E0, -13.606, 1e-3);
  EXPECT_NEAR(s2.E0, -3.401, 1e-3);
  EXPECT_NEAR(grid::integrate_product(s1.R0, s1.R0), 1.0, 1e-10);
  EXPECT_NEAR(grid::integrate_product(s2.R0, s2.R0), 1.0, 1e-10);

  const auto& g = *s2.R0.grid;
  int sign_changes = 0;
  double node = 0.0;
  double spacing_at_node = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if ((s2.R0[i - 1] > 0.0) != (s2.R0[i] > 0.0)) {
      ++sign_changes;
      node = g[i];
      spacing_at_node = g[i] - g[i - 1];
    }
  }
  EXPECT_EQ(sign_changes, 1);
  EXPECT_NEAR(node, 2.0 * p.bohr_radius(), spacing_at_node);
  EXPECT_THROW(hydrogen_radial_state(3, 0, p), std::invalid_argument);
  EXPECT_THROW(hydrogen_radial_state(1, 1, p), std::invalid_argument);
}

TEST(PerturbativeShift, box_q4_closed_form)
{
  const auto p = PhysicalParams::electron();
  const auto state = box_eigenstate(1.0, 1, 256, p);
  const double dE = perturbative_shift(state, 4, p, QuantumPotentialSpec::relativistic({4}));
  EXPECT_NEAR(dE, -1.38e-3, 1e-5);
  EXPECT_NEAR(dE / box_q4_shift(1.0, 1, p), 1.0, 1e-10);
}

TEST(PerturbativeShift, rest_and_kinetic_terms)
{
  const auto p = PhysicalParams::electron();
  const auto spec = QuantumPotentialSpec::relativistic({0, 2});
  const auto box = box_eigenstate(1.0, 3, 200, p);
  EXPECT_NEAR(perturbative_shift(box, 0, p, spec), p.rest_energy(), 1e-9 * p.rest_energy());
  EXPECT_NEAR(perturbative_shift(box, 2, p, spec) / box.E0, 1.0, 1e-10);
  const auto h1 = hydrogen_radial_state(1, 0, p);
  EXPECT_NEAR(perturbative_shift(h1, 0, p, spec), p.rest_energy(), 1e-9 * p.rest_energy());
  // <T> = 13.6 eV for 1s.
  EXPECT_NEAR(perturbative_shift(h1, 2, p, spec) / -h1.E0, 1.0, 1e-4);
  EXPECT_THROW(perturbative_shift(h1, 4, p, spec), std::invalid_argument);
}

TEST(PerturbativeShift, hydrogen_q4_against_analytic)
{
  const auto p = PhysicalParams::electron();
  const auto spec = QuantumPotentialSpec::relativistic({4});
  const double mc2a4 = p.rest_energy() * std::pow(alpha, 4);
  const double d1 = perturbative_shift(hydrogen_radial_state(1, 0, p), 4, p, spec);
  const double d2 = perturbative_shift(hydrogen_radial_state(2, 0, p), 4, p, spec);
  EXPECT_NEAR(d1, -9.06e-4, 1e-5);
  EXPECT_NEAR(d1 / (-5.0 / 8.0 * mc2a4), 1.0, 0.02);
  EXPECT_NEAR(d2 / (-13.0 / 128.0 * mc2a4), 1.0, 0.02);
}

TEST(ReferenceShift, box_matches_closed_form_and_q4_path)
{
  const auto p = PhysicalParams::electron();
  for (int tau : {1, 2, 5}) {
    for (auto backend : {Backend::spectral, Backend::finite_difference}) {
      const auto state = box_eigenstate(1.0, tau, 512, p, backend);
      const auto r = compare_q4_shift(state, p);
      EXPECT_NEAR(r.delta_E_reference / box_q4_shift(1.0, tau, p), 1.0, 1e-10);
      EXPECT_LT(r.relative_gap, backend == Backend::spectral ? 1e-10 : 1e-6) << "tau " << tau;
    }
  }
}

TEST(ReferenceShift, hydrogen_paths_agree)
{
  const auto p = PhysicalParams::electron();
  const double mc2a4 = p.rest_energy() * std::pow(alpha, 4);
  const auto r1 = compare_q4_shift(hydrogen_radial_state(1, 0, p), p);
  const auto r2 = compare_q4_shift(hydrogen_radial_state(2, 0, p), p);
  EXPECT_NEAR(r1.delta_E_reference / (-5.0 / 8.0 * mc2a4), 1.0, 0.02);
  EXPECT_NEAR(r2.delta_E_reference / (-13.0 / 128.0 * mc2a4), 1.0, 0.02);
  EXPECT_NEAR(r2.delta_E_reference, -1.47e-4, 2e-6);
  EXPECT_LT(r1.relative_gap, 1e-6);
  EXPECT_LT(r2.relative_gap, 1e-6);
}

TEST(ReferenceShift, periodic_state)
{
  const auto p = PhysicalParams::electron();
  const double L = 2.0;
  const auto g = grid::Grid::periodic(0.0, L, 64);
  auto R = GridFunction::sample(g, [&](double x) { return 1.0 + 0.4 * std::cos(2 * pi * x / L); });
  grid::normalize(R);
  const StationaryState s{R, 0.0, 0.0, "periodic"};
  EXPECT_LT(compare_q4_shift(s, p).relative_gap, 1e-10);
}

TEST(Properties, q4_shifts_are_negative)
{
  const auto p = PhysicalParams::proton();
  const auto spec = QuantumPotentialSpec::relativistic({4});
  for (int tau = 1; tau <= 6; ++tau) {
    EXPECT_LT(perturbative_shift(box_eigenstate(1e-4, tau, 128, p), 4, p, spec), 0.0);
  }
  EXPECT_LT(perturbative_shift(hydrogen_radial_state(2, 0, PhysicalParams::electron()), 4,
                               PhysicalParams::electron(), spec),
            0.0);
}

TEST(ModifiedEigenproblem, box_modes_closed_form)
{
  const auto p = PhysicalParams::electron();
  const double L = 1.0;
  const auto g = grid::Grid::dirichlet(0.0, L, 256, Backend::spectral);
  const auto V = GridFunction::zeros(g);
  const auto pairs = solve_modified_eigenproblem(V, QuantumPotentialSpec::relativistic({2, 4}), p, 6);
  ASSERT_EQ(pairs.size(), 6u);
  for (int tau = 1; tau <= 6; ++tau) {
    const double want = box_energy(L, tau, p) + box_q4_shift(L, tau, p);
    EXPECT_NEAR(pairs[tau - 1].energy / want, 1.0, 1e-12) << tau;
    const auto mode = box_eigenstate(L, tau, 256, p);
    EXPECT_NEAR(std::abs(grid::integrate_product(mode.R0, pairs[tau - 1].R)), 1.0, 1e-10);
  }
  // Nonperturbative shift equals the perturbative one for exact eigenmodes.
  const auto plain = solve_modified_eigenproblem(V, QuantumPotentialSpec::relativistic({2}), p, 1);
  const double gap = pairs[0].energy - plain[0].energy;
  const double pert = perturbative_shift(box_eigenstate(L, 1, 256, p), 4, p, QuantumPotentialSpec::relativistic({4}));
  EXPECT_NEAR(gap / pert, 1.0, 1e-10);
}

TEST(ModifiedEigenproblem, standard_box_spectrum)
{
  const auto p = PhysicalParams::electron();
  const auto g = grid::Grid::dirichlet(0.0, 2.0, 128, Backend::spectral);
  const auto pairs = solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({2}), p, 5);
  for (int tau = 1; tau <= 5; ++tau) {
    EXPECT_NEAR(pairs[tau - 1].energy / (tau * tau * pairs[0].energy), 1.0, 1e-12);
  }
  EXPECT_NEAR(pairs[0].energy / box_energy(2.0, 1, p), 1.0, 1e-12);
}

TEST(ModifiedEigenproblem, rest_term_shifts_everything)
{
  const auto p = PhysicalParams::electron();
  const auto g = grid::Grid::dirichlet(0.0, 1.0, 64, Backend::spectral);
  const auto with = solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({0, 2}), p, 3);
  const auto without = solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({2}), p, 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(with[i].energy - without[i].energy, p.rest_energy(), 1e-8);
  }
}

TEST(ModifiedEigenproblem, finite_difference_path)
{
  const auto p = PhysicalParams::electron();
  const double L = 1.0;
  // Coarse enough that every resolved momentum stays below m c.
  const auto g = grid::Grid::dirichlet(0.0, L, 100, Backend::finite_difference);
  const auto pairs = solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({2, 4}), p, 3);
  for (int tau = 1; tau <= 3; ++tau) {
    const double want = box_energy(L, tau, p) + box_q4_shift(L, tau, p);
    EXPECT_NEAR(pairs[tau - 1].energy / want, 1.0, 1e-6) << tau;
  }
  const auto fine = grid::Grid::dirichlet(0.0, L, 4000, Backend::finite_difference);
  EXPECT_THROW(
      solve_modified_eigenproblem(GridFunction::zeros(fine), QuantumPotentialSpec::relativistic({2, 4}), p, 1),
      std::invalid_argument);
}

TEST(ModifiedEigenproblem, perturbed_box_gap_is_second_order)
{
  const auto p = PhysicalParams::electron();
  const double L = 1.0;
  const auto g = grid::Grid::dirichlet(0.0, L, 256, Backend::spectral);
  const auto V = GridFunction::sample(g, [&](double x) { return 2.0 * std::cos(pi * x / L) + 1.5 * x / L; });
  const auto base = solve_modified_eigenproblem(V, QuantumPotentialSpec::relativistic({2}), p, 1);
  const auto full = solve_modified_eigenproblem(V, QuantumPotentialSpec::relativistic({2, 4}), p, 1);
  const StationaryState s{base[0].R, 0.0, base[0].energy, "perturbed"};
  const double pert = perturbative_shift(s, 4, p, QuantumPotentialSpec::relativistic({4}));
  const double gap = std::abs((full[0].energy - base[0].energy) - pert);
  EXPECT_LT(gap, 10.0 * pert * pert / base[0].energy);
}

TEST(ModifiedEigenproblem, spectrum_monotone_below_rest_energy)
{
  const auto p = PhysicalParams::electron();
  const double L = 1.0;
  const auto g = grid::Grid::dirichlet(0.0, L, 400, Backend::spectral);
  const auto pairs = solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({2, 4}), p, 200);
  int checked = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const double pc = static_cast<double>(i + 1) * pi * p.hbar_c() / L;
    if (pc < p.rest_energy()) {
      EXPECT_GT(pairs[i].energy, pairs[i - 1].energy);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(ModifiedEigenproblem, rejects_unsupported_inputs)
{
  const auto p = PhysicalParams::electron();
  const auto radial = hydrogen_grid(p, 64);
  EXPECT_THROW(solve_modified_eigenproblem(GridFunction::zeros(radial), QuantumPotentialSpec::relativistic({2}), p, 1),
               std::invalid_argument);
  const auto g = grid::Grid::dirichlet(0.0, 1.0, 64, Backend::spectral);
  EXPECT_THROW(solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({2, 6}), p, 1),
               std::invalid_argument);
  EXPECT_THROW(solve_modified_eigenproblem(GridFunction::zeros(g), QuantumPotentialSpec::relativistic({2}), p, 0),
               std::invalid_argument);
}
