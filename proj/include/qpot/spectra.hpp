#pragma once

// Stationary states, first-order energy shifts from extra quantum-potential
// terms, an independent p^4 reference, and linear eigen-solves of
//   sum_n A_{2n} lap^n R + V R = E R.

#include "qpot/grid.hpp"
#include "qpot/qpotential.hpp"
#include "qpot/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpot::spectra {

using grid::GridFunction;

struct StationaryState {
  GridFunction R0;
  double S0 = 0.0;
  double E0 = 0.0;
  std::string label;
};

struct ShiftResult {
  std::string state;
  double delta_E = 0.0;
  double delta_E_reference = 0.0;
  double relative_gap = 0.0;
};

/// sqrt(2/L) sin(tau pi x / L) on a Dirichlet grid over [0, L].
inline StationaryState box_eigenstate(double L, int tau, std::size_t grid_points, const PhysicalParams& params,
                                      grid::Backend backend = grid::Backend::spectral) {
  if (tau < 1) {
    throw std::invalid_argument("box_eigenstate: tau must be at least 1");
  }
  const auto g = grid::Grid::dirichlet(0.0, L, grid_points, backend);
  const double k = tau * std::numbers::pi / L;
  auto R = GridFunction::sample(g, [&](double x) { return std::sqrt(2.0 / L) * std::sin(k * x); });
  R.values.front() = 0.0;
  R.values.back() = 0.0;
  const double p = params.hbar() * k;
  return {std::move(R), 0.0, p * p / (2.0 * params.mass()), "box tau=" + std::to_string(tau)};
}

/// Default hydrogen grid: r in [1e-4 a, 50 a], 2048 logarithmic points.
inline grid::GridPtr hydrogen_grid(const PhysicalParams& params, std::size_t points = 2048) {
  const double a = params.bohr_radius();
  return grid::Grid::radial_log(1e-4 * a, 50.0 * a, points);
}

/// Analytic 1s or 2s radial function, normalized on the given radial grid.
inline StationaryState hydrogen_radial_state(int n, int l, const PhysicalParams& params, grid::GridPtr g = nullptr) {
  if (l != 0 || (n != 1 && n != 2)) {
    throw std::invalid_argument("hydrogen_radial_state: only 1s and 2s are supported");
  }
  if (!g) {
    g = hydrogen_grid(params);
  }
  if (g->kind() != grid::Kind::radial_log) {
    throw std::invalid_argument("hydrogen_radial_state: needs a radial grid");
  }
  const double a = params.bohr_radius();
  auto R = GridFunction::sample(g, [&](double r) {
    return n == 1 ? std::exp(-r / a) : (1.0 - r / (2.0 * a)) * std::exp(-r / (2.0 * a));
  });
  grid::normalize(R);
  const double alpha = fine_structure;
  const double E0 = -params.rest_energy() * alpha * alpha / (2.0 * n * n);
  return {std::move(R), 0.0, E0, std::to_string(n) + "s"};
}

/// First-order shift of one term of `spec`, in Hermitian form:
///   n even: A int (lap^{n/2} R)^2,  n odd: -A int |grad lap^{(n-1)/2} R|^2.
inline double perturbative_shift(const StationaryState& state, int order, const PhysicalParams& params,
                                 const QuantumPotentialSpec& spec) {
  const PotentialTerm* term = spec.find(order);
  if (term == nullptr) {
    throw std::invalid_argument("perturbative_shift: order " + std::to_string(order) + " not in spec");
  }
  const double A = prefactor(*term, params);
  const int n = term->n();
  const GridFunction& R = state.R0;
  if (n == 0) {
    return A * grid::integrate_product(R, R);
  }
  if (R.grid->size() < static_cast<std::size_t>(2 * n + 1)) {
    throw grid::GridError("perturbative_shift: grid under-resolved for order " + std::to_string(order));
  }
  if (n % 2 == 0) {
    const auto half = grid::power_laplacian(R, n / 2);
    return A * grid::integrate_product(half, half);
  }
  const auto inner = n == 1 ? R : grid::power_laplacian(R, (n - 1) / 2);
  const auto d = grid::gradient(inner);
  return -A * grid::integrate_product(d, d);
}

namespace detail {

/// Integral of (lap R)^2 without the grid operators: a naive trigonometric
/// series on uniform grids, sixth-order differences of R itself on radial grids.
inline double squared_laplacian_integral(const GridFunction& R) {
  const grid::Grid& g = *R.grid;
  const std::size_t N = g.size();
  const double pi = std::numbers::pi;
  if (g.kind() == grid::Kind::radial_log) {
    // lap R = (R_tt + R_t) / r^2 in t = ln r.
    const auto d = grid::detail::one_sided_derivatives(R.values, g.spacing(), 7);
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double r = g[i];
      const double lap = (d.second[i] + d.first[i]) / (r * r);
      const double w = (i == 0 || i + 1 == N ? 0.5 : 1.0) * 4.0 * pi * r * r * r * g.spacing();
      s += w * lap * lap;
    }
    return s;
  }
  const double L = g.length();
  const double h = g.spacing();
  double s = 0.0;
  if (g.boundary() == grid::Boundary::dirichlet) {
    for (std::size_t j = 1; j + 1 < N; ++j) {
      const double k = static_cast<double>(j) * pi / L;
      double b = 0.0;
      for (std::size_t i = 1; i + 1 < N; ++i) {
        b += R.values[i] * std::sin(pi * static_cast<double>(j * i) / static_cast<double>(N - 1));
      }
      b *= 2.0 * h / L;
      s += 0.5 * L * b * b * k * k * k * k;
    }
    return s;
  }
  for (std::size_t j = 0; j < N; ++j) {
    const long sj = j <= N / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(N);
    const double k = 2.0 * pi * static_cast<double>(sj) / L;
    std::complex<double> c = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      c += R.values[i] * std::polar(1.0, -2.0 * pi * static_cast<double>(j * i % N) / static_cast<double>(N));
    }
    c /= static_cast<double>(N);
    s += L * std::norm(c) * k * k * k * k;
  }
  return s;
}

}  // namespace detail

/// -(hbar^4 / 8 m^3 c^2) int (lap R0)^2, the kinetic p^4 correction for a real state.
inline double relativistic_reference_shift(const StationaryState& state, const PhysicalParams& params) {
  const double hbar2 = params.hbar() * params.hbar();
  const double m = params.mass();
  const double c = params.c();
  return -hbar2 * hbar2 / (8.0 * m * m * m * c * c) * detail::squared_laplacian_integral(state.R0);
}

/// Q_4 shift against the reference, with the relative gap between them.
inline ShiftResult compare_q4_shift(const StationaryState& state, const PhysicalParams& params) {
  const auto spec = QuantumPotentialSpec::relativistic({4});
  ShiftResult r;
  r.state = state.label;
  r.delta_E = perturbative_shift(state, 4, params, spec);
  r.delta_E_reference = relativistic_reference_shift(state, params);
  r.relative_gap = r.delta_E_reference != 0.0
                       ? std::abs(r.delta_E - r.delta_E_reference) / std::abs(r.delta_E_reference)
                       : std::abs(r.delta_E);
  return r;
}

// ---------------------------------------------------------------------------
// Linear eigen-solve

struct Eigenpair {
  double energy = 0.0;
  GridFunction R;
};

namespace detail {

inline void orient_and_normalize(GridFunction& f) {
  std::size_t peak = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f.values[i]) > std::abs(f.values[peak]) * (1.0 + 1e-9)) {
      peak = i;
    }
  }
  const double sign = f.values[peak] < 0.0 ? -1.0 : 1.0;
  for (double& v : f.values) {
    v *= sign;
  }
  grid::normalize(f);
}

inline std::vector<Eigenpair> collect(const Eigen::MatrixXd& H, int count,
                                      const std::function<GridFunction(const Eigen::VectorXd&)>& to_grid) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("modified eigenproblem: eigen-solver did not converge");
  }
  const auto n = std::min<Eigen::Index>(count, H.rows());
  std::vector<Eigenpair> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    GridFunction R = to_grid(solver.eigenvectors().col(j));
    orient_and_normalize(R);
    out.push_back({solver.eigenvalues()(j), std::move(R)});
  }
  return out;
}

}  // namespace detail

/// Lowest `count` eigenpairs of sum_n A_{2n} lap^n + V on a uniform Dirichlet grid.
///
/// Spectral grids use the sine basis restricted to modes with hbar k < m c,
/// where the truncated series still increases with k. Finite-difference grids
/// assemble the fourth-order Laplacian on interior points and reject grids
/// whose resolved momenta reach m c.
inline std::vector<Eigenpair> solve_modified_eigenproblem(const GridFunction& V, const QuantumPotentialSpec& spec,
                                                          const PhysicalParams& params, int count) {
  const auto& g = V.grid;
  if (g->kind() != grid::Kind::uniform_1d || g->boundary() != grid::Boundary::dirichlet) {
    throw std::invalid_argument("modified eigenproblem: needs a uniform Dirichlet grid");
  }
  if (spec.max_order() > 4) {
    throw std::invalid_argument("modified eigenproblem: orders above 4 are not supported");
  }
  if (count < 1) {
    throw std::invalid_argument("modified eigenproblem: count must be positive");
  }
  double A[3] = {0.0, 0.0, 0.0};
  for (const auto& t : spec.terms) {
    A[t.n()] = prefactor(t, params);
  }
  const std::size_t N = g->size();
  const std::size_t interior = N - 2;
  const double L = g->length();
  const double h = g->spacing();
  const double pi = std::numbers::pi;
  const double mc = params.mass() * params.c();

  if (g->is_spectral()) {
    std::size_t modes = interior;
    if (A[2] != 0.0) {
      modes = 0;
      while (modes < interior && params.hbar() * (static_cast<double>(modes + 1) * pi / L) < mc) {
        ++modes;
      }
    }
    if (modes == 0) {
      throw std::invalid_argument("modified eigenproblem: no modes below the m c cutoff");
    }
    Eigen::MatrixXd S(interior, modes);
    for (std::size_t i = 0; i < interior; ++i) {
      for (std::size_t j = 0; j < modes; ++j) {
        S(i, j) = std::sqrt(2.0 / L) * std::sin(pi * static_cast<double>((i + 1) * (j + 1)) / static_cast<double>(N - 1));
      }
    }
    Eigen::VectorXd v(interior);
    for (std::size_t i = 0; i < interior; ++i) {
      v(i) = V.values[i + 1];
    }
    Eigen::MatrixXd H = h * S.transpose() * v.asDiagonal() * S;
    for (std::size_t j = 0; j < modes; ++j) {
      const double k2 = std::pow(static_cast<double>(j + 1) * pi / L, 2);
      H(j, j) += A[0] - A[1] * k2 + A[2] * k2 * k2;
    }
    H = 0.5 * (H + H.transpose()).eval();
    return detail::collect(H, count, [&](const Eigen::VectorXd& c) {
      Eigen::VectorXd x = S * c;
      std::vector<double> values(N, 0.0);
      for (std::size_t i = 0; i < interior; ++i) {
        values[i + 1] = x(i);
      }
      return GridFunction(g, std::move(values));
    });
  }

  if (A[2] != 0.0 && params.hbar() * params.hbar() * 16.0 / (3.0 * h * h) >= mc * mc) {
    throw std::invalid_argument("modified eigenproblem: grid resolves momenta above m c; use a coarser grid");
  }
  // Interior block of the odd-reflection fourth-order Laplacian.
  const auto n = static_cast<Eigen::Index>(interior);
  Eigen::MatrixXd Lap = Eigen::MatrixXd::Zero(n, n);
  const double inv = 1.0 / (12.0 * h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    Lap(i, i) = -30.0 * inv;
    if (i + 1 < n) Lap(i, i + 1) = Lap(i + 1, i) = 16.0 * inv;
    if (i + 2 < n) Lap(i, i + 2) = Lap(i + 2, i) = -1.0 * inv;
  }
  Lap(0, 0) += inv;
  Lap(n - 1, n - 1) += inv;
  Eigen::MatrixXd H = A[1] * Lap + A[2] * Lap * Lap;
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) += A[0] + V.values[static_cast<std::size_t>(i) + 1];
  }
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * H.cwiseAbs().maxCoeff()) {
    throw std::logic_error("modified eigenproblem: assembled operator is not symmetric");
  }
  return detail::collect(H, count, [&](const Eigen::VectorXd& x) {
    std::vector<double> values(N, 0.0);
    for (std::size_t i = 0; i < interior; ++i) {
      values[i + 1] = x(static_cast<Eigen::Index>(i));
    }
    return GridFunction(g, std::move(values));
  });
}

}  // namespace qpot::spectra
