#pragma once

// Time evolution under
//   i hbar d(psi)/dt = (-hbar^2/2m lap + V + Q - Q_2) psi
// by Strang splitting, plus Bohmian velocities and trajectories.

#include "qpot/fft.hpp"
#include "qpot/grid.hpp"
#include "qpot/qpotential.hpp"
#include "qpot/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpot::dynamics {

using cplx = std::complex<double>;
using grid::GridFunction;
using grid::GridPtr;

class EvolutionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// psi = R exp(i S / hbar) sampled on a uniform grid.
struct WaveField {
  GridPtr grid;
  std::vector<cplx> values;

  WaveField() = default;
  WaveField(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid || values.size() != grid->size()) {
      throw grid::GridError("WaveField: value count does not match grid");
    }
  }

  static WaveField from_real(const GridFunction& R) {
    return WaveField(R.grid, std::vector<cplx>(R.values.begin(), R.values.end()));
  }

  std::size_t size() const { return values.size(); }

  GridFunction amplitude() const {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = std::abs(values[i]);
    }
    return GridFunction(grid, std::move(r));
  }

  GridFunction real_part() const {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = values[i].real();
    }
    return GridFunction(grid, std::move(r));
  }

  GridFunction imag_part() const {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = values[i].imag();
    }
    return GridFunction(grid, std::move(r));
  }

  /// S = hbar * phase, unwrapped along the grid from the first point.
  GridFunction action(double hbar) const {
    std::vector<double> s(values.size(), 0.0);
    double acc = values.empty() ? 0.0 : std::arg(values[0]);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i > 0) {
        acc += std::arg(values[i] * std::conj(values[i - 1]));
      }
      s[i] = hbar * acc;
    }
    return GridFunction(grid, std::move(s));
  }
};

/// psi proportional to exp(-(x - x0)^2 / (4 sigma^2) + i k0 x), normalized;
/// sigma is the standard deviation of |psi|^2.
inline WaveField gaussian_packet(const GridPtr& g, double x0, double sigma, double k0) {
  std::vector<cplx> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = (*g)[i];
    v[i] = std::exp(-(x - x0) * (x - x0) / (4.0 * sigma * sigma)) * std::polar(1.0, k0 * x);
  }
  if (g->boundary() == grid::Boundary::dirichlet) {
    v.front() = 0.0;
    v.back() = 0.0;
  }
  WaveField psi(g, std::move(v));
  double n = 0.0;
  const auto w = g->weights();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    n += w[i] * std::norm(psi.values[i]);
  }
  for (auto& z : psi.values) {
    z /= std::sqrt(n);
  }
  return psi;
}

/// Integral of |psi|^2 over the grid measure.
inline double norm(const WaveField& psi) {
  const auto w = psi.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    s += w[i] * std::norm(psi.values[i]);
  }
  return s;
}

/// <a, b> over the grid measure.
inline cplx inner_product(const WaveField& a, const WaveField& b) {
  const auto w = a.grid->weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += w[i] * std::conj(a.values[i]) * b.values[i];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Configuration and results

enum class Scheme { automatic, split_step_spectral, crank_nicolson_fd };

struct EvolutionConfig {
  double dt = 0.0;
  int steps = 0;
  Scheme scheme = Scheme::automatic;
  int corrector_iterations = 2;
  /// Clamp on |sum of Q_{2n}, n >= 2|; defaults to 1e3 eps0 (lambda_c / L)^4.
  std::optional<double> q_cap;
  /// Store a frame every this many steps (the first and last are always stored).
  int frame_interval = 1;
  /// Relative norm drift that aborts the run.
  double norm_limit = 1e-4;
  bool compute_energy = true;
};

struct Frame {
  int step = 0;
  double time = 0.0;
  WaveField psi;
  double norm = 0.0;
  double energy = 0.0;
  long clamp_count = 0;
};

struct Evolution {
  std::vector<Frame> frames;
  long total_clamps = 0;
  Scheme scheme = Scheme::automatic;
  double q_cap = 0.0;
};

inline double default_q_cap(const PhysicalParams& params, double domain_length) {
  const double ratio = params.compton_wavelength() / domain_length;
  return 1e3 * params.rest_energy() * ratio * ratio * ratio * ratio;
}

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::split_step_spectral: return "split-step-spectral";
    case Scheme::crank_nicolson_fd: return "crank-nicolson-fd";
    default: return "automatic";
  }
}

namespace detail {

/// Pointwise V + sum of the terms other than Q_2, with higher orders clamped to q_cap.
inline std::vector<double> rotation_potential(const WaveField& psi, const GridFunction& V, const QuantumPotentialSpec& spec,
                                              const PhysicalParams& params, double q_cap, long& clamps) {
  const GridFunction R = psi.amplitude();
  std::vector<double> w(V.values);
  std::vector<double> extra(R.size(), 0.0);
  bool has_extra = false;
  for (const auto& term : spec.terms) {
    if (term.order == 2) {
      continue;
    }
    const auto q = qpot::detail::q_from_term(R, term, params, spec.regularization_floor);
    if (term.order == 0) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] += q.values[i];
      }
      continue;
    }
    has_extra = true;
    for (std::size_t i = 0; i < extra.size(); ++i) {
      extra[i] += q.values[i];
    }
  }
  if (has_extra) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      double e = extra[i];
      if (std::abs(e) > q_cap) {
        e = std::copysign(q_cap, e);
        ++clamps;
      }
      w[i] += e;
    }
  }
  return w;
}

inline void rotate(WaveField& psi, const std::vector<double>& w, double tau_over_hbar) {
  for (std::size_t i = 0; i < psi.size(); ++i) {
    psi.values[i] *= std::polar(1.0, -w[i] * tau_over_hbar);
  }
}

/// Exact free propagation for dt on periodic or Dirichlet-spectral grids.
inline void kinetic_spectral(WaveField& psi, double dt, const PhysicalParams& params) {
  const grid::Grid& g = *psi.grid;
  const std::size_t n = psi.size();
  const double c = params.hbar() * dt / (2.0 * params.mass());
  const double pi = std::numbers::pi;
  if (g.boundary() == grid::Boundary::periodic) {
    fft::dft(psi.values, true);
    const double base = 2.0 * pi / g.period();
    for (std::size_t k = 0; k < n; ++k) {
      const long sk = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
      const double kk = base * static_cast<double>(sk);
      psi.values[k] *= std::polar(1.0 / static_cast<double>(n), -c * kk * kk);
    }
    fft::dft(psi.values, false);
    return;
  }
  const std::size_t m = n - 2;
  std::vector<double> re(m), im(m);
  for (std::size_t i = 0; i < m; ++i) {
    re[i] = psi.values[i + 1].real();
    im[i] = psi.values[i + 1].imag();
  }
  fft::dst1(re);
  fft::dst1(im);
  const double scale = 1.0 / (2.0 * static_cast<double>(m + 1));
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = static_cast<double>(k + 1) * pi / g.length();
    const cplx z = cplx(re[k], im[k]) * std::polar(scale, -c * kk * kk);
    re[k] = z.real();
    im[k] = z.imag();
  }
  fft::dst1(re);
  fft::dst1(im);
  psi.values.front() = 0.0;
  psi.values.back() = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    psi.values[i + 1] = {re[i], im[i]};
  }
}

/// Crank-Nicolson step with the three-point Laplacian and psi = 0 at both ends.
inline void kinetic_crank_nicolson(WaveField& psi, double dt, const PhysicalParams& params) {
  const std::size_t n = psi.size();
  const std::size_t m = n - 2;
  const double h = psi.grid->spacing();
  // T = -hbar^2/2m D2 ; (1 + i dt T / 2 hbar) psi' = (1 - i dt T / 2 hbar) psi.
  const cplx r = cplx(0.0, params.hbar() * dt / (4.0 * params.mass() * h * h));
  std::vector<cplx> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const cplx left = psi.values[i];
    const cplx mid = psi.values[i + 1];
    const cplx right = psi.values[i + 2];
    rhs[i] = mid + r * (left - 2.0 * mid + right);
  }
  // Tridiagonal system: diag 1 + 2r, off-diagonal -r. Thomas algorithm.
  const cplx diag = 1.0 + 2.0 * r;
  const cplx off = -r;
  std::vector<cplx> cprime(m), dprime(m);
  cprime[0] = off / diag;
  dprime[0] = rhs[0] / diag;
  for (std::size_t i = 1; i < m; ++i) {
    const cplx denom = diag - off * cprime[i - 1];
    cprime[i] = off / denom;
    dprime[i] = (rhs[i] - off * dprime[i - 1]) / denom;
  }
  std::vector<cplx> x(m);
  x[m - 1] = dprime[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    x[i] = dprime[i] - cprime[i] * x[i + 1];
  }
  psi.values.front() = 0.0;
  psi.values.back() = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    psi.values[i + 1] = x[i];
  }
}

inline Scheme resolve_scheme(Scheme s, const grid::Grid& g) {
  if (g.kind() != grid::Kind::uniform_1d) {
    throw std::invalid_argument("evolve: needs a uniform grid");
  }
  if (s == Scheme::automatic) {
    return g.boundary() == grid::Boundary::dirichlet && !g.is_spectral() ? Scheme::crank_nicolson_fd
                                                                          : Scheme::split_step_spectral;
  }
  if (s == Scheme::crank_nicolson_fd && g.boundary() != grid::Boundary::dirichlet) {
    throw std::invalid_argument("evolve: Crank-Nicolson needs a Dirichlet grid");
  }
  return s;
}

}  // namespace detail

/// int hbar^2/2m |grad psi|^2 + V |psi|^2 + sum over terms other than Q_2 of
/// their Hermitian forms in R = |psi|.
inline double energy_functional(const WaveField& psi, const GridFunction& V, const QuantumPotentialSpec& spec,
                                const PhysicalParams& params) {
  const auto w = psi.grid->weights();
  const auto dre = grid::gradient(psi.real_part());
  const auto dim = grid::gradient(psi.imag_part());
  const double k = params.hbar() * params.hbar() / (2.0 * params.mass());
  double e = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    e += w[i] * (k * (dre[i] * dre[i] + dim[i] * dim[i]) + V[i] * std::norm(psi.values[i]));
  }
  const GridFunction R = psi.amplitude();
  for (const auto& term : spec.terms) {
    if (term.order == 2) {
      continue;
    }
    const double A = prefactor(term, params);
    const int n = term.n();
    if (n == 0) {
      e += A * grid::integrate_product(R, R);
    } else if (n % 2 == 0) {
      const auto half = grid::power_laplacian(R, n / 2);
      e += A * grid::integrate_product(half, half);
    } else {
      const auto d = grid::gradient(grid::power_laplacian(R, (n - 1) / 2));
      e -= A * grid::integrate_product(d, d);
    }
  }
  return e;
}

/// Strang-split evolution. Each step: half rotation by V + Q_0 + Q_4 + ... from
/// the current amplitude, a full kinetic step, then a half rotation from the
/// updated amplitude. Phase rotations leave |psi| unchanged, so the fixed-point
/// corrector passes on the second half-step reach their limit after one pass.
inline Evolution evolve(const WaveField& psi0, const GridFunction& V, const QuantumPotentialSpec& spec,
                        const PhysicalParams& params, const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0)) {
    throw std::invalid_argument("evolve: dt must be positive");
  }
  if (cfg.steps < 0 || cfg.corrector_iterations < 1 || cfg.frame_interval < 1) {
    throw std::invalid_argument("evolve: need steps >= 0, corrector_iterations >= 1, frame_interval >= 1");
  }
  if (V.size() != psi0.size()) {
    throw std::invalid_argument("evolve: potential and wave field sizes differ");
  }
  spec.validate();
  Evolution out;
  out.scheme = detail::resolve_scheme(cfg.scheme, *psi0.grid);
  out.q_cap = cfg.q_cap.value_or(default_q_cap(params, psi0.grid->length()));
  if (!(out.q_cap > 0.0)) {
    throw std::invalid_argument("evolve: q_cap must be positive");
  }
  const double half = 0.5 * cfg.dt / params.hbar();
  const double norm0 = norm(psi0);
  if (!(norm0 > 0.0) || !std::isfinite(norm0)) {
    throw EvolutionError("evolve: initial wave field has zero or non-finite norm");
  }

  WaveField psi = psi0;
  long clamps_since_frame = 0;
  auto record = [&](int step) {
    Frame f;
    f.step = step;
    f.time = step * cfg.dt;
    f.psi = psi;
    f.norm = norm(psi);
    f.energy = cfg.compute_energy ? energy_functional(psi, V, spec, params) : 0.0;
    f.clamp_count = clamps_since_frame;
    clamps_since_frame = 0;
    out.frames.push_back(std::move(f));
  };
  record(0);

  for (int step = 1; step <= cfg.steps; ++step) {
    long clamps = 0;
    detail::rotate(psi, detail::rotation_potential(psi, V, spec, params, out.q_cap, clamps), half);
    if (out.scheme == Scheme::split_step_spectral) {
      detail::kinetic_spectral(psi, cfg.dt, params);
    } else {
      detail::kinetic_crank_nicolson(psi, cfg.dt, params);
    }
    const auto w = detail::rotation_potential(psi, V, spec, params, out.q_cap, clamps);
    detail::rotate(psi, w, half);

    const double n = norm(psi);
    if (!std::isfinite(n)) {
      throw EvolutionError("evolve: non-finite values at step " + std::to_string(step) + "; reduce dt");
    }
    if (std::abs(n / norm0 - 1.0) > cfg.norm_limit) {
      throw EvolutionError("evolve: norm drift " + std::to_string(n / norm0 - 1.0) + " at step " +
                           std::to_string(step));
    }
    clamps_since_frame += clamps;
    out.total_clamps += clamps;
    if (step % cfg.frame_interval == 0 || step == cfg.steps) {
      record(step);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bohmian quantities

/// v = (hbar/m) Im(grad psi / psi); zero where |psi| < floor * max|psi|.
inline GridFunction bohmian_velocity(const WaveField& psi, const PhysicalParams& params, double floor = 1e-8) {
  const auto dre = grid::gradient(psi.real_part());
  const auto dim = grid::gradient(psi.imag_part());
  double peak = 0.0;
  for (const auto& z : psi.values) {
    peak = std::max(peak, std::abs(z));
  }
  std::vector<double> v(psi.size(), 0.0);
  const double cut = floor * peak;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cplx z = psi.values[i];
    if (std::abs(z) > cut && std::abs(z) > 0.0) {
      const cplx ratio = cplx(dre[i], dim[i]) / z;
      v[i] = params.hbar() / params.mass() * ratio.imag();
    }
  }
  return GridFunction(psi.grid, std::move(v));
}

/// Circulation of v around a periodic grid from local phase differences:
/// (hbar/m) * sum arg(psi_{i+1} / psi_i), equal to 2 pi hbar w / m for winding w.
inline double circulation(const WaveField& psi, const PhysicalParams& params) {
  if (psi.grid->boundary() != grid::Boundary::periodic) {
    throw std::invalid_argument("circulation: needs a periodic grid");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const cplx a = psi.values[i];
    const cplx b = psi.values[(i + 1) % psi.size()];
    s += std::arg(b * std::conj(a));
  }
  return params.hbar() / params.mass() * s;
}

/// -grad(V + Q[R]) with centered fourth-order differences.
inline GridFunction quantum_force(const GridFunction& R, const GridFunction& V, const QuantumPotentialSpec& spec,
                                  const PhysicalParams& params) {
  auto total = eval_complete_q(R, params, spec);
  for (std::size_t i = 0; i < total.size(); ++i) {
    total.values[i] += V.values[i];
  }
  auto f = grid::fd_gradient(total);
  for (double& v : f.values) {
    v = -v;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectorySet {
  std::vector<double> seeds;
  std::vector<double> times;
  /// paths[s][j] is the position of seed s at times[j]; truncated when the seed leaves the grid.
  std::vector<std::vector<double>> paths;
  std::vector<bool> exited;
};

namespace detail {

/// Linear interpolation of a field on a uniform grid; periodic grids wrap.
inline std::optional<double> interpolate(const GridFunction& f, double x) {
  const grid::Grid& g = *f.grid;
  const double h = g.spacing();
  const std::size_t n = g.size();
  if (g.boundary() == grid::Boundary::periodic) {
    const double L = g.period();
    double u = std::fmod(x - g.x_min(), L);
    if (u < 0.0) {
      u += L;
    }
    const double s = u / h;
    auto i = static_cast<std::size_t>(std::floor(s));
    const double t = s - static_cast<double>(i);
    i %= n;
    return (1.0 - t) * f.values[i] + t * f.values[(i + 1) % n];
  }
  if (x < g.x_min() || x > g.x_max()) {
    return std::nullopt;
  }
  const double s = (x - g.x_min()) / h;
  auto i = std::min(static_cast<std::size_t>(std::floor(s)), n - 2);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * f.values[i] + t * f.values[i + 1];
}

}  // namespace detail

/// RK4 on v(x, t), linear in space and time between stored frames.
inline TrajectorySet integrate_trajectories(const std::vector<Frame>& frames, const std::vector<double>& seeds,
                                            const PhysicalParams& params, double floor = 1e-8) {
  if (frames.empty()) {
    throw std::invalid_argument("integrate_trajectories: no frames");
  }
  const auto& g = frames.front().psi.grid;
  if (g->kind() != grid::Kind::uniform_1d) {
    throw std::invalid_argument("integrate_trajectories: needs a uniform grid");
  }
  for (const auto& f : frames) {
    if (f.psi.grid->size() != g->size()) {
      throw std::invalid_argument("integrate_trajectories: frames must share a grid");
    }
  }
  for (std::size_t j = 2; j < frames.size(); ++j) {
    const double a = frames[j].time - frames[j - 1].time;
    const double b = frames[1].time - frames[0].time;
    if (std::abs(a - b) > 1e-9 * std::abs(b)) {
      throw std::invalid_argument("integrate_trajectories: frames must be evenly spaced in time");
    }
  }
  std::vector<GridFunction> vel;
  vel.reserve(frames.size());
  for (const auto& f : frames) {
    vel.push_back(bohmian_velocity(f.psi, params, floor));
  }
  TrajectorySet out;
  out.seeds = seeds;
  for (const auto& f : frames) {
    out.times.push_back(f.time);
  }
  out.paths.resize(seeds.size());
  out.exited.assign(seeds.size(), false);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    double x = seeds[s];
    if (!detail::interpolate(vel[0], x)) {
      throw std::invalid_argument("integrate_trajectories: seed outside the grid");
    }
    auto& path = out.paths[s];
    path.push_back(x);
    for (std::size_t j = 0; j + 1 < frames.size(); ++j) {
      const double dt = frames[j + 1].time - frames[j].time;
      auto v = [&](double pos, double frac) -> std::optional<double> {
        const auto a = detail::interpolate(vel[j], pos);
        const auto b = detail::interpolate(vel[j + 1], pos);
        if (!a || !b) {
          return std::nullopt;
        }
        return (1.0 - frac) * *a + frac * *b;
      };
      const auto k1 = v(x, 0.0);
      const auto k2 = k1 ? v(x + 0.5 * dt * *k1, 0.5) : std::nullopt;
      const auto k3 = k2 ? v(x + 0.5 * dt * *k2, 0.5) : std::nullopt;
      const auto k4 = k3 ? v(x + dt * *k3, 1.0) : std::nullopt;
      if (!k4) {
        out.exited[s] = true;
        break;
      }
      x += dt / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
      if (!detail::interpolate(vel[j + 1], x)) {
        out.exited[s] = true;
        break;
      }
      path.push_back(x);
    }
  }
  return out;
}

/// n positions distributed as density * measure: one point per equal-mass
/// stratum of the cumulative distribution, jittered uniformly within it.
inline std::vector<double> stratified_seeds(const GridFunction& density, std::size_t n, std::uint64_t seed) {
  const grid::Grid& g = *density.grid;
  const std::size_t m = g.size();
  // Piecewise-linear density between nodes; cumulative mass at each node.
  std::vector<double> cdf(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (density.values[i - 1] + density.values[i]) * ((*density.grid)[i] - (*density.grid)[i - 1]);
  }
  const double total = cdf.back();
  if (!(total > 0.0)) {
    throw std::invalid_argument("stratified_seeds: density has no mass");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out;
  out.reserve(n);
  std::size_t i = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = (static_cast<double>(k) + u(rng)) / static_cast<double>(n) * total;
    while (i + 1 < m && cdf[i] < target) {
      ++i;
    }
    // Invert the quadratic cumulative mass inside [x_{i-1}, x_i].
    const double x0 = (*density.grid)[i - 1];
    const double h = (*density.grid)[i] - x0;
    const double f0 = density.values[i - 1];
    const double f1 = density.values[i];
    const double need = target - cdf[i - 1];
    const double a = 0.5 * (f1 - f0) / h;
    double t;
    if (std::abs(a) * h < 1e-12 * std::max(f0, 1e-300)) {
      t = f0 > 0.0 ? need / f0 : 0.5 * h;
    } else {
      const double disc = std::max(0.0, f0 * f0 + 4.0 * a * need);
      t = (-f0 + std::sqrt(disc)) / (2.0 * a);
    }
    out.push_back(x0 + std::clamp(t, 0.0, h));
  }
  return out;
}

/// L1 distance between the histogram of `positions` and the binned density
/// |psi|^2 over [lo, hi) with `bins` equal bins; both are normalized to unit mass.
inline double histogram_l1(const std::vector<double>& positions, const WaveField& psi, double lo, double hi, int bins) {
  std::vector<double> emp(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  std::size_t counted = 0;
  for (double x : positions) {
    const auto b = static_cast<long>(std::floor((x - lo) / width));
    if (b >= 0 && b < bins) {
      emp[static_cast<std::size_t>(b)] += 1.0;
      ++counted;
    }
  }
  // Exact bin masses from a fine linear interpolation of |psi|^2.
  std::vector<double> ref(static_cast<std::size_t>(bins), 0.0);
  GridFunction rho(psi.grid, [&] {
    std::vector<double> r(psi.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = std::norm(psi.values[i]);
    }
    return r;
  }());
  constexpr int sub = 64;
  for (int b = 0; b < bins; ++b) {
    double s = 0.0;
    for (int k = 0; k < sub; ++k) {
      const double x = lo + (b + (k + 0.5) / sub) * width;
      s += detail::interpolate(rho, x).value_or(0.0);
    }
    ref[static_cast<std::size_t>(b)] = s * width / sub;
  }
  double ref_total = 0.0;
  for (double r : ref) {
    ref_total += r;
  }
  double l1 = 0.0;
  for (std::size_t b = 0; b < ref.size(); ++b) {
    l1 += std::abs(emp[b] / static_cast<double>(std::max<std::size_t>(counted, 1)) - ref[b] / ref_total);
  }
  return l1;
}

/// || U((psi1 + psi2) / sqrt 2) - (U psi1 + U psi2) / sqrt 2 || after cfg.steps
/// steps, with the norm taken over the grid measure. Zero for a linear flow.
inline double superposition_defect(const WaveField& psi1, const WaveField& psi2, const GridFunction& V,
                                   const QuantumPotentialSpec& spec, const PhysicalParams& params,
                                   EvolutionConfig cfg) {
  cfg.frame_interval = std::max(cfg.steps, 1);
  cfg.compute_energy = false;
  WaveField sum = psi1;
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum.values[i] = (psi1.values[i] + psi2.values[i]) / std::sqrt(2.0);
  }
  const auto a = evolve(psi1, V, spec, params, cfg).frames.back().psi;
  const auto b = evolve(psi2, V, spec, params, cfg).frames.back().psi;
  const auto c = evolve(sum, V, spec, params, cfg).frames.back().psi;
  WaveField diff = c;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff.values[i] = c.values[i] - (a.values[i] + b.values[i]) / std::sqrt(2.0);
  }
  return std::sqrt(norm(diff));
}

}  // namespace qpot::dynamics
