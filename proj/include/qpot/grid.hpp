#pragma once

// Real-space grids, differential operators and quadrature.
//
// Uniform grids include both end points. On Dirichlet grids the end points are
// boundary nodes where fields vanish; finite differences extend a field past
// the boundary by odd reflection, which keeps the discrete Laplacian symmetric
// and exact on sine modes up to the stencil's truncation error. Periodic grids
// hold N points x_0 + j L / N with the end point identified with x_0.
//
// Radial grids are logarithmic, r_j = r_min exp(j dt). The radial Laplacian
// of R(r) is evaluated through u = r R as u''(r) / r, with derivatives taken in
// t = ln r.

#include "qpot/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpot::grid {

enum class Kind { uniform_1d, radial_log };
enum class Boundary { dirichlet, periodic };
enum class Backend { finite_difference, spectral };

class GridError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t min_points = 16;

class Grid {
public:
  /// Uniform grid on [x_min, x_max] with fields vanishing at both ends.
  static std::shared_ptr<const Grid> dirichlet(double x_min, double x_max, std::size_t points,
                                               Backend backend = Backend::finite_difference) {
    if (!(x_max > x_min)) {
      throw GridError("dirichlet grid: x_max must exceed x_min");
    }
    check_size(points);
    auto g = std::shared_ptr<Grid>(new Grid(Kind::uniform_1d, Boundary::dirichlet, backend));
    g->spacing_ = (x_max - x_min) / static_cast<double>(points - 1);
    g->points_.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
      g->points_[j] = x_min + g->spacing_ * static_cast<double>(j);
    }
    g->points_.back() = x_max;
    g->finish();
    return g;
  }

  /// Uniform periodic grid of the given period starting at x_min.
  static std::shared_ptr<const Grid> periodic(double x_min, double period, std::size_t points,
                                              Backend backend = Backend::spectral) {
    if (!(period > 0.0)) {
      throw GridError("periodic grid: period must be positive");
    }
    check_size(points);
    auto g = std::shared_ptr<Grid>(new Grid(Kind::uniform_1d, Boundary::periodic, backend));
    g->spacing_ = period / static_cast<double>(points);
    g->points_.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
      g->points_[j] = x_min + g->spacing_ * static_cast<double>(j);
    }
    g->finish();
    return g;
  }

  /// Logarithmic radial grid on [r_min, r_max] with the 4 pi r^2 measure.
  static std::shared_ptr<const Grid> radial_log(double r_min, double r_max, std::size_t points) {
    if (!(r_min > 0.0) || !(r_max > r_min)) {
      throw GridError("radial grid: need 0 < r_min < r_max");
    }
    check_size(points);
    auto g = std::shared_ptr<Grid>(new Grid(Kind::radial_log, Boundary::dirichlet, Backend::finite_difference));
    g->spacing_ = std::log(r_max / r_min) / static_cast<double>(points - 1);
    g->points_.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
      g->points_[j] = r_min * std::exp(g->spacing_ * static_cast<double>(j));
    }
    g->points_.back() = r_max;
    g->finish();
    return g;
  }

  Kind kind() const { return kind_; }
  Boundary boundary() const { return boundary_; }
  Backend backend() const { return backend_; }
  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  /// h on uniform grids, dt = d(ln r) on radial grids.
  double spacing() const { return spacing_; }
  double x_min() const { return points_.front(); }
  /// Upper end of the domain; for periodic grids this is x_min + period.
  double x_max() const { return boundary_ == Boundary::periodic ? x_min() + period() : points_.back(); }
  /// Domain length (Dirichlet box length or period).
  double length() const { return x_max() - x_min(); }
  double period() const { return spacing_ * static_cast<double>(points_.size()); }
  bool is_spectral() const { return backend_ == Backend::spectral; }

  /// Trapezoid weights including the measure (4 pi r^2 dr on radial grids).
  std::span<const double> weights() const { return weights_; }

  /// A copy of this grid with another operator backend.
  std::shared_ptr<const Grid> with_backend(Backend backend) const {
    if (kind_ == Kind::radial_log && backend == Backend::spectral) {
      throw GridError("radial grids only support finite differences");
    }
    auto g = std::shared_ptr<Grid>(new Grid(*this));
    g->backend_ = backend;
    return g;
  }

private:
  Grid(Kind k, Boundary b, Backend be) : kind_(k), boundary_(b), backend_(be) {}

  static void check_size(std::size_t points) {
    if (points < min_points) {
      throw GridError("grid needs at least " + std::to_string(min_points) + " points");
    }
  }

  void finish() {
    const std::size_t n = points_.size();
    weights_.assign(n, spacing_);
    if (kind_ == Kind::radial_log) {
      for (std::size_t j = 0; j < n; ++j) {
        const double r = points_[j];
        weights_[j] = 4.0 * std::numbers::pi * r * r * r * spacing_;
      }
    }
    if (boundary_ == Boundary::dirichlet) {
      weights_.front() *= 0.5;
      weights_.back() *= 0.5;
    }
  }

  Kind kind_;
  Boundary boundary_;
  Backend backend_;
  double spacing_ = 0.0;
  std::vector<double> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real field sampled on a grid.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) {
      throw GridError("GridFunction: null grid");
    }
    if (values.size() != grid->size()) {
      throw GridError("GridFunction: value count does not match grid");
    }
  }

  static GridFunction zeros(const GridPtr& g) { return GridFunction(g, std::vector<double>(g->size(), 0.0)); }

  static GridFunction sample(const GridPtr& g, const std::function<double(double)>& f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = f((*g)[i]);
    }
    return GridFunction(g, std::move(v));
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) {
      m = std::max(m, std::abs(v));
    }
    return m;
  }
};

// ---------------------------------------------------------------------------
// Finite-difference weights

/// Fornberg's algorithm: weights[k][j] approximate the k-th derivative at z
/// from values at nodes x[j], for k = 0..max_derivative.
inline std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x, int max_derivative) {
  const std::size_t n = x.size();
  const auto m = static_cast<std::size_t>(max_derivative);
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace detail {

/// First and second derivatives on a uniform index grid of spacing h using a
/// centered stencil of the given width in the interior and one-sided stencils
/// of width + 1 points near the ends. Fourth order for width 5, sixth for 7.
struct UniformDerivatives {
  std::vector<double> first;
  std::vector<double> second;
};

inline UniformDerivatives one_sided_derivatives(std::span<const double> f, double h, std::size_t width) {
  const std::size_t n = f.size();
  const std::size_t half = width / 2;
  UniformDerivatives out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> offsets(width);
  for (std::size_t k = 0; k < width; ++k) {
    offsets[k] = static_cast<double>(k) - static_cast<double>(half);
  }
  const auto centered = fd_weights(0.0, offsets, 2);
  for (std::size_t i = half; i + half < n; ++i) {
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      d1 += centered[1][k] * f[i + k - half];
      d2 += centered[2][k] * f[i + k - half];
    }
    out.first[i] = d1 / h;
    out.second[i] = d2 / (h * h);
  }
  const std::size_t edge_width = width + 1;
  std::vector<double> nodes(edge_width);
  for (std::size_t k = 0; k < edge_width; ++k) {
    nodes[k] = static_cast<double>(k);
  }
  for (std::size_t i = 0; i < half; ++i) {
    const auto w = fd_weights(static_cast<double>(i), nodes, 2);
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t k = 0; k < edge_width; ++k) {
      a1 += w[1][k] * f[k];
      a2 += w[2][k] * f[k];
      // Mirror image at the upper end: node n-1-k, derivative sign flips for odd order.
      b1 -= w[1][k] * f[n - 1 - k];
      b2 += w[2][k] * f[n - 1 - k];
    }
    out.first[i] = a1 / h;
    out.second[i] = a2 / (h * h);
    out.first[n - 1 - i] = b1 / h;
    out.second[n - 1 - i] = b2 / (h * h);
  }
  return out;
}

inline double uniform_ghost(std::span<const double> f, long j, Boundary b) {
  const long n = static_cast<long>(f.size());
  if (j >= 0 && j < n) {
    return f[static_cast<std::size_t>(j)];
  }
  if (b == Boundary::periodic) {
    return f[static_cast<std::size_t>(((j % n) + n) % n)];
  }
  // Odd reflection about the boundary nodes 0 and n-1.
  if (j < 0) {
    return -f[static_cast<std::size_t>(-j)];
  }
  return -f[static_cast<std::size_t>(2 * (n - 1) - j)];
}

inline std::vector<double> fd_laplacian_uniform(std::span<const double> f, const Grid& g) {
  const long n = static_cast<long>(f.size());
  const double inv = 1.0 / (12.0 * g.spacing() * g.spacing());
  std::vector<double> out(f.size());
  for (long j = 0; j < n; ++j) {
    const double fm2 = uniform_ghost(f, j - 2, g.boundary());
    const double fm1 = uniform_ghost(f, j - 1, g.boundary());
    const double fp1 = uniform_ghost(f, j + 1, g.boundary());
    const double fp2 = uniform_ghost(f, j + 2, g.boundary());
    out[static_cast<std::size_t>(j)] = (-fm2 + 16.0 * fm1 - 30.0 * f[static_cast<std::size_t>(j)] + 16.0 * fp1 - fp2) * inv;
  }
  return out;
}

inline std::vector<double> fd_gradient_uniform(std::span<const double> f, const Grid& g) {
  const long n = static_cast<long>(f.size());
  const double inv = 1.0 / (12.0 * g.spacing());
  std::vector<double> out(f.size());
  for (long j = 0; j < n; ++j) {
    const double fm2 = uniform_ghost(f, j - 2, g.boundary());
    const double fm1 = uniform_ghost(f, j - 1, g.boundary());
    const double fp1 = uniform_ghost(f, j + 1, g.boundary());
    const double fp2 = uniform_ghost(f, j + 2, g.boundary());
    // Odd reflection makes the field antisymmetric about boundary nodes, so the
    // value there is pinned to zero; the slope uses the reflected neighbours.
    out[static_cast<std::size_t>(j)] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) * inv;
  }
  return out;
}

/// Coefficients below this fraction of the largest are transform round-off and
/// are dropped before high powers of k amplify them.
inline constexpr double spectral_noise_floor = 1e-14;

/// Multiplies each Fourier/sine mode with wavenumber k by symbol(k).
inline std::vector<double> spectral_apply(std::span<const double> f, const Grid& g,
                                          const std::function<double(double)>& symbol) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (g.boundary() == Boundary::dirichlet) {
    const std::size_t m = n - 2;
    std::vector<double> inner(f.begin() + 1, f.end() - 1);
    fft::dst1(inner);
    double peak = 0.0;
    for (double v : inner) {
      peak = std::max(peak, std::abs(v));
    }
    const double norm = 1.0 / (2.0 * static_cast<double>(m + 1));
    for (std::size_t k = 0; k < m; ++k) {
      const double wave = static_cast<double>(k + 1) * std::numbers::pi / g.length();
      inner[k] = std::abs(inner[k]) <= spectral_noise_floor * peak ? 0.0 : inner[k] * symbol(wave) * norm;
    }
    fft::dst1(inner);
    std::copy(inner.begin(), inner.end(), out.begin() + 1);
    return out;
  }
  std::vector<std::complex<double>> c(f.begin(), f.end());
  fft::dft(c, true);
  double peak = 0.0;
  for (const auto& v : c) {
    peak = std::max(peak, std::abs(v));
  }
  const double base = 2.0 * std::numbers::pi / g.period();
  for (std::size_t k = 0; k < n; ++k) {
    const long signed_k = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    c[k] = std::abs(c[k]) <= spectral_noise_floor * peak
               ? 0.0
               : c[k] * symbol(base * static_cast<double>(signed_k)) / static_cast<double>(n);
  }
  fft::dft(c, false);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = c[k].real();
  }
  return out;
}

inline std::vector<double> spectral_gradient(std::span<const double> f, const Grid& g) {
  const std::size_t n = f.size();
  if (g.boundary() == Boundary::dirichlet) {
    // f = sum_k b_k sin(k pi x / L)  ->  f' = sum_k b_k (k pi / L) cos(k pi x / L), via DCT-I.
    const std::size_t m = n - 2;
    std::vector<double> inner(f.begin() + 1, f.end() - 1);
    fft::dst1(inner);
    std::vector<double> cosine(n, 0.0);
    for (std::size_t k = 1; k <= m; ++k) {
      const double b = inner[k - 1] / static_cast<double>(m + 1);
      cosine[k] = 0.5 * b * static_cast<double>(k) * std::numbers::pi / g.length();
    }
    fft::dct1(cosine);
    return cosine;
  }
  std::vector<std::complex<double>> c(f.begin(), f.end());
  fft::dft(c, true);
  const double base = 2.0 * std::numbers::pi / g.period();
  for (std::size_t k = 0; k < n; ++k) {
    const long signed_k = k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    c[k] *= nyquist ? 0.0 : std::complex<double>(0.0, base * static_cast<double>(signed_k)) / static_cast<double>(n);
  }
  fft::dft(c, false);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = c[k].real();
  }
  return out;
}

inline std::vector<double> radial_laplacian(std::span<const double> f, const Grid& g) {
  const std::size_t n = f.size();
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) {
    u[j] = g[j] * f[j];
  }
  const auto d = one_sided_derivatives(u, g.spacing(), 5);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = g[j];
    out[j] = (d.second[j] - d.first[j]) / (r * r * r);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operators

/// Discrete Laplacian using the grid's backend.
inline GridFunction laplacian(const GridFunction& f) {
  const Grid& g = *f.grid;
  if (g.size() < 5) {
    throw GridError("laplacian: grid too small");
  }
  if (g.kind() == Kind::radial_log) {
    return GridFunction(f.grid, detail::radial_laplacian(f.values, g));
  }
  if (g.is_spectral()) {
    return GridFunction(f.grid, detail::spectral_apply(f.values, g, [](double k) { return -k * k; }));
  }
  return GridFunction(f.grid, detail::fd_laplacian_uniform(f.values, g));
}

/// (Laplacian)^n. The spectral backend applies the symbol (-k^2)^n in one pass.
inline GridFunction power_laplacian(const GridFunction& f, int n) {
  if (n < 1) {
    throw GridError("power_laplacian: n must be at least 1");
  }
  const Grid& g = *f.grid;
  if (g.size() < static_cast<std::size_t>(2 * n + 1)) {
    throw GridError("power_laplacian: grid under-resolved for order " + std::to_string(2 * n));
  }
  if (g.kind() == Kind::uniform_1d && g.is_spectral()) {
    return GridFunction(f.grid, detail::spectral_apply(f.values, g, [n](double k) {
                          double s = 1.0;
                          for (int i = 0; i < n; ++i) {
                            s *= -k * k;
                          }
                          return s;
                        }));
  }
  GridFunction out = laplacian(f);
  for (int i = 1; i < n; ++i) {
    out = laplacian(out);
  }
  return out;
}

/// d f / dx (or d f / dr on radial grids).
inline GridFunction gradient(const GridFunction& f) {
  const Grid& g = *f.grid;
  if (g.kind() == Kind::radial_log) {
    const auto d = detail::one_sided_derivatives(f.values, g.spacing(), 5);
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = d.first[j] / g[j];
    }
    return GridFunction(f.grid, std::move(out));
  }
  if (g.is_spectral()) {
    return GridFunction(f.grid, detail::spectral_gradient(f.values, g));
  }
  return GridFunction(f.grid, detail::fd_gradient_uniform(f.values, g));
}

/// Centered fourth-order finite-difference gradient regardless of backend.
inline GridFunction fd_gradient(const GridFunction& f) {
  if (f.grid->kind() == Kind::radial_log || !f.grid->is_spectral()) {
    return gradient(f);
  }
  return GridFunction(f.grid, detail::fd_gradient_uniform(f.values, *f.grid));
}

/// Trapezoid quadrature over the grid measure, summed in index order.
inline double integrate(const GridFunction& f) {
  const auto w = f.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += w[i] * f.values[i];
  }
  return s;
}

/// Integral of f * g over the grid measure.
inline double integrate_product(const GridFunction& f, const GridFunction& g) {
  if (f.grid != g.grid && f.size() != g.size()) {
    throw GridError("integrate_product: grids differ");
  }
  const auto w = f.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += w[i] * f.values[i] * g.values[i];
  }
  return s;
}

/// Scales f in place so that the integral of f^2 is one; returns the old norm.
inline double normalize(GridFunction& f) {
  const double norm = std::sqrt(integrate_product(f, f));
  if (!(norm > 0.0)) {
    throw GridError("normalize: zero function");
  }
  for (double& v : f.values) {
    v /= norm;
  }
  return norm;
}

inline const char* to_string(Kind k) { return k == Kind::uniform_1d ? "uniform-1d" : "radial-log"; }
inline const char* to_string(Boundary b) { return b == Boundary::dirichlet ? "dirichlet" : "periodic"; }
inline const char* to_string(Backend b) { return b == Backend::spectral ? "spectral" : "finite-difference"; }

}  // namespace qpot::grid
