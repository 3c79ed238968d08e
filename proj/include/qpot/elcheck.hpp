#pragma once

// Euler-Lagrange stationarity condition for a candidate quantum potential Q:
//
//   sum over multi-indices alpha of (-1)^|alpha| D_alpha( R^2 dQ/dR_alpha ) = 0
//
// for every function R. Certification evaluates the residual on jets of
// randomly drawn analytic functions and, where all inputs are rational, also
// checks the residual for exact zero at rational points.

#include "qpot/expr.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpot::elcheck {

using expr::Expression;
using expr::JetVariable;

/// Residual split by derivative order: piece k is (-1)^k sum_{|alpha|=k} D_alpha(R^2 dQ/dR_alpha).
struct ResidualPieces {
  std::vector<Expression> by_order;

  Expression total() const {
    Expression out;
    for (const auto& p : by_order) {
      out = out + p;
    }
    return out;
  }
};

inline ResidualPieces build_el_residual_pieces(const Expression& q, int dimension) {
  if (dimension < 1 || dimension > expr::max_spatial_dimension) {
    throw std::invalid_argument("build_el_residual: dimension must be 1, 2 or 3");
  }
  const auto jets = q.jet_variables();
  int max_order = 0;
  for (const auto& v : jets) {
    if (v.has_time()) {
      throw std::invalid_argument("build_el_residual: Q depends on a time derivative " + v.name());
    }
    for (int a : v.axes()) {
      if (a >= dimension) {
        throw std::invalid_argument("build_el_residual: " + v.name() + " exceeds dimension " +
                                    std::to_string(dimension));
      }
    }
    max_order = std::max(max_order, v.order());
  }
  const Expression r_squared = pow(Expression::jet(JetVariable()), 2);
  ResidualPieces pieces;
  pieces.by_order.resize(static_cast<std::size_t>(max_order) + 1);
  for (const auto& v : jets) {
    Expression flux = r_squared * expr::partial_wrt_jet(q, v);
    Expression piece = expr::total_derivative(flux, v);
    auto& slot = pieces.by_order[static_cast<std::size_t>(v.order())];
    slot = v.order() % 2 == 0 ? slot + piece : slot - piece;
  }
  return pieces;
}

/// The full stationarity residual as one canonical expression.
inline Expression build_el_residual(const Expression& q, int dimension) {
  return build_el_residual_pieces(q, dimension).total();
}

// ---------------------------------------------------------------------------
// Analytic test functions with exact derivatives

/// One-dimensional factor of a separable test function.
struct TestFactor {
  enum class Family { polynomial, sinusoid, gaussian };
  Family family = Family::polynomial;
  std::vector<double> poly;  // coefficients c_0 + c_1 x + ...
  double amplitude = 1.0;
  double frequency = 1.0;
  double shift = 0.0;

  /// k-th derivative at x.
  double derivative(int k, double x) const {
    switch (family) {
      case Family::polynomial: {
        double sum = 0.0;
        for (std::size_t i = static_cast<std::size_t>(k); i < poly.size(); ++i) {
          double falling = 1.0;
          for (int j = 0; j < k; ++j) {
            falling *= static_cast<double>(i) - j;
          }
          sum += poly[i] * falling * std::pow(x, static_cast<double>(i) - k);
        }
        return sum;
      }
      case Family::sinusoid:
        return amplitude * std::pow(frequency, k) * std::sin(frequency * x + shift + k * M_PI / 2.0);
      case Family::gaussian: {
        // d^k/dx^k exp(-b u^2), u = x - shift, b = frequency^2, via Hermite polynomials:
        // (-sqrt(b))^k H_k(sqrt(b) u) exp(-b u^2).
        const double s = frequency;
        const double z = s * (x - shift);
        double h_prev = 1.0;
        double h = 2.0 * z;
        if (k == 0) {
          h = 1.0;
        } else {
          for (int n = 1; n < k; ++n) {
            const double next = 2.0 * z * h - 2.0 * n * h_prev;
            h_prev = h;
            h = next;
          }
        }
        return amplitude * std::pow(-s, k) * h * std::exp(-z * z);
      }
    }
    return 0.0;
  }
};

/// f(x) = offset + sum_s prod_axis factor[s][axis](x_axis).
struct TestFunction {
  int dimension = 1;
  double offset = 0.0;
  std::vector<std::vector<TestFactor>> products;

  double jet(const JetVariable& v, const std::vector<double>& x) const {
    double sum = v.order() == 0 ? offset : 0.0;
    for (const auto& prod : products) {
      double p = 1.0;
      for (int a = 0; a < dimension; ++a) {
        p *= prod[static_cast<std::size_t>(a)].derivative(v.count(a), x[static_cast<std::size_t>(a)]);
      }
      sum += p;
    }
    return sum;
  }
};

namespace detail {

inline TestFactor random_factor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 2);
  TestFactor f;
  switch (pick(rng)) {
    case 0: {
      f.family = TestFactor::Family::polynomial;
      std::uniform_int_distribution<int> degree(2, 9);
      const int d = degree(rng);
      for (int i = 0; i <= d; ++i) {
        f.poly.push_back(unit(rng));
      }
      break;
    }
    case 1:
      f.family = TestFactor::Family::sinusoid;
      f.amplitude = 0.5 + std::abs(unit(rng));
      f.frequency = 0.5 + 1.5 * std::abs(unit(rng));
      f.shift = 3.0 * unit(rng);
      break;
    default:
      f.family = TestFactor::Family::gaussian;
      f.amplitude = 0.5 + std::abs(unit(rng));
      f.frequency = 0.4 + std::abs(unit(rng));
      f.shift = unit(rng);
      break;
  }
  return f;
}

inline TestFunction random_function(int dimension, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  TestFunction f;
  f.dimension = dimension;
  f.offset = unit(rng);
  const int count = dimension == 1 ? 1 : 2;
  for (int s = 0; s < count; ++s) {
    std::vector<TestFactor> prod;
    for (int a = 0; a < dimension; ++a) {
      prod.push_back(random_factor(rng));
    }
    f.products.push_back(std::move(prod));
  }
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Certification

struct CertifyOptions {
  int trials = 100;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  /// Exact rational checks at polynomial jets; skipped when zero.
  int exact_trials = 20;
  /// Lower bound on |R| at sampled points, away from the R^{-1} singularity.
  double min_abs_r = 0.1;
};

struct ResidualReport {
  Expression candidate;
  Expression residual;
  int dimension = 1;
  bool passes = false;
  double max_abs_residual = 0.0;
  /// max over samples of |residual| / (largest order-piece magnitude).
  double max_relative_residual = 0.0;
  int samples_used = 0;
  int resamples = 0;
  int exact_checks = 0;
  int exact_nonzero = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
};

namespace detail {

inline std::map<std::string, double> random_constants(const Expression& e, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign(0.5);
  std::map<std::string, double> out;
  for (const auto& s : e.symbols()) {
    out[s] = sign(rng) ? mag(rng) : -mag(rng);
  }
  return out;
}

inline Rational random_rational(std::mt19937_64& rng, int lo, int hi, int den) {
  std::uniform_int_distribution<int> num(lo, hi);
  return make_rational(num(rng), den);
}

}  // namespace detail

/// Certifies the stationarity condition for q by randomized evaluation.
inline ResidualReport certify(const Expression& q, int dimension, const CertifyOptions& opt = {}) {
  if (opt.trials < 20) {
    throw std::invalid_argument("certify: at least 20 trials are required");
  }
  ResidualReport report;
  report.candidate = q;
  report.dimension = dimension;
  report.seed = opt.seed;
  report.tolerance = opt.tolerance;

  const ResidualPieces pieces = build_el_residual_pieces(q, dimension);
  report.residual = pieces.total();

  std::set<JetVariable> needed = report.residual.jet_variables();
  for (const auto& p : pieces.by_order) {
    const auto j = p.jet_variables();
    needed.insert(j.begin(), j.end());
  }
  needed.insert(JetVariable());

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);

  constexpr int max_resamples_per_trial = 1000;
  for (int trial = 0; trial < opt.trials; ++trial) {
    expr::JetPoint point;
    point.dimension = dimension;
    int attempts = 0;
    for (;;) {
      const TestFunction f = detail::random_function(dimension, rng);
      std::vector<double> x(static_cast<std::size_t>(dimension));
      for (auto& xi : x) {
        xi = coord(rng);
      }
      if (std::abs(f.jet(JetVariable(), x)) >= opt.min_abs_r) {
        for (const auto& v : needed) {
          point.values[v] = f.jet(v, x);
        }
        break;
      }
      ++report.resamples;
      if (++attempts > max_resamples_per_trial) {
        throw std::runtime_error("certify: could not draw a jet with |R| above the floor");
      }
    }
    const auto constants = detail::random_constants(q, rng);

    double value = 0.0;
    double scale = 0.0;
    for (const auto& p : pieces.by_order) {
      const auto ev = expr::evaluate_detailed(p, point, constants);
      value += ev.value;
      scale = std::max({scale, ev.scale, std::abs(ev.value)});
    }
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(value));
    const double rel = scale > 0.0 ? std::abs(value) / scale : std::abs(value);
    report.max_relative_residual = std::max(report.max_relative_residual, rel);
    ++report.samples_used;
  }

  // Exact polynomial identity test: rational polynomial R at rational points.
  for (int trial = 0; trial < opt.exact_trials; ++trial) {
    std::uniform_int_distribution<int> degree(3, 8);
    std::vector<std::vector<Rational>> poly(static_cast<std::size_t>(dimension));
    for (auto& p : poly) {
      const int d = degree(rng);
      for (int i = 0; i <= d; ++i) {
        p.push_back(detail::random_rational(rng, -9, 9, 4));
      }
    }
    std::vector<Rational> x(static_cast<std::size_t>(dimension));
    for (auto& xi : x) {
      xi = detail::random_rational(rng, -7, 7, 5);
    }
    // R(x) = 1 + prod_a p_a(x_a) keeps R away from zero for most draws.
    auto factor_derivative = [&](std::size_t a, int k) {
      Rational sum = 0;
      const auto& p = poly[a];
      std::vector<Rational> powers(p.size(), Rational(1));
      for (std::size_t i = 1; i < p.size(); ++i) {
        powers[i] = powers[i - 1] * x[a];
      }
      for (std::size_t i = static_cast<std::size_t>(k); i < p.size(); ++i) {
        Rational falling = 1;
        for (int j = 0; j < k; ++j) {
          falling *= static_cast<long long>(i) - j;
        }
        sum += p[i] * falling * powers[i - static_cast<std::size_t>(k)];
      }
      return sum;
    };
    std::map<JetVariable, Rational> jets;
    for (const auto& v : needed) {
      Rational prod = 1;
      for (int a = 0; a < dimension; ++a) {
        prod *= factor_derivative(static_cast<std::size_t>(a), v.count(a));
      }
      jets[v] = (v.order() == 0 ? Rational(1) : Rational(0)) + prod;
    }
    if (jets[JetVariable()] == 0) {
      continue;
    }
    std::map<std::string, Rational> constants;
    for (const auto& s : q.symbols()) {
      constants[s] = detail::random_rational(rng, 1, 30, 7);
    }
    try {
      const Rational value = expr::evaluate_exact(report.residual, jets, constants);
      ++report.exact_checks;
      if (value != 0) {
        ++report.exact_nonzero;
      }
    } catch (const expr::EvaluationError&) {
      // A rational point hit a pole of an inverse-sum factor; draw again.
    }
  }

  report.passes = report.max_relative_residual <= opt.tolerance && report.exact_nonzero == 0;
  return report;
}

}  // namespace qpot::elcheck
