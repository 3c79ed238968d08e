#pragma once

// The quantum-potential hierarchy on grid functions,
//   Q_{2n}[R] = A_{2n} (lap^n R) / R,   A_{2n} = a_{2n} (-1)^n eps0 (hbar / m c)^{2n},
// and truncated sums of it.

#include "qpot/coeffs.hpp"
#include "qpot/config.hpp"
#include "qpot/grid.hpp"
#include "qpot/units.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpot {

struct PotentialTerm {
  /// Even order 2n.
  int order = 0;
  /// Dimensionless a_{2n}; ignored when `explicit_prefactor` is set.
  Rational a = 0;
  /// Dimensional A_{2n} in energy * length^{2n}, bypassing the relativistic form.
  std::optional<double> explicit_prefactor;

  int n() const { return order / 2; }
};

struct QuantumPotentialSpec {
  std::vector<PotentialTerm> terms;
  int truncation_order = 0;
  /// Terms with n >= 1 are set to zero where |R| < floor * max|R|.
  double regularization_floor = 1e-8;

  /// Relativistic coefficients for the given orders.
  static QuantumPotentialSpec relativistic(const std::vector<int>& orders, double floor = 1e-8) {
    QuantumPotentialSpec s;
    for (int order : orders) {
      if (order < 0 || order % 2 != 0) {
        throw std::invalid_argument("potential orders must be even and non-negative");
      }
      s.terms.push_back({order, coeffs::a2n(order / 2), std::nullopt});
    }
    s.regularization_floor = floor;
    s.truncation_order = orders.empty() ? 0 : *std::max_element(orders.begin(), orders.end());
    s.validate();
    return s;
  }

  /// Relativistic terms Q_0 (optional), Q_2, ..., Q_{2 max_n}.
  static QuantumPotentialSpec relativistic_through(int max_n, bool include_rest = true) {
    std::vector<int> orders;
    for (int n = include_rest ? 0 : 1; n <= max_n; ++n) {
      orders.push_back(2 * n);
    }
    return relativistic(orders);
  }

  void validate() const {
    std::set<int> seen;
    for (const auto& t : terms) {
      if (t.order < 0 || t.order % 2 != 0) {
        throw std::invalid_argument("potential orders must be even and non-negative");
      }
      if (!seen.insert(t.order).second) {
        throw std::invalid_argument("duplicate potential order " + std::to_string(t.order));
      }
      if (t.order > truncation_order) {
        throw std::invalid_argument("term order exceeds truncation order");
      }
    }
    if (!(regularization_floor >= 0.0)) {
      throw std::invalid_argument("regularization floor must be non-negative");
    }
  }

  const PotentialTerm* find(int order) const {
    for (const auto& t : terms) {
      if (t.order == order) {
        return &t;
      }
    }
    return nullptr;
  }

  int max_order() const {
    int m = 0;
    for (const auto& t : terms) {
      m = std::max(m, t.order);
    }
    return m;
  }
};

/// A_{2n} with Q_{2n} = A_{2n} lap^n R / R. A_2 = -hbar^2 / 2m, A_4 = -hbar^4 / (8 m^3 c^2).
inline double relativistic_prefactor(int n, const PhysicalParams& params) {
  const double lam = params.reduced_compton_wavelength();
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  return to_double(coeffs::a2n(n)) * sign * params.rest_energy() * std::pow(lam, 2 * n);
}

inline double prefactor(const PotentialTerm& term, const PhysicalParams& params) {
  if (term.explicit_prefactor) {
    return *term.explicit_prefactor;
  }
  const double lam = params.reduced_compton_wavelength();
  const double sign = term.n() % 2 == 0 ? 1.0 : -1.0;
  return to_double(term.a) * sign * params.rest_energy() * std::pow(lam, term.order);
}

namespace detail {

inline grid::GridFunction q_from_term(const grid::GridFunction& R, const PotentialTerm& term,
                                      const PhysicalParams& params, double floor) {
  const double A = prefactor(term, params);
  if (term.order == 0) {
    return grid::GridFunction(R.grid, std::vector<double>(R.size(), A));
  }
  const auto lap_n = grid::power_laplacian(R, term.n());
  const double cutoff = floor * R.max_abs();
  std::vector<double> out(R.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = R.values[i];
    if (std::abs(r) > cutoff && r != 0.0) {
      out[i] = A * lap_n.values[i] / r;
    }
  }
  return grid::GridFunction(R.grid, std::move(out));
}

}  // namespace detail

/// Q_{2n}[R] for a term present in `spec`.
inline grid::GridFunction eval_q2n(const grid::GridFunction& R, int n, const PhysicalParams& params,
                                   const QuantumPotentialSpec& spec) {
  const PotentialTerm* term = spec.find(2 * n);
  if (term == nullptr) {
    throw std::invalid_argument("order " + std::to_string(2 * n) + " is not in the potential spec");
  }
  return detail::q_from_term(R, *term, params, spec.regularization_floor);
}

/// Sum of every term in `spec`; zero for an empty spec.
inline grid::GridFunction eval_complete_q(const grid::GridFunction& R, const PhysicalParams& params,
                                          const QuantumPotentialSpec& spec) {
  if (spec.truncation_order < 0) {
    throw std::invalid_argument("truncation order must be non-negative");
  }
  std::vector<double> sum(R.size(), 0.0);
  for (const auto& term : spec.terms) {
    const auto q = detail::q_from_term(R, term, params, spec.regularization_floor);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += q.values[i];
    }
  }
  return grid::GridFunction(R.grid, std::move(sum));
}

/// tau^2 (lambda_c / 2L)^2 = (hbar k / m c)^2 for the box mode k = tau pi / L.
inline double box_expansion_parameter(double L, int tau, const PhysicalParams& params) {
  if (!(L > 0.0) || tau < 1) {
    throw std::invalid_argument("box mode needs L > 0 and tau >= 1");
  }
  const double x = tau * params.compton_wavelength() / (2.0 * L);
  return x * x;
}

/// Q_{2(n+1)} / Q_{2n} on the box mode sin(tau pi x / L), relativistic coefficients.
inline double term_ratio(double L, int tau, int n, const PhysicalParams& params) {
  if (n < 0) {
    throw std::invalid_argument("term_ratio: n must be non-negative");
  }
  return to_double(coeffs::a2n(n + 1) / coeffs::a2n(n)) * box_expansion_parameter(L, tau, params);
}

/// Potential spec and unit preset read from key-value text:
///   units = electron | proton | natural
///   orders = 0, 2, 4
///   coefficients = relativistic
///   A4 = -1.5e-3            (optional explicit prefactor for one order)
///   truncation = 4
///   floor = 1e-8
struct SpecFile {
  QuantumPotentialSpec spec;
  PhysicalParams params = PhysicalParams::electron();
  std::string units = "electron";
};

inline SpecFile spec_from_config(const config::KeyValues& kv) {
  SpecFile out;
  out.units = kv.get("units", "electron");
  try {
    out.params = PhysicalParams::preset(out.units);
  } catch (const std::exception&) {
    throw kv.error_at("units", "unknown units preset '" + out.units + "'");
  }
  const std::string source = kv.get("coefficients", "relativistic");
  if (source != "relativistic" && source != "explicit") {
    throw kv.error_at("coefficients", "coefficients must be 'relativistic' or 'explicit'");
  }
  const auto orders = kv.get_int_list("orders", {2});
  for (long long order : orders) {
    if (order < 0 || order % 2 != 0 || order > 40) {
      throw kv.error_at("orders", "orders must be even integers in [0, 40]");
    }
    PotentialTerm term{static_cast<int>(order), coeffs::a2n(static_cast<int>(order / 2)), std::nullopt};
    const std::string key = "A" + std::to_string(order);
    if (kv.has(key)) {
      term.explicit_prefactor = kv.get_double(key, 0.0);
    } else if (source == "explicit") {
      throw kv.error_at("coefficients", "explicit coefficients need '" + key + "'");
    }
    out.spec.terms.push_back(term);
  }
  out.spec.truncation_order = static_cast<int>(kv.get_int("truncation", out.spec.max_order()));
  out.spec.regularization_floor = kv.get_double("floor", 1e-8);
  try {
    out.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(e.what());
  }
  return out;
}

}  // namespace qpot
