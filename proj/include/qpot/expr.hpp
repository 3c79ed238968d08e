#pragma once

// Expressions in R and its spatial derivatives ("jet variables").
//
// Every Expression is kept in a canonical form: a sorted sum of terms, each a
// rational coefficient times a product of atoms raised to non-zero integer
// powers. Atoms are jet variables, named constants, or the inverse of a
// multi-term sum (normalized to leading coefficient one). Equal Laurent
// polynomials in the jets therefore compare structurally equal.

#include "qpot/rational.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpot::expr {

inline constexpr int max_spatial_dimension = 3;
/// Axis index reserved for time derivatives, which Q may not depend on.
inline constexpr int time_axis = 3;

class EvaluationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// R differentiated along a multiset of axes, stored sorted.
class JetVariable {
public:
  JetVariable() = default;

  explicit JetVariable(std::vector<int> axes) : axes_(std::move(axes)) {
    for (int a : axes_) {
      if (a < 0 || a > time_axis) {
        throw std::invalid_argument("JetVariable: axis out of range");
      }
    }
    std::sort(axes_.begin(), axes_.end());
  }

  /// Convenience for the 1-D jet R_{x...x} of the given order.
  static JetVariable along_x(int order) { return JetVariable(std::vector<int>(static_cast<std::size_t>(order), 0)); }

  const std::vector<int>& axes() const { return axes_; }
  int order() const { return static_cast<int>(axes_.size()); }
  int count(int axis) const { return static_cast<int>(std::count(axes_.begin(), axes_.end(), axis)); }
  bool has_time() const { return count(time_axis) > 0; }

  JetVariable differentiate(int axis) const {
    auto next = axes_;
    next.push_back(axis);
    return JetVariable(std::move(next));
  }

  std::string name() const {
    if (axes_.empty()) {
      return "R";
    }
    std::string s = "R_";
    for (int a : axes_) {
      s += "xyzt"[a];
    }
    return s;
  }

  friend bool operator==(const JetVariable&, const JetVariable&) = default;
  friend std::strong_ordering operator<=>(const JetVariable& a, const JetVariable& b) {
    if (auto c = a.order() <=> b.order(); c != 0) {
      return c;
    }
    return a.axes_ <=> b.axes_;
  }

private:
  std::vector<int> axes_;
};

class Expression;

struct Atom {
  enum class Kind : int { symbol = 0, jet = 1, inverse_sum = 2 };
  Kind kind = Kind::jet;
  JetVariable jet;
  std::string symbol;
  std::shared_ptr<const Expression> inner;  // only for inverse_sum
};

struct Factor {
  Atom atom;
  int exponent;
};

using Monomial = std::vector<Factor>;

struct Term {
  Rational coefficient;
  Monomial monomial;
};

int compare(const Expression& a, const Expression& b);

inline int compare(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) {
    return a.kind < b.kind ? -1 : 1;
  }
  switch (a.kind) {
    case Atom::Kind::jet: {
      auto c = a.jet <=> b.jet;
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Atom::Kind::symbol:
      return a.symbol.compare(b.symbol) < 0 ? -1 : (a.symbol == b.symbol ? 0 : 1);
    case Atom::Kind::inverse_sum:
      return compare(*a.inner, *b.inner);
  }
  return 0;
}

inline int compare(const Monomial& a, const Monomial& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i].atom, b[i].atom); c != 0) {
      return c;
    }
    if (a[i].exponent != b[i].exponent) {
      return a[i].exponent < b[i].exponent ? -1 : 1;
    }
  }
  if (a.size() == b.size()) {
    return 0;
  }
  return a.size() < b.size() ? -1 : 1;
}

inline Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].atom, b[j].atom) < 0)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || compare(a[i].atom, b[j].atom) > 0) {
      out.push_back(b[j++]);
    } else {
      const int e = a[i].exponent + b[j].exponent;
      if (e != 0) {
        out.push_back({a[i].atom, e});
      }
      ++i;
      ++j;
    }
  }
  return out;
}

/// Immutable canonical expression; see the file comment for the normal form.
class Expression {
public:
  /// The zero expression.
  Expression() = default;

  static Expression constant(const Rational& value) {
    Expression e;
    if (value != 0) {
      e.terms_.push_back({value, {}});
    }
    return e;
  }
  static Expression constant(long long value) { return constant(Rational(value)); }

  static Expression symbol(const std::string& name) {
    Atom a;
    a.kind = Atom::Kind::symbol;
    a.symbol = name;
    return from_atom(std::move(a));
  }

  static Expression jet(const JetVariable& v) {
    Atom a;
    a.kind = Atom::Kind::jet;
    a.jet = v;
    return from_atom(std::move(a));
  }

  static Expression from_atom(Atom a, int exponent = 1) {
    Expression e;
    e.terms_.push_back({Rational(1), Monomial{{std::move(a), exponent}}});
    return e;
  }

  static Expression from_term(const Rational& coefficient, Monomial m) {
    return from_terms({Term{coefficient, std::move(m)}});
  }

  static Expression from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return compare(a.monomial, b.monomial) < 0; });
    Expression e;
    for (auto& t : terms) {
      if (!e.terms_.empty() && compare(e.terms_.back().monomial, t.monomial) == 0) {
        e.terms_.back().coefficient += t.coefficient;
        if (e.terms_.back().coefficient == 0) {
          e.terms_.pop_back();
        }
      } else if (t.coefficient != 0) {
        e.terms_.push_back(std::move(t));
      }
    }
    return e;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// True for a (possibly zero) rational constant without symbols or jets.
  bool is_rational_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.empty());
  }

  friend Expression operator+(const Expression& a, const Expression& b) {
    std::vector<Term> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return from_terms(std::move(t));
  }

  friend Expression operator-(const Expression& a) {
    Expression e = a;
    for (auto& t : e.terms_) {
      t.coefficient = -t.coefficient;
    }
    return e;
  }

  friend Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

  friend Expression operator*(const Expression& a, const Expression& b) {
    std::vector<Term> t;
    t.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        t.push_back({x.coefficient * y.coefficient, multiply(x.monomial, y.monomial)});
      }
    }
    return from_terms(std::move(t));
  }

  friend Expression operator*(const Rational& s, const Expression& a) { return constant(s) * a; }

  /// Integer power. Negative powers of a multi-term sum become an inverse-sum atom.
  friend Expression pow(const Expression& base, int exponent) {
    if (exponent == 0) {
      if (base.is_zero()) {
        throw EvaluationError("0^0 is undefined");
      }
      return constant(1);
    }
    if (exponent > 0) {
      Expression result = constant(1);
      Expression b = base;
      unsigned k = static_cast<unsigned>(exponent);
      while (k != 0) {
        if (k & 1U) {
          result = result * b;
        }
        k >>= 1U;
        if (k != 0) {
          b = b * b;
        }
      }
      return result;
    }
    if (base.is_zero()) {
      throw EvaluationError("division by an identically zero expression");
    }
    if (base.terms_.size() == 1) {
      const Term& t = base.terms_[0];
      Rational c = 1;
      for (int i = 0; i < -exponent; ++i) {
        c /= t.coefficient;
      }
      Monomial m = t.monomial;
      for (auto& f : m) {
        f.exponent *= exponent;
      }
      return from_term(c, std::move(m));
    }
    const Rational lead = base.terms_.front().coefficient;
    Expression normalized = base;
    for (auto& t : normalized.terms_) {
      t.coefficient /= lead;
    }
    Rational c = 1;
    for (int i = 0; i < -exponent; ++i) {
      c /= lead;
    }
    Atom a;
    a.kind = Atom::Kind::inverse_sum;
    a.inner = std::make_shared<const Expression>(std::move(normalized));
    return from_term(c, Monomial{{std::move(a), exponent}});
  }

  friend Expression operator/(const Expression& a, const Expression& b) { return a * pow(b, -1); }

  friend bool operator==(const Expression& a, const Expression& b) { return compare(a, b) == 0; }

  /// All jet variables, including those inside inverse sums.
  std::set<JetVariable> jet_variables() const {
    std::set<JetVariable> out;
    collect(out, nullptr);
    return out;
  }

  std::set<std::string> symbols() const {
    std::set<std::string> out;
    collect_symbols(out);
    return out;
  }

  int max_jet_order() const {
    int k = -1;
    for (const auto& v : jet_variables()) {
      k = std::max(k, v.order());
    }
    return k;
  }

  std::string to_string() const {
    if (terms_.empty()) {
      return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      Rational c = t.coefficient;
      if (first) {
        if (c < 0) {
          os << "-";
          c = -c;
        }
      } else {
        os << (c < 0 ? " - " : " + ");
        if (c < 0) {
          c = -c;
        }
      }
      first = false;
      bool wrote = false;
      if (c != 1 || t.monomial.empty()) {
        os << to_fraction_string(c);
        wrote = true;
      }
      for (const auto& f : t.monomial) {
        if (wrote) {
          os << "*";
        }
        wrote = true;
        switch (f.atom.kind) {
          case Atom::Kind::jet:
            os << f.atom.jet.name();
            break;
          case Atom::Kind::symbol:
            os << f.atom.symbol;
            break;
          case Atom::Kind::inverse_sum:
            os << "(" << f.atom.inner->to_string() << ")";
            break;
        }
        if (f.exponent != 1) {
          os << "^" << (f.exponent < 0 ? "(" + std::to_string(f.exponent) + ")" : std::to_string(f.exponent));
        }
      }
    }
    return os.str();
  }

private:
  void collect(std::set<JetVariable>& out, std::nullptr_t) const {
    for (const auto& t : terms_) {
      for (const auto& f : t.monomial) {
        if (f.atom.kind == Atom::Kind::jet) {
          out.insert(f.atom.jet);
        } else if (f.atom.kind == Atom::Kind::inverse_sum) {
          f.atom.inner->collect(out, nullptr);
        }
      }
    }
  }

  void collect_symbols(std::set<std::string>& out) const {
    for (const auto& t : terms_) {
      for (const auto& f : t.monomial) {
        if (f.atom.kind == Atom::Kind::symbol) {
          out.insert(f.atom.symbol);
        } else if (f.atom.kind == Atom::Kind::inverse_sum) {
          f.atom.inner->collect_symbols(out);
        }
      }
    }
  }

  std::vector<Term> terms_;
};

inline int compare(const Expression& a, const Expression& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(x[i].monomial, y[i].monomial); c != 0) {
      return c;
    }
    if (x[i].coefficient != y[i].coefficient) {
      return x[i].coefficient < y[i].coefficient ? -1 : 1;
    }
  }
  if (x.size() == y.size()) {
    return 0;
  }
  return x.size() < y.size() ? -1 : 1;
}

/// Applies a derivation defined on jet and symbol atoms to a whole expression
/// (Leibniz rule). An inverse-sum atom stands for its inner sum S, carried with
/// a negative exponent, so d(S^k) = k S^{k-1} dS.
inline Expression derive(const Expression& e, const std::function<Expression(const Atom&)>& on_atom) {
  Expression result;
  for (const auto& t : e.terms()) {
    for (std::size_t i = 0; i < t.monomial.size(); ++i) {
      const Factor& f = t.monomial[i];
      Expression da = f.atom.kind == Atom::Kind::inverse_sum ? derive(*f.atom.inner, on_atom) : on_atom(f.atom);
      if (da.is_zero()) {
        continue;
      }
      Monomial rest = t.monomial;
      rest[i].exponent -= 1;
      if (rest[i].exponent == 0) {
        rest.erase(rest.begin() + static_cast<long>(i));
      }
      result = result + Expression::from_term(t.coefficient * f.exponent, std::move(rest)) * da;
    }
  }
  return result;
}

/// d expr / d v with every jet variable treated as an independent coordinate.
inline Expression partial_wrt_jet(const Expression& e, const JetVariable& v) {
  return derive(e, [&v](const Atom& a) {
    return (a.kind == Atom::Kind::jet && a.jet == v) ? Expression::constant(1) : Expression();
  });
}

/// Total derivative D_axis: R_alpha -> R_{alpha + axis}, constants -> 0.
inline Expression total_derivative(const Expression& e, int axis) {
  if (axis < 0 || axis > time_axis) {
    throw std::invalid_argument("total_derivative: axis out of range");
  }
  return derive(e, [axis](const Atom& a) {
    return a.kind == Atom::Kind::jet ? Expression::jet(a.jet.differentiate(axis)) : Expression();
  });
}

/// D_{a1} D_{a2} ... applied for every axis of the multi-index.
inline Expression total_derivative(const Expression& e, const JetVariable& multi_index) {
  Expression out = e;
  for (int a : multi_index.axes()) {
    out = total_derivative(out, a);
  }
  return out;
}

/// Sum over axes i < dimension of D_i D_i.
inline Expression laplacian(const Expression& e, int dimension) {
  Expression out;
  for (int i = 0; i < dimension; ++i) {
    out = out + total_derivative(total_derivative(e, i), i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Values of jet variables at one point of space.
struct JetPoint {
  int dimension = 1;
  std::map<JetVariable, double> values;
};

using ConstantMap = std::map<std::string, double>;

/// Value of an expression together with the largest magnitude of any summand
/// met while evaluating it, which is the reference scale for cancellation.
struct Evaluation {
  double value = 0.0;
  double scale = 0.0;
};

namespace detail {

template <class T, class FromRational, class JetLookup, class SymbolLookup, class Magnitude>
T eval_impl(const Expression& e, const FromRational& from_rational, const JetLookup& jet_value,
            const SymbolLookup& symbol_value, double* scale, const Magnitude& magnitude) {
  T sum = T(0);
  for (const auto& t : e.terms()) {
    T term = from_rational(t.coefficient);
    for (const auto& f : t.monomial) {
      T base = T(0);
      switch (f.atom.kind) {
        case Atom::Kind::jet:
          base = jet_value(f.atom.jet);
          break;
        case Atom::Kind::symbol:
          base = symbol_value(f.atom.symbol);
          break;
        case Atom::Kind::inverse_sum:
          base = eval_impl<T>(*f.atom.inner, from_rational, jet_value, symbol_value, scale, magnitude);
          break;
      }
      if (f.exponent < 0 && base == T(0)) {
        throw EvaluationError("division by zero evaluating " + e.to_string());
      }
      T p = T(1);
      const int k = f.exponent < 0 ? -f.exponent : f.exponent;
      for (int i = 0; i < k; ++i) {
        p *= base;
      }
      if (f.exponent < 0) {
        term /= p;
      } else {
        term *= p;
      }
    }
    if (scale != nullptr) {
      *scale = std::max(*scale, magnitude(term));
    }
    sum += term;
  }
  return sum;
}

template <class Map>
auto lookup(const Map& m, const typename Map::key_type& key, const std::string& what) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw EvaluationError("unbound " + what);
  }
  return it->second;
}

}  // namespace detail

inline Evaluation evaluate_detailed(const Expression& e, const JetPoint& p, const ConstantMap& constants) {
  Evaluation out;
  out.value = detail::eval_impl<double>(
      e, [](const Rational& q) { return to_double(q); },
      [&p](const JetVariable& v) { return detail::lookup(p.values, v, "jet variable " + v.name()); },
      [&constants](const std::string& s) { return detail::lookup(constants, s, "constant " + s); }, &out.scale,
      [](double x) { return std::abs(x); });
  return out;
}

inline double evaluate(const Expression& e, const JetPoint& p, const ConstantMap& constants = {}) {
  return evaluate_detailed(e, p, constants).value;
}

/// Exact evaluation at a rational jet point.
inline Rational evaluate_exact(const Expression& e, const std::map<JetVariable, Rational>& jets,
                               const std::map<std::string, Rational>& constants = {}) {
  return detail::eval_impl<Rational>(
      e, [](const Rational& q) { return q; },
      [&jets](const JetVariable& v) { return detail::lookup(jets, v, "jet variable " + v.name()); },
      [&constants](const std::string& s) { return detail::lookup(constants, s, "constant " + s); }, nullptr,
      [](const Rational&) { return 0.0; });
}

}  // namespace qpot::expr
