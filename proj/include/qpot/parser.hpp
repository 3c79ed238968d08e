#pragma once

// Infix grammar for candidate quantum potentials.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' integer | '^' '(' ['-'] integer ')' | '^' '-' integer)?
//   primary := number | 'R' | 'R_' axes | constant
//            | ('dx' | 'dy' | 'dz' | 'lap' | 'lap2') '(' expr ')' | '(' expr ')'
//
// Numbers are read exactly ("0.125" is 1/8, "1e-3" is 1/1000). Named constants
// start with an upper-case letter (A0, A2, C, ...) or are one of hbar, m, c,
// eps0. lap expands to the sum of D_i D_i over the declared dimension.

#include "qpot/expr.hpp"

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qpot::expr {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

  /// Byte offset into the input where the problem was detected.
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

namespace detail {

class Parser {
public:
  Parser(std::string_view text, int dimension) : text_(text), dimension_(dimension) {}

  Expression parse() {
    Expression e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) {
      fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }
  [[noreturn]] void fail_at(const std::string& message, std::size_t at) const { throw ParseError(message, at); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size()) {
      fail(std::string("unexpected end of input, expected '") + c + "'");
    }
    if (text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  Expression parse_expr() {
    Expression e = parse_term();
    for (;;) {
      if (accept('+')) {
        e = e + parse_term();
      } else if (accept('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expression parse_term() {
    Expression e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = e * parse_unary();
      } else if (accept('/')) {
        skip_space();
        const std::size_t at = pos_;
        Expression d = parse_unary();
        if (d.is_zero()) {
          fail_at("division by constant zero", at);
        }
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expression parse_unary() {
    if (accept('-')) {
      return -parse_unary();
    }
    if (accept('+')) {
      return parse_unary();
    }
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    if (!accept('^')) {
      return base;
    }
    skip_space();
    const std::size_t at = pos_;
    bool parenthesized = accept('(');
    bool negative = accept('-');
    skip_space();
    const std::size_t digits_at = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
    if (pos_ == digits_at) {
      if (pos_ >= text_.size()) {
        fail("unexpected end of input, expected integer exponent");
      }
      fail_at("non-integer exponent", at);
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
                                std::isalpha(static_cast<unsigned char>(text_[pos_])) != 0)) {
      fail_at("non-integer exponent", at);
    }
    const int k = std::stoi(std::string(text_.substr(digits_at, pos_ - digits_at)));
    if (parenthesized) {
      expect(')');
    }
    if (base.is_zero() && negative) {
      fail_at("division by constant zero", at);
    }
    return pow(base, negative ? -k : k);
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    BigInt mantissa = 0;
    int scale = 0;
    bool seen_digit = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
      mantissa = mantissa * 10 + (text_[pos_] - '0');
      ++pos_;
      seen_digit = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
        mantissa = mantissa * 10 + (text_[pos_] - '0');
        --scale;
        ++pos_;
        seen_digit = true;
      }
    }
    if (!seen_digit) {
      fail_at("malformed number", start);
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      bool neg = false;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        neg = text_[pos_] == '-';
        ++pos_;
      }
      const std::size_t digits = pos_;
      int exp10 = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
        exp10 = exp10 * 10 + (text_[pos_] - '0');
        ++pos_;
      }
      if (digits == pos_) {
        fail_at("malformed exponent in number", start);
      }
      scale += neg ? -exp10 : exp10;
    }
    BigInt ten_power = 1;
    for (int i = 0; i < std::abs(scale); ++i) {
      ten_power *= 10;
    }
    const Rational value = scale >= 0 ? Rational(mantissa * ten_power) : Rational(mantissa, ten_power);
    return Expression::constant(value);
  }

  int axis_of(char c, std::size_t at) const {
    const std::string axes = "xyz";
    const auto a = axes.find(c);
    if (c == 't') {
      fail_at("time derivatives are not supported in Q", at);
    }
    if (a == std::string::npos) {
      fail_at(std::string("unknown derivative axis '") + c + "'", at);
    }
    if (static_cast<int>(a) >= dimension_) {
      fail_at(std::string("axis '") + c + "' exceeds dimension " + std::to_string(dimension_), at);
    }
    return static_cast<int>(a);
  }

  Expression parse_call(const std::string& name, std::size_t at) {
    expect('(');
    Expression arg = parse_expr();
    expect(')');
    if (name == "lap") {
      return laplacian(arg, dimension_);
    }
    if (name == "lap2") {
      return laplacian(laplacian(arg, dimension_), dimension_);
    }
    return total_derivative(arg, axis_of(name[1], at + 1));
  }

  Expression parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) {
      fail("unexpected end of input");
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) == 0 && c != '_') {
      fail(std::string("unexpected character '") + c + "'");
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(text_.substr(start, pos_ - start));
    if (id == "R") {
      return Expression::jet(JetVariable());
    }
    if (id.rfind("R_", 0) == 0) {
      std::vector<int> axes;
      for (std::size_t i = 2; i < id.size(); ++i) {
        axes.push_back(axis_of(id[i], start + i));
      }
      if (axes.empty()) {
        fail_at("empty derivative subscript", start);
      }
      return Expression::jet(JetVariable(std::move(axes)));
    }
    if (id == "lap" || id == "lap2" || id == "dx" || id == "dy" || id == "dz") {
      return parse_call(id, start);
    }
    if (std::isupper(static_cast<unsigned char>(id[0])) != 0 || id == "hbar" || id == "m" || id == "c" ||
        id == "eps0") {
      return Expression::symbol(id);
    }
    fail_at("unknown identifier '" + id + "'", start);
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a candidate Q written in terms of R, its derivatives and named constants.
inline Expression parse_q_expression(std::string_view text, int dimension) {
  if (dimension < 1 || dimension > max_spatial_dimension) {
    throw std::invalid_argument("parse_q_expression: dimension must be 1, 2 or 3");
  }
  return detail::Parser(text, dimension).parse();
}

}  // namespace qpot::expr
