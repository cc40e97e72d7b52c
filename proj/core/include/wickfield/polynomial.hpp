#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wickfield {

using Complex = std::complex<double>;

/// Exponent multi-index over k0..k{d-1}, ordered graded-lexicographically.
struct Monomial {
  std::vector<std::uint16_t> exponents;

  int degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded-lex: lower total degree first; within a degree, larger power of k0 first.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Multivariate polynomial with complex coefficients in a fixed number of variables.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Complex, GradedLexLess>;

  /// Coefficients below this magnitude are dropped after arithmetic.
  static constexpr double kDropThreshold = 1e-14;
  static constexpr int kMaxExponent = 64;

  explicit Polynomial(int variables = 1);

  static Polynomial constant(int variables, Complex value);
  static Polynomial variable(int variables, int index);
  /// sum_i k_i^2 + shift
  static Polynomial squared_norm(int variables, double shift = 0.0);

  int variables() const noexcept { return variables_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int degree() const;
  double max_abs_coefficient() const;

  /// Adds c * monomial; drops the term if the result is negligible.
  void add_term(const Monomial& m, Complex c);
  Complex coefficient(const Monomial& m) const;

  Complex evaluate(std::span<const Complex> point) const;
  Complex evaluate(std::span<const double> point) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(Complex s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
  friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
  Polynomial operator-() const;

  Polynomial pow(int exponent) const;

  /// Substitutes k_v -> i k_v.
  Polynomial rotate_variable(int v) const;

  /// Remainder of division by k0^2 + rest, where rest must not involve k0.
  /// Reduces every k0^a with a >= 2, so the result has degree < 2 in k0.
  Polynomial remainder_by_k0_square(const Polynomial& rest) const;

  /// Canonical text: graded-lex order, 17 significant digits.
  std::string to_string() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  int variables_;
  TermMap terms_;
};

/// Parses an arithmetic expression in k0..k{d-1} (and the imaginary unit `i`).
/// Throws SyntaxError, or Error with UnknownVariable / ExponentOverflow.
Polynomial parse_poly(std::string_view text, int dimension);

}  // namespace wickfield
