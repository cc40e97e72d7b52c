#include "wickfield/polynomial.hpp"

#include "wickfield/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace wickfield {

int Monomial::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(b.exponents.begin(), b.exponents.end(), a.exponents.begin(),
                                      a.exponents.end());
}

Polynomial::Polynomial(int variables) : variables_(variables) {
  if (variables < 1) throw Error(ErrorKind::DimensionMismatch, "polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int variables, Complex value) {
  Polynomial p(variables);
  p.add_term(Monomial{std::vector<std::uint16_t>(static_cast<std::size_t>(variables), 0)}, value);
  return p;
}

Polynomial Polynomial::variable(int variables, int index) {
  if (index < 0 || index >= variables)
    throw Error(ErrorKind::UnknownVariable, "variable k" + std::to_string(index) + " out of range");
  Polynomial p(variables);
  Monomial m{std::vector<std::uint16_t>(static_cast<std::size_t>(variables), 0)};
  m.exponents[static_cast<std::size_t>(index)] = 1;
  p.add_term(m, 1.0);
  return p;
}

Polynomial Polynomial::squared_norm(int variables, double shift) {
  Polynomial p = constant(variables, shift);
  for (int i = 0; i < variables; ++i) {
    Monomial m{std::vector<std::uint16_t>(static_cast<std::size_t>(variables), 0)};
    m.exponents[static_cast<std::size_t>(i)] = 2;
    p.add_term(m, 1.0);
  }
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::max_abs_coefficient() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

void Polynomial::add_term(const Monomial& m, Complex c) {
  if (static_cast<int>(m.exponents.size()) != variables_)
    throw Error(ErrorKind::DimensionMismatch, "monomial arity does not match polynomial");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (std::abs(c) > kDropThreshold) terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) <= kDropThreshold) terms_.erase(it);
}

Complex Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Complex{} : it->second;
}

namespace {

template <typename T>
Complex evaluate_impl(const Polynomial::TermMap& terms, std::span<const T> point, int variables) {
  if (static_cast<int>(point.size()) != variables)
    throw Error(ErrorKind::DimensionMismatch, "evaluation point has wrong dimension");
  Complex sum{};
  for (const auto& [m, c] : terms) {
    Complex term = c;
    for (std::size_t v = 0; v < m.exponents.size(); ++v)
      for (int e = 0; e < m.exponents[v]; ++e) term *= point[v];
    sum += term;
  }
  return sum;
}

}  // namespace

Complex Polynomial::evaluate(std::span<const Complex> point) const {
  return evaluate_impl(terms_, point, variables_);
}

Complex Polynomial::evaluate(std::span<const double> point) const {
  return evaluate_impl(terms_, point, variables_);
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.variables_ != variables_) throw Error(ErrorKind::DimensionMismatch, "polynomial arity mismatch");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.variables_ != variables_) throw Error(ErrorKind::DimensionMismatch, "polynomial arity mismatch");
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  if (rhs.variables_ != variables_) throw Error(ErrorKind::DimensionMismatch, "polynomial arity mismatch");
  Polynomial out(variables_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      Monomial m = ma;
      for (std::size_t v = 0; v < m.exponents.size(); ++v) {
        const int e = m.exponents[v] + mb.exponents[v];
        if (e > kMaxExponent) throw Error(ErrorKind::ExponentOverflow, "exponent exceeds " + std::to_string(kMaxExponent));
        m.exponents[v] = static_cast<std::uint16_t>(e);
      }
      out.add_term(m, ca * cb);
    }
  }
  *this = std::move(out);
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  Polynomial out(variables_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * s);
  *this = std::move(out);
  return *this;
}

Polynomial Polynomial::operator-() const { return *this * Complex(-1.0); }

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw Error(ErrorKind::InvalidParameter, "negative polynomial power");
  if (exponent > kMaxExponent) throw Error(ErrorKind::ExponentOverflow, "exponent exceeds " + std::to_string(kMaxExponent));
  Polynomial result = constant(variables_, 1.0);
  for (int e = 0; e < exponent; ++e) result *= *this;
  return result;
}

Polynomial Polynomial::rotate_variable(int v) const {
  static const Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Polynomial out(variables_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * kIPowers[m.exponents.at(static_cast<std::size_t>(v)) % 4]);
  return out;
}

Polynomial Polynomial::remainder_by_k0_square(const Polynomial& rest) const {
  for (const auto& [m, c] : rest.terms_)
    if (m.exponents[0] != 0) throw Error(ErrorKind::InvalidParameter, "divisor tail must not contain k0");
  const Polynomial minus_rest = -rest;
  // Repeatedly replace k0^2 by -rest, highest powers first.
  Polynomial work = *this;
  Polynomial remainder(variables_);
  while (!work.is_zero()) {
    Polynomial next(variables_);
    for (const auto& [m, c] : work.terms_) {
      if (m.exponents[0] < 2) {
        remainder.add_term(m, c);
        continue;
      }
      Monomial reduced = m;
      reduced.exponents[0] = static_cast<std::uint16_t>(reduced.exponents[0] - 2);
      Polynomial piece(variables_);
      piece.add_term(reduced, c);
      next += piece * minus_rest;
    }
    work = std::move(next);
  }
  return remainder;
}

namespace {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_coefficient(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0) return format_real(c.imag()) + "*i";
  return "(" + format_real(c.real()) + " + " + format_real(c.imag()) + "*i)";
}

}  // namespace

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += format_coefficient(c);
    for (std::size_t v = 0; v < m.exponents.size(); ++v) {
      if (m.exponents[v] == 0) continue;
      out += "*k" + std::to_string(v);
      if (m.exponents[v] > 1) out += "^" + std::to_string(m.exponents[v]);
    }
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dimension_(dimension) {}

  Polynomial parse() {
    Polynomial p = expression();
    skip_space();
    if (pos_ != text_.size()) throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return p;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expression() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    while (accept('*')) acc *= unary();
    return acc;
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) throw SyntaxError("expected non-negative integer exponent", start);
      if (pos_ - start > 6) throw Error(ErrorKind::ExponentOverflow, "exponent too large at position " + std::to_string(start));
      int e = 0;
      std::from_chars(text_.data() + start, text_.data() + pos_, e);
      if (e > Polynomial::kMaxExponent)
        throw Error(ErrorKind::ExponentOverflow, "exponent " + std::to_string(e) + " at position " + std::to_string(start));
      return base.pow(e);
    }
    return base;
  }

  Polynomial primary() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expression();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == 'k') {
      const std::size_t start = pos_++;
      const std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (digits == pos_) throw SyntaxError("expected variable index after 'k'", pos_);
      int index = -1;
      if (pos_ - digits > 4) index = 1 << 20;
      else std::from_chars(text_.data() + digits, text_.data() + pos_, index);
      if (index >= dimension_)
        throw Error(ErrorKind::UnknownVariable, "unknown variable '" + std::string(text_.substr(start, pos_ - start)) +
                                                    "' at position " + std::to_string(start));
      return Polynomial::variable(dimension_, index);
    }
    if (c == 'i' && (pos_ + 1 >= text_.size() || !std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      return Polynomial::constant(dimension_, Complex(0.0, 1.0));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      throw Error(ErrorKind::UnknownVariable, "unknown variable '" + std::string(text_.substr(start, pos_ - start)) +
                                                  "' at position " + std::to_string(start));
    }
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Polynomial number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) throw SyntaxError("malformed number", start);
    return Polynomial::constant(dimension_, value);
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_poly(std::string_view text, int dimension) {
  if (dimension < 1) throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
  return Parser(text, dimension).parse();
}

}  // namespace wickfield
