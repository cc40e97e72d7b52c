#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wickfield {

/// One pole of the inverse symbol: factor (|k|^2 + mass^2)^multiplicity.
struct Pole {
  double mass = 1.0;
  int multiplicity = 1;
};

/// Poles of D^{-1} with positive, pairwise distinct masses.
class MassSpectrum {
 public:
  /// Masses closer than this are treated as coincident.
  static constexpr double kMassSeparation = 1e-9;

  explicit MassSpectrum(std::vector<Pole> poles);

  std::size_t size() const noexcept { return poles_.size(); }
  const Pole& operator[](std::size_t l) const { return poles_[l]; }
  const std::vector<Pole>& poles() const noexcept { return poles_; }

  double mass(std::size_t l) const { return poles_.at(l).mass; }
  double mass_squared(std::size_t l) const { return poles_.at(l).mass * poles_.at(l).mass; }
  int multiplicity(std::size_t l) const { return poles_.at(l).multiplicity; }

  int total_multiplicity() const;
  double min_mass() const;
  bool all_simple() const;

  /// 1 / prod_l (x + m_l^2)^{nu_l}
  double inverse_denominator(double x) const;

 private:
  std::vector<Pole> poles_;
};

/// Polynomial degree bound 2 (sum nu_l - 1) for the entries of Q_E.
int kappa(const MassSpectrum& spectrum);

/// Coefficients b_{lj} of sum_l sum_j b_{lj} / (x + m_l^2)^j.
class PartialFractionTable {
 public:
  PartialFractionTable() = default;
  explicit PartialFractionTable(std::vector<std::vector<double>> b) : b_(std::move(b)) {}
  /// Coefficients as unevaluated sums hi + lo; evaluate() uses both parts.
  PartialFractionTable(std::vector<std::vector<double>> hi, std::vector<std::vector<double>> lo)
      : b_(std::move(hi)), lo_(std::move(lo)) {}

  /// b(l, j) with 1-based power j, 1 <= j <= nu_l.
  double operator()(std::size_t l, int j) const { return b_.at(l).at(static_cast<std::size_t>(j - 1)); }
  std::size_t size() const noexcept { return b_.size(); }
  const std::vector<std::vector<double>>& rows() const noexcept { return b_; }

  /// Evaluates the partial-fraction sum at x in extended precision.
  double evaluate(const MassSpectrum& spectrum, double x) const;

  friend bool operator==(const PartialFractionTable&, const PartialFractionTable&) = default;

 private:
  std::vector<std::vector<double>> b_;
  std::vector<std::vector<double>> lo_;
};

PartialFractionTable partial_fractions(const MassSpectrum& spectrum);

using Rational = boost::rational<std::int64_t>;

struct ExactPole {
  std::int64_t mass_squared = 1;
  int multiplicity = 1;
};

/// Exact rational expansion for integer squared masses; used for golden values.
std::vector<std::vector<Rational>> partial_fractions_exact(const std::vector<ExactPole>& poles);

}  // namespace wickfield
