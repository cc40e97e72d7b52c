#pragma once

#include "wickfield/polynomial.hpp"
#include "wickfield/spectrum.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace wickfield {

/// Square L x L matrix of polynomials in d variables, row-major.
class PolyMatrix {
 public:
  PolyMatrix(int size, int dimension);
  PolyMatrix(int size, int dimension, std::vector<Polynomial> entries);

  static PolyMatrix identity(int size, int dimension);
  static PolyMatrix scalar(const Polynomial& p);

  int size() const noexcept { return size_; }
  int dimension() const noexcept { return dimension_; }

  const Polynomial& operator()(int row, int col) const { return entries_.at(index(row, col)); }
  Polynomial& operator()(int row, int col) { return entries_.at(index(row, col)); }
  const std::vector<Polynomial>& entries() const noexcept { return entries_; }

  int degree() const;

  /// Entrywise evaluation, row-major L*L values.
  std::vector<Complex> evaluate(std::span<const Complex> k) const;
  std::vector<Complex> evaluate(std::span<const double> k) const;

  friend bool operator==(const PolyMatrix&, const PolyMatrix&) = default;

 private:
  std::size_t index(int row, int col) const;

  int size_;
  int dimension_;
  std::vector<Polynomial> entries_;
};

/// Entrywise k0 -> i k0; maps Q_E to Q_M.
PolyMatrix wick_rotate(const PolyMatrix& qe);

enum class RepresentationKind { Trivial, Vector };

/// SO(d) representation tau: trivial (L = 1) or defining vector (L = d).
struct Representation {
  RepresentationKind kind = RepresentationKind::Trivial;
  int dimension = 2;

  int size() const { return kind == RepresentationKind::Trivial ? 1 : dimension; }
  /// tau(rotation) for a row-major d x d rotation matrix.
  std::vector<double> apply(std::span<const double> rotation) const;
};

/// Row-major d x d rotation: uniform angle for d = 2, uniform axis + angle for d = 3.
std::vector<double> sample_rotation(int dimension, std::mt19937_64& rng);

struct CovarianceReport {
  bool pass = false;
  double max_residual = 0.0;
  double scale = 0.0;
};

/// Compares tau(R) Q(k) tau(R)^{-1} with Q(R k) at `samples` random (R, k).
CovarianceReport check_covariance(const PolyMatrix& qe, const Representation& rep, int samples,
                                  std::uint64_t seed = 1);

/// Per mass: true iff |k|^2 + m_l^2 does not divide every entry of Q_E.
std::vector<bool> is_prime_wrt_factors(const PolyMatrix& qe, const MassSpectrum& spectrum);

/// Order-n joint cumulant C^{b1..bn} of the noise, dense storage of L^n entries.
class NoiseCumulantTensor {
 public:
  NoiseCumulantTensor(int order, int size);

  /// Sets an entry and all its index permutations.
  void set_symmetric(const std::vector<int>& indices, Complex value);
  /// C^{b1..bn} = value if all indices agree, else 0.
  static NoiseCumulantTensor diagonal(int order, int size, Complex value);

  int order() const noexcept { return order_; }
  int size() const noexcept { return size_; }
  Complex operator()(std::span<const int> indices) const { return values_.at(flat(indices)); }
  const std::vector<Complex>& values() const noexcept { return values_; }
  bool is_symmetric(double tol = 0.0) const;

 private:
  std::size_t flat(std::span<const int> indices) const;

  int order_;
  int size_;
  std::vector<Complex> values_;
};

/// Q_{n; a1..an}(k_1..k_n) = C^{b1..bn} prod_r Q(k_r)_{b_r a_r}, spin metric delta.
class TensorPolynomial {
 public:
  TensorPolynomial(PolyMatrix q, NoiseCumulantTensor c);

  int order() const noexcept { return cumulant_.order(); }
  int size() const noexcept { return matrix_.size(); }
  int dimension() const noexcept { return matrix_.dimension(); }
  const PolyMatrix& matrix() const noexcept { return matrix_; }
  const NoiseCumulantTensor& cumulant() const noexcept { return cumulant_; }

  /// momenta: n consecutive d-vectors.
  Complex evaluate(std::span<const int> components, std::span<const Complex> momenta) const;
  /// All L^n components, last index fastest.
  std::vector<Complex> evaluate_all(std::span<const Complex> momenta) const;

 private:
  PolyMatrix matrix_;
  NoiseCumulantTensor cumulant_;
};

TensorPolynomial tensor_assemble(const PolyMatrix& qe, const NoiseCumulantTensor& c, int order);

}  // namespace wickfield
