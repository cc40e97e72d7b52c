#pragma once

#include "wickfield/green.hpp"
#include "wickfield/poly_matrix.hpp"
#include "wickfield/spectrum.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace wickfield {

enum class ShellKind {
  DeltaMinus,  ///< theta(-k0) delta^{(order)}(k^2 - m^2)
  DeltaPlus,   ///< theta(+k0) delta^{(order)}(k^2 - m^2)
  Propagator,  ///< (k^2 - m^2)^{-order}
  Fixed,       ///< no factor; momentum set by conservation
};

const char* to_string(ShellKind kind);

/// One slot of a Wightman term.
struct ShellFactor {
  ShellKind kind = ShellKind::DeltaMinus;
  int order = 0;  ///< derivative order for deltas, power for the propagator
  std::size_t mass_index = 0;
  int slot = 0;  ///< 0-based momentum slot

  friend bool operator==(const ShellFactor&, const ShellFactor&) = default;
};

/// A single summand of the Fourier-transformed truncated Wightman function.
/// Every term carries delta(k_1 + ... + k_n).
struct WightmanTerm {
  int n = 2;
  std::vector<ShellFactor> factors;
  int propagator_slot = -1;  ///< -1 for pure-delta terms
  std::complex<double> coefficient{1.0, 0.0};
  /// Extra weight (4(|k_1|^2 + m^2))^{-weight_power} of the printed equal-mass formula.
  int weight_power = 0;
  std::shared_ptr<const TensorPolynomial> prefactor;
  bool conservation = true;

  /// The slot whose momentum is fixed by conservation.
  int determined_slot() const;
};

enum class EqualMassForm {
  Semigroup,  ///< coalescence limit of the generic formula; numerically validated
  AsPrinted,  ///< the printed two-point formula, weights read verbatim
};

struct BuildOptions {
  int dimension = 2;
  EqualMassForm equal_mass = EqualMassForm::Semigroup;
  std::shared_ptr<const TensorPolynomial> prefactor;
};

/// All terms of the sum over mass indices, powers and the propagator slot.
std::vector<WightmanTerm> build_wightman_terms(const MassSpectrum& spectrum, const PartialFractionTable& pf, int n,
                                               const BuildOptions& options = {});

/// True iff every momentum configuration allowed by the term lies in the
/// spectral cone: q_j = k_1 + ... + k_j in the closed backward cone, j < n.
bool check_spectral_support(const WightmanTerm& term, const MassSpectrum& spectrum, int samples,
                            std::uint64_t seed = 1);

/// Pure mass-shell two-point terms sum_s lambda_s delta^-_{m_s}(k_1) delta(k_1 + k_2).
std::vector<WightmanTerm> two_point_replacement(const MassSpectrum& spectrum, const std::vector<double>& lambdas,
                                                std::shared_ptr<const TensorPolynomial> prefactor = nullptr);

struct LaplaceOptions {
  /// Global (2pi)-normalization factor; fitted once and then held fixed.
  double normalization = 1.0;
  std::vector<int> components;  ///< spin components for the prefactor, all 0 if empty
  int max_level = 2;            ///< quadrature refinements
  double relative_tolerance = 1e-4;
  double tail = 36.0;  ///< exp(-tail) truncation of the energy damping
};

struct LaplaceResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Fourier-Laplace transform of the term sum at time-ordered Euclidean points.
LaplaceResult laplace_eval(const std::vector<WightmanTerm>& terms, const MassSpectrum& spectrum,
                           std::span<const EuclideanPoint> points, int dimension, const LaplaceOptions& options = {});

/// Ratio schwinger / laplace on the simple two-point reference configuration
/// (single simple mass, points (0, 0) and (1, 0)); the value to freeze as normalization.
double fit_laplace_normalization(const MassSpectrum& spectrum, int dimension);

}  // namespace wickfield
