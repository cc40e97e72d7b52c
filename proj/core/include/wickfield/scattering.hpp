#pragma once

#include "wickfield/poly_matrix.hpp"
#include "wickfield/spectrum.hpp"
#include "wickfield/wightman.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace wickfield {

/// Momentum-space packet on the positive-energy shell of one species, in 1+1 dimensions:
/// scale * exp(-(k1 - center)^2 / (2 width^2)) * bump((k^2 - m^2) / epsilon) * exp(-i k1 position)
/// times the polarization vector.
struct WavePacket {
  std::size_t species = 0;
  double mass = 1.0;
  double center = 0.0;
  double width = 0.5;
  double epsilon = 0.3;
  double position = 0.0;  ///< spatial offset at t = 0
  std::vector<std::complex<double>> polarization{1.0};
  std::complex<double> scale{1.0, 0.0};

  /// Scalar profile at (k0, k1); zero outside the support window.
  std::complex<double> profile(double k0, double k1) const;
  /// Rapidity interval outside which the Gaussian factor is below exp(-32).
  std::pair<double, double> rapidity_range() const;
  /// L2 norm of the on-shell profile with measure dk1 / (2 omega).
  double norm() const;
};

/// Smooth bump exp(1 - 1/(1 - x^2)) on (-1, 1), equal to 1 at 0.
double bump(double x);

WavePacket make_packet(const MassSpectrum& spectrum, std::size_t species, double center, double width,
                       double epsilon, std::vector<std::complex<double>> polarization = {1.0});

enum class ChannelKind { InOut, InIn, OutOut };

/// Slots 0..r-1 form the first group ("in" for InOut), slots r..n-1 the second.
struct Channel {
  int r = 1;
  ChannelKind kind = ChannelKind::InOut;
};

const char* to_string(ChannelKind kind);

/// Optional spin structure: Q_{M,n} contracted with the packet polarizations.
struct ScatteringModel {
  MassSpectrum spectrum;
  PartialFractionTable pf;
  std::vector<double> lambdas;  ///< two-point weights, one per mass
  std::shared_ptr<const TensorPolynomial> prefactor;

  explicit ScatteringModel(MassSpectrum s, std::vector<double> lambdas = {},
                           std::shared_ptr<const TensorPolynomial> prefactor = nullptr);
};

/// Terms entering scattering: the two-point replacement for n = 2, the full sum otherwise.
std::vector<WightmanTerm> scattering_terms(const ScatteringModel& model, int n);

struct OverlapOptions {
  int outer_panels = 24;
  int points = 16;
  double stencil_step = 3e-4;  ///< relative m^2 step for higher-order poles
};

/// Smeared truncated Wightman function at finite time t (principal value at the propagator pole).
std::complex<double> finite_time_overlap(const ScatteringModel& model, const std::vector<WightmanTerm>& terms,
                                         const std::vector<WavePacket>& packets, const Channel& channel, double t,
                                         const OverlapOptions& options = {});

/// Closed-form t -> infinity limit. Requires simple poles (DivergentTheory otherwise).
std::complex<double> scattering_amplitude(const ScatteringModel& model, const std::vector<WavePacket>& packets,
                                          const Channel& channel, const OverlapOptions& options = {});

struct AmplitudeResult {
  std::complex<double> value;
  bool converged = false;
  double fitted_r = 0.0;
  double residual = 0.0;
  std::vector<double> t_grid;
  std::vector<std::complex<double>> overlaps;
  int recentered = 0;  ///< packet re-centering attempts used
};

std::vector<double> default_t_grid();

/// Fits log|O(t)| against log t on the tail half of the grid.
AmplitudeResult divergence_scan(const ScatteringModel& model, std::vector<WavePacket> packets, const Channel& channel,
                                const std::vector<double>& t_grid, std::uint64_t seed = 1,
                                const OverlapOptions& options = {});

}  // namespace wickfield
