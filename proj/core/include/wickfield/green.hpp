#pragma once

#include "wickfield/spectrum.hpp"

#include <functional>
#include <span>
#include <vector>

namespace wickfield {

/// Point of R^d, d in {2, 3}.
using EuclideanPoint = std::vector<double>;

/// (mass index l, power j) for one argument slot of a truncated Schwinger function.
struct SlotAssignment {
  std::size_t mass_index = 0;
  int power = 1;
};
using SchwingerAssignment = std::vector<SlotAssignment>;

enum class GreenMethod {
  Bessel,            ///< closed Bessel-K form
  FiniteDifference,  ///< -1/(j-1) d/dm^2 recursion by central differences
};

/// Kernel of (-Delta + m^2)^{-j} at x in d dimensions (Fourier convention (2pi)^{-d}).
/// Throws SingularPoint for |x| < 1e-8 and Unsupported for d outside {2, 3}.
double green_function(double mass, int power, std::span<const double> x, int dimension,
                      GreenMethod method = GreenMethod::Bessel);

/// Same kernel as a function of the radius |x|.
double green_radial(double mass, int power, double radius, int dimension);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  int level = 0;
};

struct SchwingerOptions {
  double relative_tolerance = 1e-6;
  int max_level = 3;  ///< refinement budget
};

/// int_{R^d} prod_r (-Delta + m_{l_r}^2)^{-j_r}(x_r - x) dx by adaptive refinement.
/// The estimate must reach max(relative_tolerance, 1e-4) relative error or
/// QuadratureFailure is thrown.
QuadratureResult schwinger_truncated(const MassSpectrum& spectrum, const SchwingerAssignment& assignment,
                                     std::span<const EuclideanPoint> points, int dimension,
                                     const SchwingerOptions& options = {});

/// Full moment from truncated ones: sum over set partitions of {0..n-1} of the
/// product of truncated values per block.
double assemble_full_moment(int n, const std::function<double(const std::vector<int>&)>& truncated);

/// All set partitions of {0..n-1}, blocks in increasing order.
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

}  // namespace wickfield
