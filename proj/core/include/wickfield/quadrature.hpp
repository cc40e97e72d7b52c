#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wickfield {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point Gauss-Legendre rule (thread-safe after first use per n).
const GaussRule& gauss_legendre(int points);

/// Composite Gauss-Legendre on [a, b] split into `panels` equal panels.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static CompositeRule on(double a, double b, int panels, int points);
  /// Panels graded geometrically towards `a` with ratio `ratio` (< 1 refines near a).
  static CompositeRule graded(double a, double b, int panels, int points, double ratio);
  /// Appends another rule (e.g. a second interval).
  void append(const CompositeRule& other);
};

/// Weights of a central finite-difference stencil for the derivative of order
/// `order` on the offsets -half..half (in units of the step).
std::vector<double> central_stencil(int order, int half);

/// Mixed partial derivative of f at `point` via tensor-product central stencils.
/// orders[i] = derivative order in coordinate i, steps[i] = step size. Each stencil
/// uses (order + 1) / 2 + extra points on either side.
template <typename Value>
Value mixed_derivative(const std::function<Value(std::span<const double>)>& f, std::span<const double> point,
                       std::span<const int> orders, std::span<const double> steps, int extra = 1);

}  // namespace wickfield

#include "wickfield/detail/mixed_derivative.ipp"
