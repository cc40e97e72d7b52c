#pragma once

#include <cmath>
#include <vector>

namespace wickfield {

template <typename Value>
Value mixed_derivative(const std::function<Value(std::span<const double>)>& f, std::span<const double> point,
                       std::span<const int> orders, std::span<const double> steps, int extra) {
  const std::size_t dims = point.size();
  std::vector<std::size_t> active;
  std::vector<std::vector<double>> stencils;
  std::vector<int> halves;
  for (std::size_t i = 0; i < dims; ++i) {
    if (orders[i] == 0) continue;
    active.push_back(i);
    const int half = (orders[i] + 1) / 2 + extra;
    halves.push_back(half);
    stencils.push_back(central_stencil(orders[i], half));
  }
  if (active.empty()) return f(point);

  std::vector<double> x(point.begin(), point.end());
  std::vector<int> offset(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) offset[a] = -halves[a];
  Value acc{};
  for (;;) {
    double weight = 1.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      weight *= stencils[a][static_cast<std::size_t>(offset[a] + halves[a])];
      x[i] = point[i] + offset[a] * steps[i];
    }
    if (weight != 0.0) acc += weight * f(x);
    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      if (++offset[a] <= halves[a]) break;
      offset[a] = -halves[a];
    }
    if (a == active.size()) break;
  }
  for (std::size_t a = 0; a < active.size(); ++a) acc /= std::pow(steps[active[a]], orders[active[a]]);
  return acc;
}

}  // namespace wickfield
