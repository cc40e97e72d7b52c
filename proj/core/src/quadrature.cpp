#include "wickfield/quadrature.hpp"

#include "wickfield/error.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace wickfield {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int points) {
  if (points < 1) throw Error(ErrorKind::InvalidParameter, "Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, compute_gauss_legendre(points)).first;
  return it->second;
}

CompositeRule CompositeRule::on(double a, double b, int panels, int points) {
  const GaussRule& g = gauss_legendre(points);
  CompositeRule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      r.nodes.push_back(lo + 0.5 * h * (g.nodes[i] + 1.0));
      r.weights.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

CompositeRule CompositeRule::graded(double a, double b, int panels, int points, double ratio) {
  const GaussRule& g = gauss_legendre(points);
  CompositeRule r;
  // panel widths proportional to ratio^(panels-1-p), smallest next to a
  double total = 0.0;
  for (int p = 0; p < panels; ++p) total += std::pow(ratio, panels - 1 - p);
  double lo = a;
  for (int p = 0; p < panels; ++p) {
    const double h = (b - a) * std::pow(ratio, panels - 1 - p) / total;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      r.nodes.push_back(lo + 0.5 * h * (g.nodes[i] + 1.0));
      r.weights.push_back(0.5 * h * g.weights[i]);
    }
    lo += h;
  }
  return r;
}

void CompositeRule::append(const CompositeRule& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

std::vector<double> central_stencil(int order, int half) {
  // Fornberg's algorithm on the grid -half..half around 0.
  const int n = 2 * half + 1;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i - half;
  const int m = order;
  std::vector<std::vector<std::vector<double>>> delta(
      static_cast<std::size_t>(m + 1),
      std::vector<std::vector<double>>(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0)));
  auto D = [&](int k, int nn, int v) -> double& {
    return delta[static_cast<std::size_t>(k)][static_cast<std::size_t>(nn)][static_cast<std::size_t>(v)];
  };
  D(0, 0, 0) = 1.0;
  double c1 = 1.0;
  for (int nn = 1; nn < n; ++nn) {
    double c2 = 1.0;
    for (int v = 0; v < nn; ++v) {
      const double c3 = x[static_cast<std::size_t>(nn)] - x[static_cast<std::size_t>(v)];
      c2 *= c3;
      for (int k = 0; k <= std::min(nn, m); ++k) {
        const double prev = (k > 0) ? D(k - 1, nn - 1, v) : 0.0;
        D(k, nn, v) = (x[static_cast<std::size_t>(nn)] * D(k, nn - 1, v) - k * prev) / c3;
      }
    }
    for (int k = 0; k <= std::min(nn, m); ++k) {
      const double prev = (k > 0) ? D(k - 1, nn - 1, nn - 1) : 0.0;
      D(k, nn, nn) = c1 / c2 * (k * prev - x[static_cast<std::size_t>(nn - 1)] * D(k, nn - 1, nn - 1));
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) w[static_cast<std::size_t>(v)] = D(m, n - 1, v);
  return w;
}

}  // namespace wickfield
