#include "wickfield/green.hpp"

#include "wickfield/error.hpp"
#include "wickfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace wickfield {

namespace {

constexpr double kSingularRadius = 1e-8;

// K_{n+1/2}(z) = sqrt(pi / 2z) e^{-z} sum_k (n+k)! / (k! (n-k)! (2z)^k)
double bessel_k_half_integer(int n, double z) {
  double sum = 0.0;
  double term = 1.0;  // k = 0
  for (int k = 0; k <= n; ++k) {
    if (k > 0) term *= static_cast<double>((n + k) * (n - k + 1)) / (k * 2.0 * z);
    sum += term;
  }
  return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) * sum;
}

void check_dimension(int dimension) {
  if (dimension != 2 && dimension != 3)
    throw Error(ErrorKind::Unsupported, "position-space kernels need d = 2 or 3, got " + std::to_string(dimension));
}

// (-Delta + m^2)^{-j}: 2^{1-j} / ((2pi)^{d/2} (j-1)!) (r/m)^{j-d/2} K_{j-d/2}(m r).
// This is the j = 1 kernel after j - 1 applications of -1/(j-1) d/dm^2, using
// d/dz [z^{-nu} K_nu(z)] = -z^{-nu} K_{nu+1}(z).
double green_bessel(double mass, int power, double r, int dimension) {
  const double z = mass * r;
  const double prefactor = std::pow(2.0, 1 - power) / (std::pow(2.0 * std::numbers::pi, 0.5 * dimension) * std::tgamma(power));
  if (dimension == 3) {
    const int twice_nu = 2 * power - 3;  // nu = j - 3/2
    const int n = (std::abs(twice_nu) - 1) / 2;
    return prefactor * std::pow(r / mass, power - 1.5) * bessel_k_half_integer(n, z);
  }
  const int nu = power - 1;
  return prefactor * std::pow(r / mass, nu) * std::cyl_bessel_k(static_cast<double>(nu), z);
}

double green_fd(double mass, int power, double r, int dimension) {
  if (power == 1) return green_bessel(mass, 1, r, dimension);
  const double m2 = mass * mass;
  const double h = 1e-4 * m2;
  const double up = green_fd(std::sqrt(m2 + h), power - 1, r, dimension);
  const double down = green_fd(std::sqrt(m2 - h), power - 1, r, dimension);
  return -1.0 / (power - 1) * (up - down) / (2.0 * h);
}

}  // namespace

double green_radial(double mass, int power, double radius, int dimension) {
  check_dimension(dimension);
  if (!(mass > 0.0)) throw Error(ErrorKind::InvalidParameter, "mass must be positive");
  if (power < 1) throw Error(ErrorKind::InvalidParameter, "power must be >= 1");
  if (radius < kSingularRadius) throw Error(ErrorKind::SingularPoint, "|x| below 1e-8");
  return green_bessel(mass, power, radius, dimension);
}

double green_function(double mass, int power, std::span<const double> x, int dimension, GreenMethod method) {
  check_dimension(dimension);
  if (static_cast<int>(x.size()) != dimension) throw Error(ErrorKind::DimensionMismatch, "point dimension");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (method == GreenMethod::FiniteDifference) {
    if (r < kSingularRadius) throw Error(ErrorKind::SingularPoint, "|x| below 1e-8");
    if (!(mass > 0.0) || power < 1) throw Error(ErrorKind::InvalidParameter, "mass > 0 and power >= 1 required");
    return green_fd(mass, power, r, dimension);
  }
  return green_radial(mass, power, r, dimension);
}

namespace {

struct Source {
  std::vector<double> x;
  double mass;
  int power;
};

// Integral of w_r * prod_q K_q in spherical coordinates around source r, where
// w_r = 1 / (1 + sum_{q != r} (|y - x_r| / |y - x_q|)^4) is a partition of unity
// that vanishes at every other source.
class ConvolutionIntegrator {
 public:
  ConvolutionIntegrator(std::vector<Source> sources, int dimension)
      : sources_(std::move(sources)), d_(dimension) {
    mass_sum_ = 0.0;
    for (const auto& s : sources_) mass_sum_ += s.mass;
  }

  double integrate(int level, long& evaluations) const {
    double total = 0.0;
    for (std::size_t r = 0; r < sources_.size(); ++r) total += integrate_around(r, level, evaluations);
    return total;
  }

 private:
  double integrand(std::size_t center, std::span<const double> y) const {
    double product = 1.0;
    double weight_denominator = 1.0;
    double rc = 0.0;
    for (int i = 0; i < d_; ++i) {
      const double diff = y[static_cast<std::size_t>(i)] - sources_[center].x[static_cast<std::size_t>(i)];
      rc += diff * diff;
    }
    rc = std::sqrt(rc);
    for (std::size_t q = 0; q < sources_.size(); ++q) {
      double rq;
      if (q == center) {
        rq = rc;
      } else {
        rq = 0.0;
        for (int i = 0; i < d_; ++i) {
          const double diff = y[static_cast<std::size_t>(i)] - sources_[q].x[static_cast<std::size_t>(i)];
          rq += diff * diff;
        }
        rq = std::sqrt(rq);
        if (rq < kSingularRadius) return 0.0;
        const double ratio = rc / rq;
        const double r2 = ratio * ratio;
        weight_denominator += r2 * r2;
      }
      product *= green_bessel(sources_[q].mass, sources_[q].power, rq, d_);
    }
    return product / weight_denominator;
  }

  double integrate_around(std::size_t center, int level, long& evaluations) const {
    const auto& xc = sources_[center].x;
    double spread = 0.0;
    for (const auto& s : sources_) {
      double r2 = 0.0;
      for (int i = 0; i < d_; ++i) {
        const double diff = s.x[static_cast<std::size_t>(i)] - xc[static_cast<std::size_t>(i)];
        r2 += diff * diff;
      }
      spread = std::max(spread, std::sqrt(r2));
    }
    // Kernel product decays like exp(-mass_sum * rho); e^{-45} is far below tolerance.
    const double radius = spread + 45.0 / mass_sum_ + 2.0 * (static_cast<double>(max_power()) / mass_sum_);

    const int scale = 1 << level;
    // rho = radius * u^2 removes the log / 1/rho behaviour at the centre.
    const CompositeRule radial = CompositeRule::on(0.0, 1.0, 6 * scale, 16);
    std::vector<double> y(static_cast<std::size_t>(d_));
    double sum = 0.0;
    if (d_ == 2) {
      const int n_theta = 24 * scale;
      for (int t = 0; t < n_theta; ++t) {
        const double theta = 2.0 * std::numbers::pi * t / n_theta;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        double ray = 0.0;
        for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
          const double u = radial.nodes[k];
          const double rho = radius * u * u;
          y[0] = xc[0] + rho * c;
          y[1] = xc[1] + rho * s;
          ray += radial.weights[k] * 2.0 * radius * u * rho * integrand(center, y);
        }
        sum += ray;
      }
      evaluations += static_cast<long>(n_theta) * static_cast<long>(radial.nodes.size());
      return sum * 2.0 * std::numbers::pi / n_theta;
    }
    const int n_polar = 12 * scale;
    const int n_azimuth = 24 * scale;
    const GaussRule& polar = gauss_legendre(n_polar);
    for (int p = 0; p < n_polar; ++p) {
      const double ct = polar.nodes[static_cast<std::size_t>(p)];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      double ring = 0.0;
      for (int a = 0; a < n_azimuth; ++a) {
        const double phi = 2.0 * std::numbers::pi * a / n_azimuth;
        const double dx = st * std::cos(phi);
        const double dy = st * std::sin(phi);
        double ray = 0.0;
        for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
          const double u = radial.nodes[k];
          const double rho = radius * u * u;
          y[0] = xc[0] + rho * dx;
          y[1] = xc[1] + rho * dy;
          y[2] = xc[2] + rho * ct;
          ray += radial.weights[k] * 2.0 * radius * u * rho * rho * integrand(center, y);
        }
        ring += ray;
      }
      sum += polar.weights[static_cast<std::size_t>(p)] * ring * 2.0 * std::numbers::pi / n_azimuth;
    }
    evaluations += static_cast<long>(n_polar) * n_azimuth * static_cast<long>(radial.nodes.size());
    return sum;
  }

  int max_power() const {
    int p = 1;
    for (const auto& s : sources_) p = std::max(p, s.power);
    return p;
  }

  std::vector<Source> sources_;
  int d_;
  double mass_sum_;
};

}  // namespace

QuadratureResult schwinger_truncated(const MassSpectrum& spectrum, const SchwingerAssignment& assignment,
                                     std::span<const EuclideanPoint> points, int dimension,
                                     const SchwingerOptions& options) {
  check_dimension(dimension);
  if (points.size() < 2) throw Error(ErrorKind::PreconditionViolated, "truncated Schwinger functions need n >= 2");
  if (assignment.size() != points.size())
    throw Error(ErrorKind::DimensionMismatch, "one (mass, power) assignment per point required");
  std::vector<Source> sources;
  for (std::size_t r = 0; r < points.size(); ++r) {
    if (static_cast<int>(points[r].size()) != dimension) throw Error(ErrorKind::DimensionMismatch, "point dimension");
    for (double c : points[r])
      if (!std::isfinite(c)) throw Error(ErrorKind::PreconditionViolated, "non-finite coordinate");
    const auto& slot = assignment[r];
    if (slot.mass_index >= spectrum.size()) throw Error(ErrorKind::InvalidParameter, "mass index out of range");
    if (slot.power < 1 || slot.power > spectrum.multiplicity(slot.mass_index))
      throw Error(ErrorKind::InvalidParameter, "power must satisfy 1 <= j <= nu_l");
    for (std::size_t q = 0; q < r; ++q) {
      double r2 = 0.0;
      for (int i = 0; i < dimension; ++i) {
        const double diff = points[r][static_cast<std::size_t>(i)] - points[q][static_cast<std::size_t>(i)];
        r2 += diff * diff;
      }
      if (std::sqrt(r2) < kSingularRadius)
        throw Error(ErrorKind::SingularConfiguration, "points " + std::to_string(q) + " and " + std::to_string(r) + " coincide");
    }
    sources.push_back({points[r], spectrum.mass(slot.mass_index), slot.power});
  }

  ConvolutionIntegrator integrator(std::move(sources), dimension);
  QuadratureResult result;
  double previous = integrator.integrate(0, result.evaluations);
  for (int level = 1; level <= options.max_level; ++level) {
    const double current = integrator.integrate(level, result.evaluations);
    result.value = current;
    result.error_estimate = std::abs(current - previous);
    result.level = level;
    if (result.error_estimate <= options.relative_tolerance * std::abs(current)) return result;
    previous = current;
  }
  if (result.error_estimate <= 1e-4 * std::abs(result.value)) return result;
  throw QuadratureError("convolution did not converge, relative error estimate " +
                            std::to_string(result.error_estimate / std::abs(result.value)),
                        result.error_estimate);
}

std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n <= 0) return {{}};
  // restricted growth strings a_0 = 0, a_i <= 1 + max(a_0..a_{i-1})
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  for (;;) {
    int blocks = 1 + *std::max_element(a.begin(), a.end());
    std::vector<std::vector<int>> partition(static_cast<std::size_t>(blocks));
    for (int i = 0; i < n; ++i) partition[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(std::move(partition));
    int i = n - 1;
    for (; i > 0; --i) {
      const int prefix_max = *std::max_element(a.begin(), a.begin() + i);
      if (a[static_cast<std::size_t>(i)] <= prefix_max) {
        ++a[static_cast<std::size_t>(i)];
        std::fill(a.begin() + i + 1, a.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
  return out;
}

double assemble_full_moment(int n, const std::function<double(const std::vector<int>&)>& truncated) {
  double total = 0.0;
  for (const auto& partition : set_partitions(n)) {
    double product = 1.0;
    for (const auto& block : partition) product *= truncated(block);
    total += product;
  }
  return total;
}

}  // namespace wickfield
