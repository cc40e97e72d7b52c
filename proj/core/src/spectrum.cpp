#include "wickfield/spectrum.hpp"

#include "wickfield/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wickfield {

MassSpectrum::MassSpectrum(std::vector<Pole> poles) : poles_(std::move(poles)) {
  if (poles_.empty()) throw Error(ErrorKind::InvalidSpectrum, "spectrum needs at least one pole");
  for (std::size_t l = 0; l < poles_.size(); ++l) {
    const Pole& p = poles_[l];
    if (!std::isfinite(p.mass) || p.mass <= 0.0)
      throw Error(ErrorKind::InvalidSpectrum, "mass " + std::to_string(l) + " must be positive");
    if (p.multiplicity < 1)
      throw Error(ErrorKind::InvalidSpectrum, "multiplicity " + std::to_string(l) + " must be >= 1");
    for (std::size_t i = 0; i < l; ++i) {
      if (std::abs(poles_[i].mass - p.mass) < kMassSeparation)
        throw Error(ErrorKind::InvalidSpectrum,
                    "masses " + std::to_string(i) + " and " + std::to_string(l) + " coincide");
    }
  }
}

int MassSpectrum::total_multiplicity() const {
  return std::accumulate(poles_.begin(), poles_.end(), 0,
                         [](int acc, const Pole& p) { return acc + p.multiplicity; });
}

double MassSpectrum::min_mass() const {
  return std::min_element(poles_.begin(), poles_.end(),
                          [](const Pole& a, const Pole& b) { return a.mass < b.mass; })
      ->mass;
}

bool MassSpectrum::all_simple() const {
  return std::all_of(poles_.begin(), poles_.end(), [](const Pole& p) { return p.multiplicity == 1; });
}

double MassSpectrum::inverse_denominator(double x) const {
  double prod = 1.0;
  for (const Pole& p : poles_) prod *= std::pow(x + p.mass * p.mass, p.multiplicity);
  return 1.0 / prod;
}

int kappa(const MassSpectrum& spectrum) { return 2 * (spectrum.total_multiplicity() - 1); }

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

}  // namespace

// Clustered higher-order poles give coefficients far larger than the sum, so the
// cancellation is carried out in quad precision.
double PartialFractionTable::evaluate(const MassSpectrum& spectrum, double x) const {
  Quad sum = 0;
  for (std::size_t l = 0; l < b_.size(); ++l) {
    const Quad base = Quad(x) + Quad(spectrum.mass(l)) * spectrum.mass(l);
    Quad power = 1;
    for (std::size_t j = 0; j < b_[l].size(); ++j) {
      power *= base;
      Quad b = b_[l][j];
      if (l < lo_.size()) b += lo_[l][j];
      sum += b / power;
    }
  }
  return static_cast<double>(sum);
}

namespace {

// Taylor coefficients t_0..t_{order} at x0 = -a_l of g(x) = prod_{i != l} (x + a_i)^{-nu_i}.
// log g has coefficients c_k = -sum_i nu_i (-1)^{k-1} / (k d_i^k), d_i = a_i - a_l, and
// the exponential series follows from k t_k = sum_{q=1}^k q c_q t_{k-q}.
template <typename T>
std::vector<T> deflated_taylor(const std::vector<T>& a, const std::vector<int>& nu, std::size_t l, int order) {
  std::vector<T> logc(static_cast<std::size_t>(order) + 1, T(0));
  T t0(1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == l) continue;
    const T d = a[i] - a[l];
    T dk(1);
    for (int e = 0; e < nu[i]; ++e) dk *= d;
    t0 /= dk;
    T inv_pow(1);
    for (int k = 1; k <= order; ++k) {
      inv_pow /= d;
      const T sign = (k % 2 == 1) ? T(1) : T(-1);
      logc[static_cast<std::size_t>(k)] -= T(nu[i]) * sign * inv_pow / T(k);
    }
  }
  std::vector<T> t(static_cast<std::size_t>(order) + 1, T(0));
  t[0] = t0;
  for (int k = 1; k <= order; ++k) {
    T acc(0);
    for (int q = 1; q <= k; ++q) acc += T(q) * logc[static_cast<std::size_t>(q)] * t[static_cast<std::size_t>(k - q)];
    t[static_cast<std::size_t>(k)] = acc / T(k);
  }
  return t;
}

template <typename T>
std::vector<std::vector<T>> residue_expansion(const std::vector<T>& a, const std::vector<int>& nu) {
  std::vector<std::vector<T>> b(a.size());
  for (std::size_t l = 0; l < a.size(); ++l) {
    const auto t = deflated_taylor(a, nu, l, nu[l] - 1);
    b[l].resize(static_cast<std::size_t>(nu[l]));
    // b_{l,j} = t_{nu_l - j}
    for (int j = 1; j <= nu[l]; ++j) b[l][static_cast<std::size_t>(j - 1)] = t[static_cast<std::size_t>(nu[l] - j)];
  }
  return b;
}

}  // namespace

PartialFractionTable partial_fractions(const MassSpectrum& spectrum) {
  std::vector<Quad> a;
  std::vector<int> nu;
  for (const Pole& p : spectrum.poles()) {
    a.push_back(Quad(p.mass) * p.mass);
    nu.push_back(p.multiplicity);
  }
  const auto wide = residue_expansion(a, nu);
  std::vector<std::vector<double>> hi(wide.size()), lo(wide.size());
  for (std::size_t l = 0; l < wide.size(); ++l)
    for (const Quad& v : wide[l]) {
      const double h = static_cast<double>(v);
      hi[l].push_back(h);
      lo[l].push_back(static_cast<double>(v - h));
    }
  return PartialFractionTable(std::move(hi), std::move(lo));
}

std::vector<std::vector<Rational>> partial_fractions_exact(const std::vector<ExactPole>& poles) {
  if (poles.empty()) throw Error(ErrorKind::InvalidSpectrum, "spectrum needs at least one pole");
  std::vector<Rational> a;
  std::vector<int> nu;
  for (std::size_t l = 0; l < poles.size(); ++l) {
    if (poles[l].mass_squared <= 0 || poles[l].multiplicity < 1)
      throw Error(ErrorKind::InvalidSpectrum, "pole " + std::to_string(l) + " is not positive");
    for (std::size_t i = 0; i < l; ++i)
      if (poles[i].mass_squared == poles[l].mass_squared)
        throw Error(ErrorKind::InvalidSpectrum, "masses coincide");
    a.emplace_back(poles[l].mass_squared);
    nu.push_back(poles[l].multiplicity);
  }
  return residue_expansion(a, nu);
}

}  // namespace wickfield
