#include "wickfield/wightman.hpp"

#include "wickfield/error.hpp"
#include "wickfield/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

namespace wickfield {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double factorial(int k) { return std::tgamma(k + 1.0); }

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

double sign_power(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

// Odometer over all index tuples with entries in [0, bound).
bool advance(std::vector<int>& idx, int bound) {
  for (auto& v : idx) {
    if (++v < bound) return true;
    v = 0;
  }
  return false;
}

}  // namespace

const char* to_string(ShellKind kind) {
  switch (kind) {
    case ShellKind::DeltaMinus: return "delta_minus";
    case ShellKind::DeltaPlus: return "delta_plus";
    case ShellKind::Propagator: return "propagator";
    case ShellKind::Fixed: return "fixed";
  }
  return "unknown";
}

int WightmanTerm::determined_slot() const {
  for (const auto& f : factors)
    if (f.kind == ShellKind::Propagator || f.kind == ShellKind::Fixed) return f.slot;
  return -1;
}

std::vector<WightmanTerm> build_wightman_terms(const MassSpectrum& spectrum, const PartialFractionTable& pf, int n,
                                               const BuildOptions& options) {
  if (n < 2) throw Error(ErrorKind::Unsupported, "truncated Wightman terms need n >= 2");
  if (pf.size() != spectrum.size()) throw Error(ErrorKind::DimensionMismatch, "partial fractions do not match spectrum");
  const int d = options.dimension;
  const double generic_norm = std::pow(kTwoPi, -0.5 * (d * (n - 2) + 2));
  const int masses = static_cast<int>(spectrum.size());

  std::vector<WightmanTerm> out;
  std::vector<int> l(static_cast<std::size_t>(n), 0);
  do {
    std::vector<int> j(static_cast<std::size_t>(n), 1);
    for (;;) {
      double bprod = 1.0;
      for (int r = 0; r < n; ++r) bprod *= pf(static_cast<std::size_t>(l[r]), j[r]);

      if (n == 2 && l[0] == l[1]) {
        const int total = j[0] + j[1];
        const auto mass = static_cast<std::size_t>(l[0]);
        if (options.equal_mass == EqualMassForm::Semigroup) {
          WightmanTerm t;
          t.n = 2;
          t.factors = {{ShellKind::DeltaMinus, total - 1, mass, 0}, {ShellKind::Fixed, 0, mass, 1}};
          t.coefficient = generic_norm * sign_power(total - 1) / factorial(total - 1) * bprod;
          t.prefactor = options.prefactor;
          out.push_back(std::move(t));
        } else {
          const double lead = -1.0 / factorial(total - 1);
          for (int k = 0; k <= total - 1; ++k) {
            const int order = n - k;
            if (order < 0) continue;  // negative derivative order has no meaning
            WightmanTerm t;
            t.n = 2;
            t.factors = {{ShellKind::DeltaMinus, order, mass, 0}, {ShellKind::Fixed, 0, mass, 1}};
            t.coefficient = lead * binomial(total - 1, k) * sign_power(k) * factorial(k) * bprod;
            t.weight_power = k;
            t.prefactor = options.prefactor;
            out.push_back(std::move(t));
          }
          WightmanTerm t;
          t.n = 2;
          t.factors = {{ShellKind::DeltaMinus, total - 1, mass, 0}, {ShellKind::Fixed, 0, mass, 1}};
          t.coefficient = lead * sign_power(total - 1) * bprod;
          t.prefactor = options.prefactor;
          out.push_back(std::move(t));
        }
      } else {
        for (int s = 0; s < n; ++s) {
          WightmanTerm t;
          t.n = n;
          t.propagator_slot = s;
          double coef = generic_norm * bprod;
          for (int v = 0; v < n; ++v) {
            const auto mass = static_cast<std::size_t>(l[v]);
            if (v == s) {
              t.factors.push_back({ShellKind::Propagator, j[v], mass, v});
              continue;
            }
            coef *= sign_power(j[v] - 1) / factorial(j[v] - 1);
            t.factors.push_back({v < s ? ShellKind::DeltaMinus : ShellKind::DeltaPlus, j[v] - 1, mass, v});
          }
          t.coefficient = coef;
          t.prefactor = options.prefactor;
          out.push_back(std::move(t));
        }
      }

      int r = 0;
      for (; r < n; ++r) {
        if (++j[r] <= spectrum.multiplicity(static_cast<std::size_t>(l[r]))) break;
        j[r] = 1;
      }
      if (r == n) break;
    }
  } while (advance(l, masses));
  return out;
}

bool check_spectral_support(const WightmanTerm& term, const MassSpectrum& spectrum, int samples, std::uint64_t seed) {
  const int n = term.n;
  if (static_cast<int>(term.factors.size()) != n) return false;
  const int s = term.determined_slot();
  int determined = 0;
  for (const auto& f : term.factors) {
    if (f.kind == ShellKind::Propagator || f.kind == ShellKind::Fixed) ++determined;
    if (f.mass_index >= spectrum.size()) return false;
  }
  if (determined > 1) return false;

  // Symbolic: q_j is backward if k_1..k_j all lie on negative shells, or if
  // k_{j+1}..k_n all lie on positive shells (then q_j = -(k_{j+1} + ... + k_n)).
  for (int jj = 1; jj < n; ++jj) {
    bool left = true;
    for (int v = 0; v < jj; ++v) left = left && term.factors[static_cast<std::size_t>(v)].kind == ShellKind::DeltaMinus;
    bool right = true;
    for (int v = jj; v < n; ++v) right = right && term.factors[static_cast<std::size_t>(v)].kind == ShellKind::DeltaPlus;
    if (!left && !right) return false;
  }

  // Sampled: random on-shell spatial momenta, determined slot from conservation.
  const int space = 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int sample = 0; sample < samples; ++sample) {
    std::vector<std::array<double, 3>> k(static_cast<std::size_t>(n), {0.0, 0.0, 0.0});
    std::array<double, 3> total{0.0, 0.0, 0.0};
    for (int v = 0; v < n; ++v) {
      if (v == s) continue;
      const auto& f = term.factors[static_cast<std::size_t>(v)];
      auto& kv = k[static_cast<std::size_t>(v)];
      double p2 = 0.0;
      for (int c = 1; c <= space; ++c) {
        kv[static_cast<std::size_t>(c)] = gauss(rng);
        p2 += kv[static_cast<std::size_t>(c)] * kv[static_cast<std::size_t>(c)];
      }
      const double omega = std::sqrt(p2 + spectrum.mass_squared(f.mass_index));
      kv[0] = f.kind == ShellKind::DeltaMinus ? -omega : omega;
      for (std::size_t c = 0; c < 3; ++c) total[c] += kv[c];
    }
    if (s >= 0)
      for (std::size_t c = 0; c < 3; ++c) k[static_cast<std::size_t>(s)][c] = -total[c];
    std::array<double, 3> q{0.0, 0.0, 0.0};
    for (int jj = 1; jj < n; ++jj) {
      for (std::size_t c = 0; c < 3; ++c) q[c] += k[static_cast<std::size_t>(jj - 1)][c];
      const double scale = 1.0 + std::abs(q[0]) * std::abs(q[0]);
      const double q2 = q[0] * q[0] - q[1] * q[1] - q[2] * q[2];
      if (q[0] > 1e-12 * std::sqrt(scale) || q2 < -1e-10 * scale) return false;
    }
  }
  return true;
}

std::vector<WightmanTerm> two_point_replacement(const MassSpectrum& spectrum, const std::vector<double>& lambdas,
                                                std::shared_ptr<const TensorPolynomial> prefactor) {
  if (lambdas.size() != spectrum.size())
    throw Error(ErrorKind::DimensionMismatch, "need one lambda per mass");
  std::vector<WightmanTerm> out;
  for (std::size_t s = 0; s < spectrum.size(); ++s) {
    if (lambdas[s] == 0.0 || !std::isfinite(lambdas[s]))
      throw Error(ErrorKind::InvalidParameter, "lambda " + std::to_string(s) + " must be nonzero");
    WightmanTerm t;
    t.n = 2;
    t.factors = {{ShellKind::DeltaMinus, 0, s, 0}, {ShellKind::Fixed, 0, s, 1}};
    t.coefficient = lambdas[s];
    t.prefactor = prefactor;
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

using Complex = std::complex<double>;

struct Axis {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> spacing;
};

Axis make_axis(double half_width, double panel_width, int level) {
  const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * half_width / panel_width))) << level;
  const auto rule = CompositeRule::on(-half_width, half_width, panels, 8);
  Axis a{rule.nodes, rule.weights, {}};
  const double cell = 2.0 * half_width / panels / 8.0;
  a.spacing.assign(a.nodes.size(), cell);
  return a;
}

// The j = 1 integrand of one term at slot masses mu2, integrated on fixed grids.
class TermIntegrator {
 public:
  TermIntegrator(const WightmanTerm& term, const MassSpectrum& spectrum, std::span<const EuclideanPoint> points,
                 int dimension, const LaplaceOptions& options, int level)
      : term_(term), spectrum_(spectrum), d_(dimension), components_(options.components) {
    const int n = term.n;
    s_ = term.determined_slot();
    if (s_ < 0) throw Error(ErrorKind::PreconditionViolated, "term has no conservation-determined slot");
    if (components_.empty()) components_.assign(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
      if (v == s_) continue;
      const auto& xv = points[static_cast<std::size_t>(v)];
      const auto& xs = points[static_cast<std::size_t>(s_)];
      const double tau = std::abs(xv[0] - xs[0]);
      double dx = 0.0;
      std::vector<double> shift;
      for (int c = 1; c < d_; ++c) {
        shift.push_back(xv[static_cast<std::size_t>(c)] - xs[static_cast<std::size_t>(c)]);
        dx += shift.back() * shift.back();
      }
      dx = std::sqrt(dx);
      slots_.push_back(v);
      time_.push_back(xv[0] - xs[0]);
      shift_.push_back(std::move(shift));
      const double half_width = options.tail / tau;
      const double panel_width = std::min(2.0, 4.0 / (1.0 + dx));
      for (int c = 1; c < d_; ++c) axes_.push_back(make_axis(half_width, panel_width, level));
    }
  }

  Complex operator()(std::span<const double> mu2) {
    const std::size_t dims = axes_.size();
    std::vector<int> idx(dims, 0);
    std::vector<double> p(dims);
    Complex sum{};
    do {
      double w = 1.0;
      for (std::size_t a = 0; a < dims; ++a) {
        p[a] = axes_[a].nodes[static_cast<std::size_t>(idx[a])];
        w *= axes_[a].weights[static_cast<std::size_t>(idx[a])];
      }
      Complex f = integrand(p, mu2);
      if (std::isnan(f.real())) {
        // node on the propagator pole: move half a cell
        p[0] += 0.5 * axes_[0].spacing[static_cast<std::size_t>(idx[0])];
        f = integrand(p, mu2);
      }
      sum += w * f;
      ++evaluations_;
    } while (advance_axes(idx));
    return sum;
  }

  long evaluations() const noexcept { return evaluations_; }

 private:
  bool advance_axes(std::vector<int>& idx) const {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (++idx[a] < static_cast<int>(axes_[a].nodes.size())) return true;
      idx[a] = 0;
    }
    return false;
  }

  Complex integrand(std::span<const double> p, std::span<const double> mu2) const {
    const int n = term_.n;
    const auto sp = static_cast<std::size_t>(d_ - 1);
    std::vector<Complex> k(static_cast<std::size_t>(n * d_), Complex(0.0));
    double weight = 1.0;
    double exponent = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < slots_.size(); ++a) {
      const int v = slots_[a];
      const auto& f = term_.factors[static_cast<std::size_t>(v)];
      double p2 = 0.0;
      for (std::size_t c = 0; c < sp; ++c) {
        const double pc = p[a * sp + c];
        p2 += pc * pc;
        phase += pc * shift_[a][c];
        k[static_cast<std::size_t>(v * d_) + 1 + c] = pc;
      }
      const double omega = std::sqrt(p2 + mu2[static_cast<std::size_t>(v)]);
      const double k0 = f.kind == ShellKind::DeltaMinus ? -omega : omega;
      k[static_cast<std::size_t>(v * d_)] = k0;
      weight /= 2.0 * omega;
      exponent -= k0 * time_[a];
      if (a == 0 && term_.weight_power > 0) {
        const double nominal = p2 + spectrum_.mass_squared(f.mass_index);
        weight *= std::pow(4.0 * nominal, -term_.weight_power);
      }
    }
    const auto base = static_cast<std::size_t>(s_ * d_);
    for (int v = 0; v < n; ++v) {
      if (v == s_) continue;
      for (int c = 0; c < d_; ++c) k[base + static_cast<std::size_t>(c)] -= k[static_cast<std::size_t>(v * d_ + c)];
    }
    Complex value = weight * std::exp(Complex(exponent, phase));
    if (term_.factors[static_cast<std::size_t>(s_)].kind == ShellKind::Propagator) {
      double ks2 = std::norm(k[base]);
      for (int c = 1; c < d_; ++c) ks2 -= std::norm(k[base + static_cast<std::size_t>(c)]);
      const double m2 = mu2[static_cast<std::size_t>(s_)];
      const double den = m2 - ks2;
      if (std::abs(den) < 1e-8 * std::max(1.0, m2)) return {std::nan(""), 0.0};
      value /= den;
    }
    if (term_.prefactor) value *= term_.prefactor->evaluate(components_, k);
    return value;
  }

  const WightmanTerm& term_;
  const MassSpectrum& spectrum_;
  int d_;
  int s_ = -1;
  std::vector<int> components_;
  std::vector<int> slots_;
  std::vector<double> time_;
  std::vector<std::vector<double>> shift_;
  std::vector<Axis> axes_;
  long evaluations_ = 0;
};

Complex evaluate_term(const WightmanTerm& term, const MassSpectrum& spectrum, std::span<const EuclideanPoint> points,
                      int dimension, const LaplaceOptions& options, int level, long& evaluations) {
  TermIntegrator integrator(term, spectrum, points, dimension, options, level);
  const int n = term.n;
  std::vector<double> mu2(static_cast<std::size_t>(n), 1.0);
  std::vector<int> orders(static_cast<std::size_t>(n), 0);
  std::vector<double> steps(static_cast<std::size_t>(n), 1.0);
  double extra = 1.0;
  for (const auto& f : term.factors) {
    const auto v = static_cast<std::size_t>(f.slot);
    mu2[v] = spectrum.mass_squared(f.mass_index);
    steps[v] = 1e-2 * mu2[v];
    switch (f.kind) {
      case ShellKind::DeltaMinus:
      case ShellKind::DeltaPlus: orders[v] = f.order; break;
      case ShellKind::Propagator:
        orders[v] = f.order - 1;
        extra *= sign_power(f.order - 1) / factorial(f.order - 1);
        break;
      case ShellKind::Fixed: break;
    }
  }
  const std::function<Complex(std::span<const double>)> base = [&](std::span<const double> m) {
    return integrator(m);
  };
  const Complex value = mixed_derivative<Complex>(base, mu2, orders, steps, 1);
  evaluations += integrator.evaluations();
  return term.coefficient * extra * value;
}

}  // namespace

LaplaceResult laplace_eval(const std::vector<WightmanTerm>& terms, const MassSpectrum& spectrum,
                           std::span<const EuclideanPoint> points, int dimension, const LaplaceOptions& options) {
  if (dimension < 2 || dimension > 4) throw Error(ErrorKind::Unsupported, "dimension must be 2, 3 or 4");
  if (terms.empty()) return {};
  const int n = terms.front().n;
  if (static_cast<int>(points.size()) != n) throw Error(ErrorKind::DimensionMismatch, "need one point per slot");
  for (const auto& x : points)
    if (static_cast<int>(x.size()) != dimension) throw Error(ErrorKind::DimensionMismatch, "point dimension");
  for (std::size_t r = 1; r < points.size(); ++r)
    if (!(points[r - 1][0] < points[r][0]))
      throw Error(ErrorKind::PreconditionViolated, "times must be strictly increasing");
  for (const auto& t : terms) {
    if (t.n != n) throw Error(ErrorKind::DimensionMismatch, "terms of different order");
    for (const auto& f : t.factors)
      if (f.mass_index >= spectrum.size()) throw Error(ErrorKind::DimensionMismatch, "mass index out of range");
  }

  const double norm = options.normalization * std::pow(kTwoPi, n - 0.5 * dimension * n);
  LaplaceResult result;
  Complex previous{};
  for (int level = 0; level <= options.max_level; ++level) {
    Complex total{};
    for (const auto& t : terms) total += evaluate_term(t, spectrum, points, dimension, options, level, result.evaluations);
    total *= norm;
    if (level > 0) {
      result.error_estimate = std::abs(total - previous);
      result.value = total;
      if (result.error_estimate <= options.relative_tolerance * std::abs(total)) return result;
    }
    previous = total;
    result.value = total;
  }
  if (result.error_estimate > 1e-2 * std::abs(result.value))
    throw QuadratureError("Laplace quadrature did not converge", result.error_estimate);
  return result;
}

double fit_laplace_normalization(const MassSpectrum& spectrum, int dimension) {
  if (!spectrum.all_simple())
    throw Error(ErrorKind::PreconditionViolated, "normalization is fitted on simple poles only");
  const auto pf = partial_fractions(spectrum);
  BuildOptions build;
  build.dimension = dimension;
  const auto terms = build_wightman_terms(spectrum, pf, 2, build);
  std::vector<EuclideanPoint> points(2, EuclideanPoint(static_cast<std::size_t>(dimension), 0.0));
  points[1][0] = 1.0;
  const double laplace = laplace_eval(terms, spectrum, points, dimension).value.real();
  double schwinger = 0.0;
  for (std::size_t a = 0; a < spectrum.size(); ++a)
    for (std::size_t b = 0; b < spectrum.size(); ++b)
      schwinger += pf(a, 1) * pf(b, 1) *
                   schwinger_truncated(spectrum, {{a, 1}, {b, 1}}, points, dimension).value;
  return schwinger / laplace;
}

}  // namespace wickfield
