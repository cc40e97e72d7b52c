#include "wickfield/scattering.hpp"

#include "wickfield/error.hpp"
#include "wickfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>

namespace wickfield {

using Complex = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGaussReach = 8.0;  // Gaussian cut at exp(-32)

double sign_power(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

double bump(double x) {
  if (!(std::abs(x) < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

Complex WavePacket::profile(double k0, double k1) const {
  if (!(k0 > 0.0)) return 0.0;
  const double window = bump((k0 * k0 - k1 * k1 - mass * mass) / epsilon);
  if (window == 0.0) return 0.0;
  const double z = (k1 - center) / width;
  const Complex value = scale * window * std::exp(-0.5 * z * z);
  return position == 0.0 ? value : value * std::polar(1.0, -k1 * position);
}

std::pair<double, double> WavePacket::rapidity_range() const {
  return {std::asinh((center - kGaussReach * width) / mass), std::asinh((center + kGaussReach * width) / mass)};
}

double WavePacket::norm() const {
  const auto [lo, hi] = rapidity_range();
  const auto rule = CompositeRule::on(lo, hi, 16, 16);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double y = rule.nodes[q];
    acc += 0.5 * rule.weights[q] * std::norm(profile(mass * std::cosh(y), mass * std::sinh(y)));
  }
  double pol = 0.0;
  for (const auto& p : polarization) pol += std::norm(p);
  return std::sqrt(acc * pol);
}

WavePacket make_packet(const MassSpectrum& spectrum, std::size_t species, double center, double width,
                       double epsilon, std::vector<Complex> polarization) {
  if (species >= spectrum.size()) throw Error(ErrorKind::InvalidParameter, "species index out of range");
  if (!(width > 0.0) || !std::isfinite(center)) throw Error(ErrorKind::InvalidParameter, "packet width must be positive");
  const double m2 = spectrum.mass_squared(species);
  if (!(epsilon > 0.0) || !(epsilon < m2))
    throw Error(ErrorKind::InvalidWindow, "window must satisfy 0 < epsilon < m^2");
  for (std::size_t a = 0; a < spectrum.size(); ++a)
    for (std::size_t b = a + 1; b < spectrum.size(); ++b)
      if (!(epsilon < 0.5 * std::abs(spectrum.mass_squared(a) - spectrum.mass_squared(b))))
        throw Error(ErrorKind::InvalidWindow, "support windows of masses " + std::to_string(a) + " and " +
                                                  std::to_string(b) + " overlap");
  if (polarization.empty()) throw Error(ErrorKind::InvalidParameter, "empty polarization");
  WavePacket p;
  p.species = species;
  p.mass = spectrum.mass(species);
  p.center = center;
  p.width = width;
  p.epsilon = epsilon;
  p.polarization = std::move(polarization);
  return p;
}

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::InOut: return "in-out";
    case ChannelKind::InIn: return "in-in";
    case ChannelKind::OutOut: return "out-out";
  }
  return "unknown";
}

ScatteringModel::ScatteringModel(MassSpectrum s, std::vector<double> l, std::shared_ptr<const TensorPolynomial> q)
    : spectrum(std::move(s)), pf(partial_fractions(spectrum)), lambdas(std::move(l)), prefactor(std::move(q)) {
  if (lambdas.empty()) lambdas.assign(spectrum.size(), 1.0);
  if (lambdas.size() != spectrum.size()) throw Error(ErrorKind::DimensionMismatch, "need one lambda per mass");
}

std::vector<WightmanTerm> scattering_terms(const ScatteringModel& model, int n) {
  if (n == 2) return two_point_replacement(model.spectrum, model.lambdas, model.prefactor);
  BuildOptions o;
  o.dimension = 2;
  o.prefactor = model.prefactor;
  return build_wightman_terms(model.spectrum, model.pf, n, o);
}

namespace {

struct Kinematics {
  int n = 0;
  std::vector<int> sigma;         // W argument is sigma_l * k_l
  std::vector<int> eta;           // phase exp(i eta (k0 - omega) t)
  std::vector<const WavePacket*> packet;
  std::vector<bool> conjugate;
};

Kinematics setup(const std::vector<WavePacket>& packets, const Channel& channel) {
  const int n = static_cast<int>(packets.size());
  if (n < 2) throw Error(ErrorKind::PreconditionViolated, "need at least two packets");
  if (channel.r < 1 || channel.r >= n) throw Error(ErrorKind::InvalidParameter, "split r must be in 1..n-1");
  Kinematics k;
  k.n = n;
  for (int l = 0; l < n; ++l) {
    const bool first = l < channel.r;
    k.sigma.push_back(first ? -1 : 1);
    int eta = 1;
    if (channel.kind == ChannelKind::InIn) eta = first ? 1 : -1;
    if (channel.kind == ChannelKind::OutOut) eta = first ? -1 : 1;
    k.eta.push_back(eta);
    // conjugated first-group packets enter in reversed order
    k.packet.push_back(first ? &packets[static_cast<std::size_t>(channel.r - 1 - l)] : &packets[static_cast<std::size_t>(l)]);
    k.conjugate.push_back(first);
  }
  return k;
}

struct Vec2 {
  double t = 0.0;
  double x = 0.0;
};

double minkowski(const Vec2& a) { return a.t * a.t - a.x * a.x; }

// Spin contraction of the prefactor (or the scalar polarization product).
Complex spin_factor(const Kinematics& kin, const std::shared_ptr<const TensorPolynomial>& q,
                    const std::vector<Vec2>& k) {
  if (!q) {
    Complex c = 1.0;
    for (int l = 0; l < kin.n; ++l) {
      const Complex p = kin.packet[static_cast<std::size_t>(l)]->polarization.front();
      c *= kin.conjugate[static_cast<std::size_t>(l)] ? std::conj(p) : p;
    }
    return c;
  }
  std::vector<Complex> args;
  for (int l = 0; l < kin.n; ++l) {
    const auto& v = k[static_cast<std::size_t>(l)];
    args.emplace_back(kin.sigma[static_cast<std::size_t>(l)] * v.t);
    args.emplace_back(kin.sigma[static_cast<std::size_t>(l)] * v.x);
  }
  const auto all = q->evaluate_all(args);
  const int size = q->size();
  Complex total = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(kin.n), 0);
  for (const Complex& value : all) {
    Complex w = value;
    for (int l = 0; l < kin.n; ++l) {
      const auto& pol = kin.packet[static_cast<std::size_t>(l)]->polarization;
      const auto a = static_cast<std::size_t>(idx[static_cast<std::size_t>(l)]);
      const Complex p = a < pol.size() ? pol[a] : Complex(0.0);
      w *= kin.conjugate[static_cast<std::size_t>(l)] ? std::conj(p) : p;
    }
    total += w;
    for (int l = kin.n - 1; l >= 0; --l) {
      if (++idx[static_cast<std::size_t>(l)] < size) break;
      idx[static_cast<std::size_t>(l)] = 0;
    }
  }
  return total;
}

Complex packet_factor(const Kinematics& kin, int l, const Vec2& k, double t) {
  const WavePacket& p = *kin.packet[static_cast<std::size_t>(l)];
  Complex h = p.profile(k.t, k.x);
  if (h == 0.0) return 0.0;
  if (kin.conjugate[static_cast<std::size_t>(l)]) h = std::conj(h);
  const double omega = std::sqrt(k.x * k.x + p.mass * p.mass);
  return h * std::polar(1.0, kin.eta[static_cast<std::size_t>(l)] * (k.t - omega) * t);
}

// Positive roots y of a cosh y + b sinh y = g.
void rapidity_roots(double a, double b, double g, std::vector<double>& out) {
  const double qa = a + b;
  const double qc = a - b;
  auto push = [&](double u) {
    if (u > 0.0 && std::isfinite(u)) out.push_back(std::log(u));
  };
  if (std::abs(qa) < 1e-300) {
    if (g != 0.0) push(qc / (2.0 * g));
    return;
  }
  const double disc = g * g - qa * qc;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  // stable quadratic roots of qa u^2 - 2 g u + qc = 0
  const double q = g + (g >= 0.0 ? sq : -sq);
  if (q != 0.0) {
    push(q / qa);
    push(qc / q);
  } else {
    push(0.0);
  }
}

class TermOverlap {
 public:
  TermOverlap(const ScatteringModel& model, const WightmanTerm& term, const Kinematics& kin, double t,
              const OverlapOptions& options)
      : model_(model), term_(term), kin_(kin), t_(t), options_(options) {
    s_ = term.determined_slot();
    for (int v = 0; v < kin.n; ++v)
      if (v != s_) onshell_.push_back(v);
    inner_ = onshell_.front();
    outer_.assign(onshell_.begin() + 1, onshell_.end());
    for (int v : outer_) {
      const auto [lo, hi] = kin.packet[static_cast<std::size_t>(v)]->rapidity_range();
      outer_rules_.push_back(CompositeRule::on(lo, hi, options.outer_panels, options.points));
    }
    // Phase variation across a window crossing bounds the panel count; fixed per (term, t)
    // so that finite differences in the masses see a smooth quadrature.
    const WavePacket& ps = *kin.packet[static_cast<std::size_t>(s_)];
    const double m = ps.mass;
    const double phase = t * ps.epsilon / (m + std::sqrt(m * m - ps.epsilon));
    panels_ = 4 + static_cast<int>(std::ceil(phase / 2.0));
  }

  // Is the term compatible with the channel at all?
  bool active() const {
    for (int v : onshell_) {
      const auto& f = term_.factors[static_cast<std::size_t>(v)];
      const int sigma = kin_.sigma[static_cast<std::size_t>(v)];
      if (f.kind == ShellKind::DeltaMinus && sigma != -1) return false;
      if (f.kind == ShellKind::DeltaPlus && sigma != 1) return false;
      if (f.mass_index != kin_.packet[static_cast<std::size_t>(v)]->species) return false;
    }
    return true;
  }

  Complex operator()(std::span<const double> mu2) const {
    Complex total = 0.0;
    std::vector<double> y(outer_.size());
    std::vector<int> idx(outer_.size(), 0);
    for (;;) {
      double w = 1.0;
      for (std::size_t a = 0; a < outer_.size(); ++a) {
        y[a] = outer_rules_[a].nodes[static_cast<std::size_t>(idx[a])];
        w *= 0.5 * outer_rules_[a].weights[static_cast<std::size_t>(idx[a])];
      }
      total += w * inner(y, mu2);
      std::size_t a = 0;
      for (; a < outer_.size(); ++a) {
        if (++idx[a] < static_cast<int>(outer_rules_[a].nodes.size())) break;
        idx[a] = 0;
      }
      if (a == outer_.size()) break;
    }
    return total;
  }

 private:
  Complex integrand(double yi, const std::vector<double>& yo, std::span<const double> mu2, Vec2& ks) const {
    std::vector<Vec2> k(static_cast<std::size_t>(kin_.n));
    auto place = [&](int v, double y) {
      const double mu = std::sqrt(mu2[static_cast<std::size_t>(v)]);
      k[static_cast<std::size_t>(v)] = {mu * std::cosh(y), mu * std::sinh(y)};
    };
    place(inner_, yi);
    for (std::size_t a = 0; a < outer_.size(); ++a) place(outer_[a], yo[a]);
    Vec2 sum;
    for (int v : onshell_) {
      sum.t += kin_.sigma[static_cast<std::size_t>(v)] * k[static_cast<std::size_t>(v)].t;
      sum.x += kin_.sigma[static_cast<std::size_t>(v)] * k[static_cast<std::size_t>(v)].x;
    }
    const double ss = -kin_.sigma[static_cast<std::size_t>(s_)];
    ks = {ss * sum.t, ss * sum.x};
    k[static_cast<std::size_t>(s_)] = ks;
    Complex value = 1.0;
    for (int l = 0; l < kin_.n; ++l) {
      value *= packet_factor(kin_, l, k[static_cast<std::size_t>(l)], t_);
      if (value == 0.0) return 0.0;
    }
    value *= spin_factor(kin_, model_.prefactor, k);
    if (term_.factors[static_cast<std::size_t>(s_)].kind == ShellKind::Propagator)
      value /= mu2[static_cast<std::size_t>(s_)] - minkowski(ks);
    return 0.5 * value;  // dy / 2 of the inner slot
  }

  Complex inner(const std::vector<double>& yo, std::span<const double> mu2) const {
    // k_s(y) = A + c mu_i (cosh y, sinh y)
    Vec2 a;
    for (std::size_t q = 0; q < outer_.size(); ++q) {
      const int v = outer_[q];
      const double mu = std::sqrt(mu2[static_cast<std::size_t>(v)]);
      a.t += kin_.sigma[static_cast<std::size_t>(v)] * mu * std::cosh(yo[q]);
      a.x += kin_.sigma[static_cast<std::size_t>(v)] * mu * std::sinh(yo[q]);
    }
    const double ss = -kin_.sigma[static_cast<std::size_t>(s_)];
    a = {ss * a.t, ss * a.x};
    const double c = ss * kin_.sigma[static_cast<std::size_t>(inner_)];
    const double mui = std::sqrt(mu2[static_cast<std::size_t>(inner_)]);
    const double base = minkowski(a) + mui * mui;
    const double alpha = 2.0 * c * mui * a.t;
    const double beta = -2.0 * c * mui * a.x;

    const WavePacket& ps = *kin_.packet[static_cast<std::size_t>(s_)];
    const auto [lo, hi] = kin_.packet[static_cast<std::size_t>(inner_)]->rapidity_range();
    std::vector<double> cuts;
    rapidity_roots(alpha, beta, ps.mass * ps.mass - ps.epsilon - base, cuts);
    rapidity_roots(alpha, beta, ps.mass * ps.mass + ps.epsilon - base, cuts);
    std::vector<double> poles;
    const bool propagator = term_.factors[static_cast<std::size_t>(s_)].kind == ShellKind::Propagator;
    if (propagator) rapidity_roots(alpha, beta, mu2[static_cast<std::size_t>(s_)] - base, poles);
    std::vector<double> points = {lo, hi};
    for (double y : cuts)
      if (y > lo && y < hi) points.push_back(y);
    for (double y : poles)
      if (y > lo && y < hi) points.push_back(y);
    std::sort(points.begin(), points.end());

    auto inside = [&](double y) {
      const Vec2 ks{a.t + c * mui * std::cosh(y), a.x + c * mui * std::sinh(y)};
      return ks.t > 0.0 && std::abs(minkowski(ks) - ps.mass * ps.mass) < ps.epsilon;
    };
    auto is_pole = [&](double y) { return std::find(poles.begin(), poles.end(), y) != poles.end(); };

    const auto& gl = gauss_legendre(options_.points);
    Vec2 ks;
    auto regular = [&](double x0, double x1) {
      Complex acc = 0.0;
      if (!(x1 > x0)) return acc;
      const double h = (x1 - x0) / panels_;
      for (int p = 0; p < panels_; ++p) {
        const double mid = x0 + (p + 0.5) * h;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q)
          acc += 0.5 * h * gl.weights[q] * integrand(mid + 0.5 * h * gl.nodes[q], yo, mu2, ks);
      }
      return acc;
    };
    // principal value: pair y0 + x with y0 - x
    auto symmetric = [&](double y0, double w) {
      Complex acc = 0.0;
      const double h = w / panels_;
      for (int p = 0; p < panels_; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          const double x = mid + 0.5 * h * gl.nodes[q];
          acc += 0.5 * h * gl.weights[q] * (integrand(y0 + x, yo, mu2, ks) + integrand(y0 - x, yo, mu2, ks));
        }
      }
      return acc;
    };

    // Each pole y0 gets a symmetric interval [y0 - w, y0 + w] reaching halfway to its
    // neighbours; the remaining pieces are regular.
    Complex total = 0.0;
    std::vector<double> edges;
    std::vector<std::pair<double, double>> excluded;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!is_pole(points[i]) || i == 0 || i + 1 == points.size()) {
        edges.push_back(points[i]);
        continue;
      }
      const double y0 = points[i];
      const double w = 0.5 * std::min(y0 - points[i - 1], points[i + 1] - y0);
      if (inside(y0 - 0.5 * w) && inside(y0 + 0.5 * w)) {
        total += symmetric(y0, w);
        excluded.emplace_back(y0 - w, y0 + w);
      }
      edges.push_back(y0 - w);
      edges.push_back(y0 + w);
    }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      bool skip = !inside(mid);
      for (const auto& [e0, e1] : excluded) skip = skip || (mid > e0 && mid < e1);
      if (!skip) total += regular(edges[i], edges[i + 1]);
    }
    return total;
  }

  const ScatteringModel& model_;
  const WightmanTerm& term_;
  const Kinematics& kin_;
  double t_;
  OverlapOptions options_;
  int s_ = -1;
  int inner_ = 0;
  int panels_ = 4;
  std::vector<int> onshell_;
  std::vector<int> outer_;
  std::vector<CompositeRule> outer_rules_;
};

void require_two_dimensions(const ScatteringModel& model) {
  if (model.prefactor && model.prefactor->dimension() != 2)
    throw Error(ErrorKind::Unsupported, "scattering is implemented in 1+1 dimensions");
}

}  // namespace

Complex finite_time_overlap(const ScatteringModel& model, const std::vector<WightmanTerm>& terms,
                            const std::vector<WavePacket>& packets, const Channel& channel, double t,
                            const OverlapOptions& options) {
  require_two_dimensions(model);
  const Kinematics kin = setup(packets, channel);
  const int n = kin.n;
  for (const auto& p : packets)
    if (p.species >= model.spectrum.size()) throw Error(ErrorKind::InvalidParameter, "packet species out of range");
  Complex total = 0.0;
  for (const auto& term : terms) {
    if (term.n != n) throw Error(ErrorKind::DimensionMismatch, "term order does not match packet count");
    if (term.determined_slot() < 0) continue;
    TermOverlap overlap(model, term, kin, t, options);
    if (!overlap.active()) continue;
    std::vector<double> mu2(static_cast<std::size_t>(n), 1.0);
    std::vector<int> orders(static_cast<std::size_t>(n), 0);
    std::vector<double> steps(static_cast<std::size_t>(n), 1.0);
    double extra = 1.0;
    for (const auto& f : term.factors) {
      const auto v = static_cast<std::size_t>(f.slot);
      mu2[v] = model.spectrum.mass_squared(f.mass_index);
      steps[v] = options.stencil_step * mu2[v];
      if (f.kind == ShellKind::DeltaMinus || f.kind == ShellKind::DeltaPlus) orders[v] = f.order;
      if (f.kind == ShellKind::Propagator) {
        orders[v] = f.order - 1;
        extra *= sign_power(f.order - 1) / factorial(f.order - 1);
      }
    }
    const std::function<Complex(std::span<const double>)> base = [&](std::span<const double> m) {
      return overlap(m);
    };
    total += term.coefficient * extra * mixed_derivative<Complex>(base, mu2, orders, steps, 0);
  }
  const double norm = n == 2 ? std::pow(kTwoPi, -2.0) : -std::pow(kTwoPi, 2.0 * (n - 2) + 2.0);
  return norm * total;
}

Complex scattering_amplitude(const ScatteringModel& model, const std::vector<WavePacket>& packets,
                             const Channel& channel, const OverlapOptions& options) {
  require_two_dimensions(model);
  for (std::size_t l = 0; l < model.spectrum.size(); ++l)
    if (model.spectrum.multiplicity(l) > 1)
      throw Error(ErrorKind::DivergentTheory,
                  "pole " + std::to_string(l) + " has multiplicity > 1; the amplitude diverges, use divergence-scan");
  const Kinematics kin = setup(packets, channel);
  const int n = kin.n;
  for (const auto& p : packets)
    if (p.species >= model.spectrum.size()) throw Error(ErrorKind::InvalidParameter, "packet species out of range");

  if (n == 2) {
    const WavePacket& a = packets[0];
    const WavePacket& b = packets[1];
    if (a.species != b.species) return 0.0;
    const auto [lo, hi] = a.rapidity_range();
    const auto rule = CompositeRule::on(lo, hi, options.outer_panels, options.points);
    Complex acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double y = rule.nodes[q];
      const std::vector<Vec2> k = {{a.mass * std::cosh(y), a.mass * std::sinh(y)},
                                   {a.mass * std::cosh(y), a.mass * std::sinh(y)}};
      acc += 0.5 * rule.weights[q] * std::conj(a.profile(k[0].t, k[0].x)) * b.profile(k[1].t, k[1].x) *
             spin_factor(kin, model.prefactor, k);
    }
    return std::pow(kTwoPi, -2.0) * model.lambdas[a.species] * acc;
  }
  if (channel.kind != ChannelKind::InOut) return 0.0;

  // Eliminate two slots of the larger group with two-body kinematics.
  const int r = channel.r;
  int p = r, q = r + 1;
  if (n - r < 2) {
    p = 0;
    q = 1;
  }
  std::vector<int> rest;
  for (int l = 0; l < n; ++l)
    if (l != p && l != q) rest.push_back(l);
  std::vector<CompositeRule> rules;
  for (int l : rest) {
    const auto [lo, hi] = kin.packet[static_cast<std::size_t>(l)]->rapidity_range();
    rules.push_back(CompositeRule::on(lo, hi, options.outer_panels, options.points));
  }
  const double mp = kin.packet[static_cast<std::size_t>(p)]->mass;
  const double mq = kin.packet[static_cast<std::size_t>(q)]->mass;
  const int sp = kin.sigma[static_cast<std::size_t>(p)];

  Complex acc = 0.0;
  std::vector<int> idx(rest.size(), 0);
  std::vector<Vec2> k(static_cast<std::size_t>(n));
  for (;;) {
    double w = 1.0;
    Vec2 other;
    for (std::size_t a = 0; a < rest.size(); ++a) {
      const int l = rest[a];
      const double y = rules[a].nodes[static_cast<std::size_t>(idx[a])];
      w *= 0.5 * rules[a].weights[static_cast<std::size_t>(idx[a])];
      const double m = kin.packet[static_cast<std::size_t>(l)]->mass;
      k[static_cast<std::size_t>(l)] = {m * std::cosh(y), m * std::sinh(y)};
      other.t += kin.sigma[static_cast<std::size_t>(l)] * m * std::cosh(y);
      other.x += kin.sigma[static_cast<std::size_t>(l)] * m * std::sinh(y);
    }
    // k_p + k_q = K
    const Vec2 big{-sp * other.t, -sp * other.x};
    const double s2 = minkowski(big);
    if (big.t > 0.0 && s2 > (mp + mq) * (mp + mq)) {
      const double sqrt_s = std::sqrt(s2);
      const double lam = (s2 - (mp + mq) * (mp + mq)) * (s2 - (mp - mq) * (mp - mq));
      const double pstar = std::sqrt(lam) / (2.0 * sqrt_s);
      const double ycm = std::atanh(big.x / big.t);
      const double ep = std::asinh(pstar / mp);
      const double eq = std::asinh(pstar / mq);
      for (int sign : {1, -1}) {
        const double yp = ycm + sign * ep;
        const double yq = ycm - sign * eq;
        k[static_cast<std::size_t>(p)] = {mp * std::cosh(yp), mp * std::sinh(yp)};
        k[static_cast<std::size_t>(q)] = {mq * std::cosh(yq), mq * std::sinh(yq)};
        Complex value = 1.0;
        for (int l = 0; l < n && value != 0.0; ++l) {
          const WavePacket& pk = *kin.packet[static_cast<std::size_t>(l)];
          Complex h = pk.profile(k[static_cast<std::size_t>(l)].t, k[static_cast<std::size_t>(l)].x);
          value *= kin.conjugate[static_cast<std::size_t>(l)] ? std::conj(h) : h;
        }
        if (value == 0.0) continue;
        value *= spin_factor(kin, model.prefactor, k);
        acc += w * value / (4.0 * std::abs(mp * mq * std::sinh(yp - yq)));
      }
    }
    std::size_t a = 0;
    for (; a < rest.size(); ++a) {
      if (++idx[a] < static_cast<int>(rules[a].nodes.size())) break;
      idx[a] = 0;
    }
    if (a == rest.size()) break;
  }
  double bprod = 1.0;
  for (const auto& pk : packets) bprod *= model.pf(pk.species, 1);
  const double d = 2.0;
  return std::pow(kTwoPi, (d * (n - 2) + 4) / 2.0) * Complex(0.0, 1.0) * bprod * acc;
}

std::vector<double> default_t_grid() { return {5.0, 10.0, 20.0, 40.0, 80.0, 160.0}; }

AmplitudeResult divergence_scan(const ScatteringModel& model, std::vector<WavePacket> packets, const Channel& channel,
                                const std::vector<double>& t_grid, std::uint64_t seed, const OverlapOptions& options) {
  if (t_grid.size() < 6) throw Error(ErrorKind::InvalidParameter, "t grid needs at least 6 points");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw Error(ErrorKind::InvalidParameter, "t grid must be positive and increasing");
  const int n = static_cast<int>(packets.size());
  const auto terms = scattering_terms(model, n);

  int rmax = 0;
  for (const auto& p : packets) rmax += model.spectrum.multiplicity(p.species) - 1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  AmplitudeResult result;
  result.t_grid = t_grid;
  constexpr int kAttempts = 5;
  for (int attempt = 0;; ++attempt) {
    result.overlaps.clear();
    for (double t : t_grid) result.overlaps.push_back(finite_time_overlap(model, terms, packets, channel, t, options));
    double norms = 1.0;
    for (const auto& p : packets) norms *= p.norm();
    const double lead = std::abs(result.overlaps.back()) / std::pow(t_grid.back(), rmax);
    if (lead > 1e-6 * norms) break;
    if (attempt + 1 >= kAttempts)
      throw Error(ErrorKind::InconclusivePackets, "leading coefficient " + std::to_string(lead) +
                                                      " below 1e-6 of the packet norms after re-centering");
    for (auto& p : packets) p.center += p.width * jitter(rng);
    result.recentered = attempt + 1;
  }

  const std::size_t first = t_grid.size() / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(t_grid.size() - first);
  for (std::size_t i = first; i < t_grid.size(); ++i) {
    const double a = std::abs(result.overlaps[i]);
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::FitFailure, "overlap vanishes or is not finite");
    const double x = std::log(t_grid[i]);
    const double y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = count * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw Error(ErrorKind::FitFailure, "degenerate t grid");
  const double slope = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / count;
  double ss = 0.0;
  for (std::size_t i = first; i < t_grid.size(); ++i) {
    const double e = std::log(std::abs(result.overlaps[i])) - (intercept + slope * std::log(t_grid[i]));
    ss += e * e;
  }
  result.fitted_r = slope;
  result.residual = std::sqrt(ss / count);
  result.value = result.overlaps.back();
  const Complex prev = result.overlaps[result.overlaps.size() - 2];
  const bool cauchy = std::abs(result.value - prev) <= 1e-3 * std::abs(result.value);
  result.converged = std::abs(slope) < 0.2 && cauchy;
  return result;
}

}  // namespace wickfield
