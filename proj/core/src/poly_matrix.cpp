#include "wickfield/poly_matrix.hpp"

#include "wickfield/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace wickfield {

PolyMatrix::PolyMatrix(int size, int dimension)
    : size_(size), dimension_(dimension),
      entries_(static_cast<std::size_t>(size * size), Polynomial(dimension)) {
  if (size < 1) throw Error(ErrorKind::DimensionMismatch, "matrix size must be positive");
}

PolyMatrix::PolyMatrix(int size, int dimension, std::vector<Polynomial> entries)
    : size_(size), dimension_(dimension), entries_(std::move(entries)) {
  if (size < 1 || entries_.size() != static_cast<std::size_t>(size * size))
    throw Error(ErrorKind::DimensionMismatch, "matrix needs size*size entries");
  for (const Polynomial& p : entries_)
    if (p.variables() != dimension)
      throw Error(ErrorKind::DimensionMismatch, "matrix entries must share the dimension");
}

PolyMatrix PolyMatrix::identity(int size, int dimension) {
  PolyMatrix m(size, dimension);
  for (int i = 0; i < size; ++i) m(i, i) = Polynomial::constant(dimension, 1.0);
  return m;
}

PolyMatrix PolyMatrix::scalar(const Polynomial& p) { return PolyMatrix(1, p.variables(), {p}); }

std::size_t PolyMatrix::index(int row, int col) const {
  if (row < 0 || col < 0 || row >= size_ || col >= size_)
    throw Error(ErrorKind::DimensionMismatch, "matrix index out of range");
  return static_cast<std::size_t>(row * size_ + col);
}

int PolyMatrix::degree() const {
  int d = 0;
  for (const Polynomial& p : entries_) d = std::max(d, p.degree());
  return d;
}

std::vector<Complex> PolyMatrix::evaluate(std::span<const Complex> k) const {
  std::vector<Complex> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.evaluate(k));
  return out;
}

std::vector<Complex> PolyMatrix::evaluate(std::span<const double> k) const {
  std::vector<Complex> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.evaluate(k));
  return out;
}

PolyMatrix wick_rotate(const PolyMatrix& qe) {
  std::vector<Polynomial> rotated;
  rotated.reserve(qe.entries().size());
  for (const Polynomial& p : qe.entries()) rotated.push_back(p.rotate_variable(0));
  return PolyMatrix(qe.size(), qe.dimension(), std::move(rotated));
}

std::vector<double> Representation::apply(std::span<const double> rotation) const {
  if (kind == RepresentationKind::Trivial) return {1.0};
  return {rotation.begin(), rotation.end()};
}

std::vector<double> sample_rotation(int dimension, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double angle = 2.0 * std::numbers::pi * unit(rng);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  if (dimension == 2) return {c, -s, s, c};
  if (dimension == 3) {
    const double z = 2.0 * unit(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double x = r * std::cos(phi);
    const double y = r * std::sin(phi);
    const double t = 1.0 - c;
    // Rodrigues formula
    return {c + x * x * t,     x * y * t - z * s, x * z * t + y * s,
            y * x * t + z * s, c + y * y * t,     y * z * t - x * s,
            z * x * t - y * s, z * y * t + x * s, c + z * z * t};
  }
  throw Error(ErrorKind::Unsupported, "rotations are sampled for d = 2, 3 only");
}

CovarianceReport check_covariance(const PolyMatrix& qe, const Representation& rep, int samples,
                                  std::uint64_t seed) {
  const int d = qe.dimension();
  const int L = qe.size();
  if (rep.dimension != d || rep.size() != L)
    throw Error(ErrorKind::DimensionMismatch, "representation does not match Q_E");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  CovarianceReport report;
  for (int sample = 0; sample < samples; ++sample) {
    const auto rot = sample_rotation(d, rng);
    std::vector<double> k(static_cast<std::size_t>(d));
    for (double& x : k) x = coord(rng);
    std::vector<double> rk(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) rk[static_cast<std::size_t>(i)] += rot[static_cast<std::size_t>(i * d + j)] * k[static_cast<std::size_t>(j)];

    const auto tau = rep.apply(rot);
    const auto q = qe.evaluate(k);
    const auto q_rot = qe.evaluate(rk);
    // tau(R) Q(k) tau(R)^T  (tau orthogonal)
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        Complex lhs{};
        for (int c = 0; c < L; ++c)
          for (int e = 0; e < L; ++e)
            lhs += tau[static_cast<std::size_t>(a * L + c)] * q[static_cast<std::size_t>(c * L + e)] *
                   tau[static_cast<std::size_t>(b * L + e)];
        const Complex rhs = q_rot[static_cast<std::size_t>(a * L + b)];
        report.max_residual = std::max(report.max_residual, std::abs(lhs - rhs));
        report.scale = std::max(report.scale, std::abs(rhs));
      }
    }
  }
  report.scale = std::max(report.scale, 1.0);
  report.pass = report.max_residual < 1e-9 * report.scale;
  return report;
}

std::vector<bool> is_prime_wrt_factors(const PolyMatrix& qe, const MassSpectrum& spectrum) {
  const int d = qe.dimension();
  std::vector<bool> prime;
  for (std::size_t l = 0; l < spectrum.size(); ++l) {
    Polynomial rest = Polynomial::constant(d, spectrum.mass_squared(l));
    for (int i = 1; i < d; ++i) rest += Polynomial::variable(d, i).pow(2);
    bool divides_all = true;
    for (const Polynomial& entry : qe.entries()) {
      const Polynomial r = entry.remainder_by_k0_square(rest);
      const double scale = std::max(1.0, entry.max_abs_coefficient());
      if (r.max_abs_coefficient() > 1e-10 * scale) {
        divides_all = false;
        break;
      }
    }
    prime.push_back(!divides_all);
  }
  return prime;
}

NoiseCumulantTensor::NoiseCumulantTensor(int order, int size) : order_(order), size_(size) {
  if (order < 1 || size < 1) throw Error(ErrorKind::DimensionMismatch, "cumulant needs order, size >= 1");
  std::size_t count = 1;
  for (int r = 0; r < order; ++r) count *= static_cast<std::size_t>(size);
  values_.assign(count, Complex{});
}

std::size_t NoiseCumulantTensor::flat(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != order_)
    throw Error(ErrorKind::DimensionMismatch, "cumulant index count must equal its order");
  std::size_t f = 0;
  for (int i : indices) {
    if (i < 0 || i >= size_) throw Error(ErrorKind::DimensionMismatch, "cumulant index out of range");
    f = f * static_cast<std::size_t>(size_) + static_cast<std::size_t>(i);
  }
  return f;
}

void NoiseCumulantTensor::set_symmetric(const std::vector<int>& indices, Complex value) {
  std::vector<int> perm = indices;
  std::sort(perm.begin(), perm.end());
  do {
    values_.at(flat(perm)) = value;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

NoiseCumulantTensor NoiseCumulantTensor::diagonal(int order, int size, Complex value) {
  NoiseCumulantTensor c(order, size);
  for (int a = 0; a < size; ++a) c.set_symmetric(std::vector<int>(static_cast<std::size_t>(order), a), value);
  return c;
}

bool NoiseCumulantTensor::is_symmetric(double tol) const {
  std::vector<int> idx(static_cast<std::size_t>(order_), 0);
  for (std::size_t f = 0; f < values_.size(); ++f) {
    std::size_t rem = f;
    for (int r = order_ - 1; r >= 0; --r) {
      idx[static_cast<std::size_t>(r)] = static_cast<int>(rem % static_cast<std::size_t>(size_));
      rem /= static_cast<std::size_t>(size_);
    }
    std::vector<int> perm = idx;
    std::sort(perm.begin(), perm.end());
    do {
      if (std::abs(values_[flat(perm)] - values_[f]) > tol) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return true;
}

TensorPolynomial::TensorPolynomial(PolyMatrix q, NoiseCumulantTensor c)
    : matrix_(std::move(q)), cumulant_(std::move(c)) {
  if (matrix_.size() != cumulant_.size())
    throw Error(ErrorKind::DimensionMismatch, "cumulant size must equal the matrix size");
}

std::vector<Complex> TensorPolynomial::evaluate_all(std::span<const Complex> momenta) const {
  const int n = order();
  const int d = dimension();
  const int L = size();
  if (static_cast<int>(momenta.size()) != n * d)
    throw Error(ErrorKind::DimensionMismatch, "expected n*d momentum components");
  std::vector<std::vector<Complex>> q(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) q[static_cast<std::size_t>(r)] = matrix_.evaluate(momenta.subspan(static_cast<std::size_t>(r * d), static_cast<std::size_t>(d)));

  // Contract one slot at a time: T_r[a_1..a_r, b_{r+1}..b_n].
  std::vector<Complex> cur = cumulant_.values();
  std::size_t inner = cur.size();
  std::size_t outer = 1;
  for (int r = 0; r < n; ++r) {
    inner /= static_cast<std::size_t>(L);
    std::vector<Complex> next(cur.size(), Complex{});
    const auto& qr = q[static_cast<std::size_t>(r)];
    for (std::size_t o = 0; o < outer; ++o)
      for (int b = 0; b < L; ++b)
        for (int a = 0; a < L; ++a) {
          const Complex w = qr[static_cast<std::size_t>(b * L + a)];
          if (w == Complex{}) continue;
          const std::size_t src = (o * static_cast<std::size_t>(L) + static_cast<std::size_t>(b)) * inner;
          const std::size_t dst = (o * static_cast<std::size_t>(L) + static_cast<std::size_t>(a)) * inner;
          for (std::size_t i = 0; i < inner; ++i) next[dst + i] += w * cur[src + i];
        }
    cur = std::move(next);
    outer *= static_cast<std::size_t>(L);
  }
  return cur;
}

Complex TensorPolynomial::evaluate(std::span<const int> components, std::span<const Complex> momenta) const {
  const auto all = evaluate_all(momenta);
  std::size_t f = 0;
  for (int a : components) {
    if (a < 0 || a >= size()) throw Error(ErrorKind::DimensionMismatch, "component out of range");
    f = f * static_cast<std::size_t>(size()) + static_cast<std::size_t>(a);
  }
  return all.at(f);
}

TensorPolynomial tensor_assemble(const PolyMatrix& qe, const NoiseCumulantTensor& c, int order) {
  if (c.order() != order) throw Error(ErrorKind::DimensionMismatch, "cumulant order differs from n");
  return TensorPolynomial(qe, c);
}

}  // namespace wickfield
