#include "wickfield/error.hpp"
#include "wickfield/spectrum.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wickfield;

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

// Oracle: collocation solve of sum b_lj / (x + a_l)^j = 1 / prod (x + a_l)^nu_l
// at as many sample points as unknowns (dense Gaussian elimination, 50 digits).
std::vector<double> collocation_coefficients(const MassSpectrum& s) {
  std::vector<std::pair<std::size_t, int>> unknowns;
  for (std::size_t l = 0; l < s.size(); ++l)
    for (int j = 1; j <= s.multiplicity(l); ++j) unknowns.emplace_back(l, j);
  const std::size_t n = unknowns.size();
  std::vector<std::vector<Wide>> a(n, std::vector<Wide>(n + 1));
  for (std::size_t row = 0; row < n; ++row) {
    const Wide x = Wide(0.37) * row + Wide(0.1);
    Wide prod = 1;
    for (std::size_t l = 0; l < s.size(); ++l) prod *= pow(x + Wide(s.mass(l)) * s.mass(l), s.multiplicity(l));
    for (std::size_t c = 0; c < n; ++c)
      a[row][c] = pow(x + Wide(s.mass(unknowns[c].first)) * s.mass(unknowns[c].first), -unknowns[c].second);
    a[row][n] = 1 / prod;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const Wide f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> out(n);
  for (std::size_t c = 0; c < n; ++c) out[c] = static_cast<double>(a[c][n] / a[c][c]);
  return out;
}

MassSpectrum random_spectrum(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_int_distribution<int> mult(1, 3);
  std::uniform_real_distribution<double> mass(0.5, 5.0);
  const int n = count(rng);
  std::vector<Pole> poles;
  while (static_cast<int>(poles.size()) < n) {
    const double m = mass(rng);
    bool ok = true;
    for (const auto& p : poles) ok = ok && std::abs(p.mass - m) >= 0.1;
    if (ok) poles.push_back({m, mult(rng)});
  }
  return MassSpectrum(poles);
}

}  // namespace

TEST(MassSpectrum, RejectsInvalidInput) {
  EXPECT_THROW(MassSpectrum({}), Error);
  EXPECT_THROW(MassSpectrum({{0.0, 1}}), Error);
  EXPECT_THROW(MassSpectrum({{-1.0, 1}}), Error);
  EXPECT_THROW(MassSpectrum({{1.0, 0}}), Error);
  EXPECT_THROW(MassSpectrum({{1.0, 1}, {1.0 + 1e-10, 2}}), Error);
  try {
    MassSpectrum({{1.0, 1}, {1.0, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidSpectrum);
  }
  EXPECT_NO_THROW(MassSpectrum({{1.0, 1}, {1.0 + 1e-8, 1}}));
}

TEST(Kappa, Formula) {
  EXPECT_EQ(kappa(MassSpectrum({{1, 1}})), 0);
  EXPECT_EQ(kappa(MassSpectrum({{1, 1}, {2, 1}})), 2);
  EXPECT_EQ(kappa(MassSpectrum({{1, 2}, {2, 1}})), 4);
}

TEST(PartialFractions, TrivialCases) {
  const auto simple = partial_fractions(MassSpectrum({{1, 1}}));
  EXPECT_DOUBLE_EQ(simple(0, 1), 1.0);
  const auto doubled = partial_fractions(MassSpectrum({{1, 2}}));
  EXPECT_DOUBLE_EQ(doubled(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(doubled(0, 2), 1.0);
}

TEST(PartialFractions, TwoSimplePoles) {
  const MassSpectrum s({{1, 1}, {2, 1}});
  const auto pf = partial_fractions(s);
  EXPECT_NEAR(pf(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(pf(1, 1), -1.0 / 3.0, 1e-15);
  for (double x : {0.0, 1.0, 2.0, 5.0}) {
    const double lhs = 1.0 / ((x + 1.0) * (x + 4.0));
    const double rhs = (1.0 / 3.0) / (x + 1.0) - (1.0 / 3.0) / (x + 4.0);
    EXPECT_NEAR(lhs, rhs, 1e-15);
    EXPECT_NEAR(pf.evaluate(s, x), lhs, 1e-15);
  }
}

TEST(PartialFractions, DoublePoleAgainstCollocationOracle) {
  const MassSpectrum s({{1, 2}, {2, 1}});
  const auto oracle = collocation_coefficients(s);
  ASSERT_EQ(oracle.size(), 3u);
  EXPECT_NEAR(oracle[0], -1.0 / 9.0, 1e-12);
  EXPECT_NEAR(oracle[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(oracle[2], 1.0 / 9.0, 1e-12);
  const auto pf = partial_fractions(s);
  EXPECT_NEAR(pf(0, 1), -1.0 / 9.0, 1e-15);
  EXPECT_NEAR(pf(0, 2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(pf(1, 1), 1.0 / 9.0, 1e-15);
}

TEST(PartialFractions, ExactRationalGolden) {
  const auto b = partial_fractions_exact({{1, 2}, {4, 1}});
  EXPECT_EQ(b[0][0], Rational(-1, 9));
  EXPECT_EQ(b[0][1], Rational(1, 3));
  EXPECT_EQ(b[1][0], Rational(1, 9));
  const auto c = partial_fractions_exact({{1, 1}, {4, 2}, {9, 1}});
  // 1/((x+1)(x+4)^2(x+9)): residue at -1 is 1/(3^2 * 8) = 1/72
  EXPECT_EQ(c[0][0], Rational(1, 72));
  EXPECT_EQ(c[2][0], Rational(-1, 8 * 25));
  EXPECT_THROW(partial_fractions_exact({{4, 1}, {4, 1}}), Error);
}

TEST(PartialFractions, MatchesCollocationOnRandomSpectra) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_spectrum(rng);
    const auto pf = partial_fractions(s);
    const auto oracle = collocation_coefficients(s);
    std::size_t k = 0;
    double scale = 0.0;
    for (double v : oracle) scale = std::max(scale, std::abs(v));
    for (std::size_t l = 0; l < s.size(); ++l)
      for (int j = 1; j <= s.multiplicity(l); ++j) EXPECT_NEAR(pf(l, j), oracle[k++], 1e-12 * scale);
  }
}

TEST(PartialFractionsProperty, ReconstructionDeterminismLeadingCoefficient) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xs(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_spectrum(rng);
    const auto pf = partial_fractions(s);
    EXPECT_EQ(pf, partial_fractions(s));
    double scale = 0.0;
    for (const auto& row : pf.rows())
      for (double b : row) scale = std::max(scale, std::abs(b));
    for (std::size_t l = 0; l < s.size(); ++l)
      EXPECT_GT(std::abs(pf(l, s.multiplicity(l))) / scale, 1e-12);
    for (int i = 0; i < 100; ++i) {
      const double x = xs(rng);
      const double exact = s.inverse_denominator(x);
      EXPECT_LT(std::abs(pf.evaluate(s, x) - exact) / exact, 1e-10);
    }
  }
}
