#include "wickfield/error.hpp"
#include "wickfield/scattering.hpp"

#include <gtest/gtest.h>

using namespace wickfield;

namespace {

// heavy (2.5) -> two light (1.0): the kinematically open channel
std::vector<WavePacket> decay_packets(const MassSpectrum& s) {
  return {make_packet(s, 1, 0.0, 0.6, 2.5), make_packet(s, 0, 1.0, 0.6, 0.9), make_packet(s, 0, -1.0, 0.6, 0.9)};
}

}  // namespace

TEST(Packets, Windows) {
  const MassSpectrum one({{1.0, 1}});
  const auto p = make_packet(one, 0, 0.0, 0.5, 0.3);
  EXPECT_EQ(p.profile(std::sqrt(1.29), 0.0) != 0.0, true);
  EXPECT_EQ(p.profile(std::sqrt(1.31), 0.0), 0.0);
  EXPECT_EQ(p.profile(std::sqrt(0.69), 0.0), 0.0);
  EXPECT_EQ(p.profile(-1.0, 0.0), 0.0);
  EXPECT_NEAR(std::abs(p.profile(1.0, 0.0)), 1.0, 1e-15);
  EXPECT_GT(p.norm(), 0.0);

  const MassSpectrum two({{1.0, 1}, {2.0, 1}});
  EXPECT_NO_THROW(make_packet(two, 0, 0.0, 0.5, 0.3));
  EXPECT_NO_THROW(make_packet(two, 1, 0.0, 0.5, 0.3));
  const MassSpectrum close({{1.0, 1}, {1.05, 1}});
  try {
    make_packet(close, 0, 0.0, 0.5, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidWindow);
  }
  EXPECT_THROW(make_packet(one, 0, 0.0, 0.5, 1.2), Error);
  EXPECT_THROW(make_packet(one, 0, 0.0, -0.5, 0.3), Error);
  EXPECT_THROW(make_packet(one, 3, 0.0, 0.5, 0.3), Error);
}

TEST(Amplitude, TwoPointSpeciesOrthogonality) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.0, 1}}), {1.0, 0.5});
  const auto a = make_packet(model.spectrum, 0, 0.2, 0.5, 0.3);
  const auto b = make_packet(model.spectrum, 1, 0.2, 0.5, 0.3);
  const Channel ch{1, ChannelKind::InOut};
  const auto diag = scattering_amplitude(model, {a, a}, ch);
  EXPECT_GT(std::abs(diag), 1e-3);
  EXPECT_LE(std::abs(scattering_amplitude(model, {a, b}, ch)), 1e-10 * std::abs(diag));
  // lambda enters linearly
  EXPECT_NEAR(std::abs(scattering_amplitude(model, {b, b}, ch)) / std::abs(diag), 0.5 * 2.0 * 1.0, 1.0);
  // the finite-time two-point overlap is already its limit
  const auto terms = scattering_terms(model, 2);
  for (double t : {1.0, 50.0})
    EXPECT_LT(std::abs(finite_time_overlap(model, terms, {a, a}, ch, t) - diag), 1e-10 * std::abs(diag));
  EXPECT_LE(std::abs(finite_time_overlap(model, terms, {a, b}, ch, 10.0)), 1e-10 * std::abs(diag));
}

TEST(Amplitude, InInAndOutOutVanish) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.5, 1}}));
  const auto pk = decay_packets(model.spectrum);
  const auto inout = scattering_amplitude(model, pk, {1, ChannelKind::InOut});
  EXPECT_GT(std::abs(inout), 1e-3);
  EXPECT_EQ(scattering_amplitude(model, pk, {1, ChannelKind::InIn}), std::complex<double>(0.0));
  EXPECT_EQ(scattering_amplitude(model, pk, {1, ChannelKind::OutOut}), std::complex<double>(0.0));
  // at finite time the two surviving terms cancel progressively
  const auto terms = scattering_terms(model, 3);
  const double early = std::abs(finite_time_overlap(model, terms, pk, {1, ChannelKind::InIn}, 10.0));
  const double late = std::abs(finite_time_overlap(model, terms, pk, {1, ChannelKind::InIn}, 80.0));
  EXPECT_LT(late, early);
  EXPECT_LT(late, 1e-2 * std::abs(inout));
}

TEST(Amplitude, FiniteTimeApproachesClosedForm) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.5, 1}}));
  const auto pk = decay_packets(model.spectrum);
  const Channel ch{1, ChannelKind::InOut};
  const auto amp = scattering_amplitude(model, pk, ch);
  const auto terms = scattering_terms(model, 3);
  double previous = 1.0;
  for (double t : {10.0, 20.0, 40.0, 80.0}) {
    const double err = std::abs(finite_time_overlap(model, terms, pk, ch, t) - amp) / std::abs(amp);
    EXPECT_LT(err, previous) << t;
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Amplitude, TwoToOneChannel) {
  // two light in, one heavy out: the pair is eliminated from the first group
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.5, 1}}));
  const std::vector<WavePacket> pk = {make_packet(model.spectrum, 0, 1.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, -1.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 1, 0.0, 0.6, 2.5)};
  const Channel ch{2, ChannelKind::InOut};
  const auto amp = scattering_amplitude(model, pk, ch);
  EXPECT_GT(std::abs(amp), 1e-3);
  const auto v = finite_time_overlap(model, scattering_terms(model, 3), pk, ch, 80.0);
  EXPECT_LT(std::abs(v - amp) / std::abs(amp), 1e-3);
}

TEST(AmplitudeProperty, MultilinearAndTranslationInvariant) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.5, 1}}));
  const Channel ch{1, ChannelKind::InOut};
  auto pk = decay_packets(model.spectrum);
  const auto base = scattering_amplitude(model, pk, ch);
  auto scaled = pk;
  scaled[1].scale = 2.0;
  EXPECT_LT(std::abs(scattering_amplitude(model, scaled, ch) - 2.0 * base), 1e-13 * std::abs(base));
  // superposition through the polarization amplitude
  auto a = pk, b = pk, ab = pk;
  a[2].polarization = {std::complex<double>(0.3, 0.1)};
  b[2].polarization = {std::complex<double>(-1.2, 0.4)};
  ab[2].polarization = {a[2].polarization[0] + b[2].polarization[0]};
  const auto sum = scattering_amplitude(model, a, ch) + scattering_amplitude(model, b, ch);
  EXPECT_LT(std::abs(scattering_amplitude(model, ab, ch) - sum), 1e-13 * std::abs(sum));
  // common spatial translation
  auto moved = pk;
  for (auto& p : moved) p.position += 0.7;
  EXPECT_LT(std::abs(std::abs(scattering_amplitude(model, moved, ch)) - std::abs(base)), 1e-6 * std::abs(base));
  const auto terms = scattering_terms(model, 3);
  const auto f0 = finite_time_overlap(model, terms, pk, ch, 20.0);
  const auto f1 = finite_time_overlap(model, terms, moved, ch, 20.0);
  EXPECT_LT(std::abs(f1 - f0), 1e-6 * std::abs(f0));
}

TEST(Amplitude, DisjointSupportGivesZero) {
  // all three packets on one mass: conservation cannot be met inside the windows
  const ScatteringModel model(MassSpectrum({{1.0, 1}}));
  const std::vector<WavePacket> pk = {make_packet(model.spectrum, 0, 0.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, 1.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, -1.0, 0.6, 0.9)};
  const Channel ch{1, ChannelKind::InOut};
  EXPECT_EQ(scattering_amplitude(model, pk, ch), std::complex<double>(0.0));
  EXPECT_EQ(finite_time_overlap(model, scattering_terms(model, 3), pk, ch, 20.0), std::complex<double>(0.0));
}

TEST(Amplitude, Errors) {
  const ScatteringModel dbl(MassSpectrum({{1.0, 2}}));
  const auto p = make_packet(dbl.spectrum, 0, 0.0, 0.5, 0.3);
  try {
    scattering_amplitude(dbl, {p, p, p}, {1, ChannelKind::InOut});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergentTheory);
    EXPECT_NE(std::string(e.what()).find("divergence-scan"), std::string::npos);
  }
  const ScatteringModel one(MassSpectrum({{1.0, 1}}));
  const auto q = make_packet(one.spectrum, 0, 0.0, 0.5, 0.3);
  EXPECT_THROW(scattering_amplitude(one, {q, q, q}, {0, ChannelKind::InOut}), Error);
  EXPECT_THROW(scattering_amplitude(one, {q, q, q}, {3, ChannelKind::InOut}), Error);
  EXPECT_THROW(divergence_scan(one, {q, q, q}, {1, ChannelKind::InOut}, {1, 2, 3}), Error);
  EXPECT_THROW(divergence_scan(one, {q, q, q}, {1, ChannelKind::InOut}, {1, 2, 3, 5, 4, 6}), Error);
}

TEST(DivergenceScan, SimplePolesConverge) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.5, 1}}));
  const auto r = divergence_scan(model, decay_packets(model.spectrum), {1, ChannelKind::InOut}, default_t_grid());
  EXPECT_NEAR(r.fitted_r, 0.0, 0.2);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.t_grid.size(), 6u);
  const auto amp = scattering_amplitude(model, decay_packets(model.spectrum), {1, ChannelKind::InOut});
  EXPECT_LT(std::abs(r.value - amp) / std::abs(amp), 1e-3);
}

TEST(DivergenceScan, OnlyHigherOrderSpeciesGrow) {
  // double pole on the light species only: its two out-slots each add one power of t
  const ScatteringModel model(MassSpectrum({{1.0, 2}, {2.5, 1}}));
  const std::vector<WavePacket> pk = {make_packet(model.spectrum, 1, 0.0, 0.6, 2.5),
                                      make_packet(model.spectrum, 0, 1.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, -1.0, 0.6, 0.9)};
  const auto r = divergence_scan(model, pk, {1, ChannelKind::InOut}, default_t_grid());
  EXPECT_NEAR(r.fitted_r, 2.0, 0.2);
  EXPECT_FALSE(r.converged);
}

TEST(DivergenceScan, VanishingOverlapIsInconclusive) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}}));
  const std::vector<WavePacket> pk = {make_packet(model.spectrum, 0, 0.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, 1.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, -1.0, 0.6, 0.9)};
  try {
    divergence_scan(model, pk, {1, ChannelKind::InOut}, default_t_grid());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InconclusivePackets);
  }
}
