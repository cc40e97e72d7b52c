#include "wickfield/green.hpp"
#include "wickfield/poly_matrix.hpp"
#include "wickfield/polynomial.hpp"
#include "wickfield/scattering.hpp"
#include "wickfield/spectrum.hpp"
#include "wickfield/wightman.hpp"

#include <benchmark/benchmark.h>

using namespace wickfield;

static void BM_PartialFractions(benchmark::State& state) {
  const int nu = static_cast<int>(state.range(0));
  const MassSpectrum s({{0.7, nu}, {1.1, nu}, {1.9, nu}, {2.6, nu}});
  for (auto _ : state) benchmark::DoNotOptimize(partial_fractions(s));
}
BENCHMARK(BM_PartialFractions)->DenseRange(1, 3);

static void BM_GreenBessel(benchmark::State& state) {
  const std::vector<double> x = {0.6, 0.8, 0.0};
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(green_function(1.3, j, x, 3));
}
BENCHMARK(BM_GreenBessel)->Arg(1)->Arg(2)->Arg(4);

static void BM_ParsePoly(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_poly("(k0 + 2*k1 - i*k2)^4 * (k0^2 + k1^2 + k2^2 + 1)", 3));
}
BENCHMARK(BM_ParsePoly);

static void BM_TensorAssemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto q = PolyMatrix::identity(3, 3);
  const auto c = NoiseCumulantTensor::diagonal(n, 3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(tensor_assemble(q, c, n));
}
BENCHMARK(BM_TensorAssemble)->DenseRange(2, 4);

static void BM_BuildTerms(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MassSpectrum s({{1.0, 2}, {1.8, 1}});
  const auto pf = partial_fractions(s);
  for (auto _ : state) benchmark::DoNotOptimize(build_wightman_terms(s, pf, n));
}
BENCHMARK(BM_BuildTerms)->DenseRange(2, 5);

static void BM_SchwingerTwoPoint(benchmark::State& state) {
  const MassSpectrum s({{1.0, 1}});
  const std::vector<EuclideanPoint> pts = {{0.0, 0.0}, {0.9, 0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(schwinger_truncated(s, {{0, 1}, {0, 1}}, pts, 2));
}
BENCHMARK(BM_SchwingerTwoPoint)->Unit(benchmark::kMillisecond);

static void BM_LaplaceThreePoint(benchmark::State& state) {
  const MassSpectrum s({{1.0, 1}});
  const auto terms = build_wightman_terms(s, partial_fractions(s), 3);
  const std::vector<EuclideanPoint> pts = {{0.0, 0.0}, {0.8, 0.4}, {1.7, -0.2}};
  for (auto _ : state) benchmark::DoNotOptimize(laplace_eval(terms, s, pts, 2));
}
BENCHMARK(BM_LaplaceThreePoint)->Unit(benchmark::kMillisecond);

static void BM_FiniteTimeOverlap(benchmark::State& state) {
  const ScatteringModel model(MassSpectrum({{1.0, 1}, {2.5, 1}}));
  const std::vector<WavePacket> pk = {make_packet(model.spectrum, 1, 0.0, 0.6, 2.5),
                                      make_packet(model.spectrum, 0, 1.0, 0.6, 0.9),
                                      make_packet(model.spectrum, 0, -1.0, 0.6, 0.9)};
  const auto terms = scattering_terms(model, 3);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(finite_time_overlap(model, terms, pk, {1, ChannelKind::InOut}, t));
}
BENCHMARK(BM_FiniteTimeOverlap)->Arg(10)->Arg(80)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
