#include <qkg/approx.hpp>
#include <qkg/exponents.hpp>
#include <qkg/exterior.hpp>
#include <qkg/flow.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace qkg;

namespace {

AffineSubspace desk() { return AffineSubspace(1, 2, {parse_entry("sqrt2-1")}, {{parse_entry("sqrt3-1")}}); }

Multivector<Rational> random_blade(std::mt19937_64& gen, Frame f, int grade) {
  std::uniform_int_distribution<int> d(-9, 9);
  auto out = Multivector<Rational>::scalar(f, Rational(1));
  for (int g = 0; g < grade; ++g) {
    std::vector<Rational> c;
    for (int i = 0; i < f.dim(); ++i) c.emplace_back(d(gen), 1 + (d(gen) + 9) % 5);
    out = wedge(out, Multivector<Rational>::vector(f, c));
  }
  return out;
}

void BM_Wedge(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const Frame f = Frame::ambient(2, 3);
  const auto u = random_blade(gen, f, 2);
  const auto w = random_blade(gen, f, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wedge(u, w));
}
BENCHMARK(BM_Wedge)->Arg(1)->Arg(2)->Arg(3);

void BM_Omega(benchmark::State& state) {
  const EntryMatrix a{{parse_entry("phi")}};
  for (auto _ : state) benchmark::DoNotOptimize(omega(a, state.range(0)));
}
BENCHMARK(BM_Omega)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_OrbitShortestVector(benchmark::State& state) {
  const auto h = desk();
  const auto p = FlowParameters::make(1, 2, static_cast<int>(state.range(0)), Real("1e-6"), 0.5, 1.0 / 12);
  const double x[] = {0.123};
  for (auto _ : state) benchmark::DoNotOptimize(orbit_shortest_vector(h, x, p, NormKind::euclidean));
}
BENCHMARK(BM_OrbitShortestVector)->Arg(0)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_BadSetGrid(benchmark::State& state) {
  const auto h = desk();
  const Ball u({0.0}, 0.5);
  const auto pts = grid_points(u, 1000);
  for (auto _ : state)
    benchmark::DoNotOptimize(measure_bad_set(h, u, PsiFunction::power(1, 2), 1e-3, state.range(0), pts));
}
BENCHMARK(BM_BadSetGrid)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
