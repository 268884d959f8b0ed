// Microbenchmarks for the hot paths: dart generation, intersection
// fractions, segment subtraction, saturated line-dart throws, and the
// closed-form failure lengths.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "kdarts/dart_gen.hpp"
#include "kdarts/mps.hpp"
#include "kdarts/pof.hpp"
#include "kdarts/rng.hpp"
#include "kdarts/shapes.hpp"

namespace {

using namespace kdarts;

void BM_rng_next_double(benchmark::State& state) {
  RngStream rng(1, 2);
  double acc = 0.0;
  for (auto _ : state) acc += rng.next_double();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_rng_next_double);

void BM_aligned_dart(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const BoxDomain domain = BoxDomain::two_cube(d);
  RngStream rng(1, 3);
  for (auto _ : state) {
    Dart dart = gen_aligned_dart(domain, k, rng);
    benchmark::DoNotOptimize(dart);
  }
}
BENCHMARK(BM_aligned_dart)->Args({3, 1})->Args({3, 2})->Args({6, 3});

void BM_sphere_line_fraction(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Sphere s{d, 1.0, {}};
  const BoxDomain domain = BoxDomain::two_cube(d);
  std::vector<int> idx;
  for (int i = 1; i < d; ++i) idx.push_back(i);
  std::vector<double> val(idx.size());
  RngStream rng(1, 4);
  double acc = 0.0;
  for (auto _ : state) {
    for (auto& v : val) v = rng.uniform(-1.0, 1.0);
    acc += flat_fraction_sphere_aligned(d, idx, val, s, domain);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_sphere_line_fraction)->Arg(2)->Arg(3)->Arg(6);

void BM_ellipsoid_flat_fraction(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  RngStream shape_rng(1, 5);
  const Ellipsoid e = make_ellipsoid(d, 0.5, 10, shape_rng);
  const BoxDomain domain = BoxDomain::two_cube(d);
  std::vector<int> idx;
  for (int i = k; i < d; ++i) idx.push_back(i);
  std::vector<double> val(idx.size());
  RngStream rng(1, 6);
  double acc = 0.0;
  for (auto _ : state) {
    for (auto& v : val) v = rng.uniform(-1.0, 1.0);
    acc += flat_fraction_aligned(d, idx, val, e, domain);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ellipsoid_flat_fraction)
    ->Args({2, 1})
    ->Args({3, 1})
    ->Args({3, 2})
    ->Args({6, 1});

void BM_segment_subtract(benchmark::State& state) {
  RngStream rng(1, 7);
  mps::SegmentList list;
  for (auto _ : state) {
    list.reset_unit();
    for (int i = 0; i < 40; ++i) {
      const double a = rng.next_double();
      list.subtract(a, a + 0.02);
    }
    benchmark::DoNotOptimize(list.total_length());
  }
  state.SetItemsProcessed(state.iterations() * 40);
}
BENCHMARK(BM_segment_subtract);

// Throws into an already saturated cloud, so the measured cost is the
// common near-termination miss path.
void BM_mps_line_dart_saturated(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  mps::MpsConfig cfg;
  cfg.dim = d;
  cfg.r_f = d == 2 ? 0.05 : 0.2;
  cfg.void_fraction = 1e-3;
  mps::MpsState mps_state(cfg);
  RngStream rng(1, 8);
  for (int run = 0; run < 100;) {
    const auto res = mps::throw_line_dart(mps_state, cfg, rng);
    run = res.hit ? 0 : run + 1;
  }
  for (auto _ : state) {
    const auto res = mps::throw_line_dart(mps_state, cfg, rng);
    benchmark::DoNotOptimize(res.hit);
  }
}
BENCHMARK(BM_mps_line_dart_saturated)->Arg(2)->Arg(3);

void BM_failure_length(benchmark::State& state) {
  const bool cross = state.range(0) != 0;
  const int d = static_cast<int>(state.range(1));
  const pof::ResponseSurface s{cross ? pof::SurfaceKind::planar_cross
                                     : pof::SurfaceKind::circular_parabola,
                               d};
  const double y_t = pof::calibrate_threshold(s, 1e-4);
  std::vector<double> fixed(static_cast<std::size_t>(d) - 1);
  RngStream rng(1, 9);
  double acc = 0.0;
  for (auto _ : state) {
    for (auto& v : fixed) v = rng.next_double();
    acc += pof::failure_length(s, y_t, 0, fixed);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_failure_length)->Args({0, 3})->Args({0, 6})->Args({1, 3})->Args({1, 6});

}  // namespace

BENCHMARK_MAIN();
