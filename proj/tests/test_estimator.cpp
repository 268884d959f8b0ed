#include "kdarts/estimator.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kdarts/dart_gen.hpp"
#include "kdarts/shapes.hpp"
#include "support/stat_utils.hpp"

using namespace kdarts;

namespace {

struct FnIntegrable : FlatIntegrable {
  explicit FnIntegrable(std::function<double(std::span<const double>)> f)
      : fn(std::move(f)) {}
  double value(std::span<const double> x) const override { return fn(x); }
  std::function<double(std::span<const double>)> fn;
};

Flat aligned_flat(int dim, std::vector<int> idx, std::vector<double> val) {
  Flat f;
  f.dim = dim;
  f.fixed_idx = std::move(idx);
  f.fixed_val = std::move(val);
  return f;
}

}  // namespace

TEST_CASE("grid integration on flats") {
  const auto unit2 = BoxDomain::unit(2);
  const auto ones = [](std::span<const double>) { return 1.0; };
  const Flat k1 = aligned_flat(2, {0}, {0.3});
  CHECK(integrate_flat_grid(k1, ones, unit2, 10) == doctest::Approx(1.0).epsilon(1e-15));

  const auto linear = [](std::span<const double> x) { return x[1]; };
  CHECK(integrate_flat_grid(k1, linear, unit2, 100) ==
        doctest::Approx(0.5).epsilon(1e-15));

  // Chord of the unit circle at distance 0.5: sqrt(3).
  const Sphere circle{2, 1.0, {}};
  const SphereIndicator ind(circle);
  const auto f = [&](std::span<const double> x) { return ind.value(x); };
  const Flat chord = aligned_flat(2, {0}, {0.5});
  const double got =
      integrate_flat_grid(chord, f, BoxDomain::two_cube(2), 10000);
  CHECK(got == doctest::Approx(std::sqrt(3.0)).epsilon(1e-3));

  CHECK_THROWS_AS((void)integrate_flat_grid(k1, ones, unit2, 1),
                  std::invalid_argument);
}

TEST_CASE("grid integration on an oriented line") {
  // Diagonal through the center of the two-cube: integral of 1 equals the
  // clip length 2*sqrt(2).
  Flat diag;
  diag.dim = 2;
  const double c = std::sqrt(0.5);
  diag.orientation = Flat::Oriented{{c, c}, {0.0, 0.0}};
  const auto ones = [](std::span<const double>) { return 1.0; };
  CHECK(integrate_flat_grid(diag, ones, BoxDomain::two_cube(2), 64) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("flat averages use closed forms when available") {
  const auto box3 = BoxDomain::two_cube(3);
  const SphereIndicator ind(Sphere{3, 1.0, {}});

  const FnIntegrable one([](std::span<const double>) { return 1.0; });
  CHECK(flat_average(aligned_flat(3, {0, 1}, {0.2, -0.4}), one, box3) ==
        doctest::Approx(1.0));

  // Chord through the origin spans the diameter.
  CHECK(flat_average(aligned_flat(3, {0, 1}, {0.0, 0.0}), ind, box3) ==
        doctest::Approx(1.0));

  // Equatorial disk over the 2x2 slab cross-section.
  CHECK(flat_average(aligned_flat(3, {2}, {0.0}), ind, box3) ==
        doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-12));

  // The grid fallback agrees with the closed form.
  const FnIntegrable raw([&](std::span<const double> x) { return ind.value(x); });
  const Flat slice = aligned_flat(3, {2}, {0.55});
  CHECK(flat_average(slice, raw, box3, 512) ==
        doctest::Approx(flat_average(slice, ind, box3)).epsilon(2e-3));
}

TEST_CASE("degenerate flats are rejected") {
  const FnIntegrable one([](std::span<const double>) { return 1.0; });
  Flat outside;
  outside.dim = 2;
  outside.orientation = Flat::Oriented{{0.0, 1.0}, {5.0, 0.0}};
  CHECK_THROWS_AS((void)flat_average(outside, one, BoxDomain::two_cube(2)),
                  std::runtime_error);
}

TEST_CASE("dart values average the flats") {
  const auto box3 = BoxDomain::two_cube(3);
  const SphereIndicator ind(Sphere{3, 1.0, {}});
  RngStream rng(31, 0);

  const Dart point = gen_point_dart(box3, rng);
  const double at_point = ind.value(point.flats[0].fixed_val);
  CHECK(dart_value(point, ind, box3) == at_point);

  // k = d: one flat, nothing pinned, exact domain average.
  const Dart full = gen_aligned_dart(box3, 3, rng);
  REQUIRE(full.flats.size() == 1);
  CHECK(dart_value(full, ind, box3) ==
        doctest::Approx(std::numbers::pi / 6.0).epsilon(1e-12));

  const FnIntegrable c7([](std::span<const double>) { return 7.0; });
  const Dart mixed = gen_aligned_dart(box3, 1, rng);
  CHECK(dart_value(mixed, c7, box3) == doctest::Approx(7.0));
}

TEST_CASE("estimate_mean on constants and the sphere") {
  const auto box3 = BoxDomain::two_cube(3);
  RngStream rng(31, 1);
  std::vector<Dart> darts;
  for (int i = 0; i < 50; ++i) darts.push_back(gen_point_dart(box3, rng));

  const FnIntegrable c2([](std::span<const double>) { return 2.0; });
  const Estimate flat = estimate_mean(c2, darts, box3);
  CHECK(flat.mean == doctest::Approx(2.0));
  CHECK(flat.std_error == doctest::Approx(0.0));
  CHECK(flat.n == 50);

  darts.clear();
  for (int i = 0; i < 4000; ++i) darts.push_back(gen_point_dart(box3, rng));
  const SphereIndicator ind(Sphere{3, 1.0, {}});
  const Estimate est = estimate_mean(ind, darts, box3, true);
  CHECK(est.per_sample.size() == 4000);
  CHECK(est.mean == doctest::Approx(std::numbers::pi / 6.0).epsilon(0.08));
  CHECK(est.std_error > 0.0);

  CHECK_THROWS_AS((void)estimate_mean(ind, std::span<const Dart>{}, box3),
                  std::invalid_argument);
}

TEST_CASE("standard error shrinks like n^{-1/2}") {
  const auto box3 = BoxDomain::two_cube(3);
  const SphereIndicator ind(Sphere{3, 1.0, {}});
  const std::vector<double> ns = {100, 400, 1600};
  std::vector<double> ses;
  RngStream rng(31, 2);
  for (const double n : ns) {
    std::vector<Dart> darts;
    for (int i = 0; i < static_cast<int>(n); ++i)
      darts.push_back(gen_point_dart(box3, rng));
    ses.push_back(estimate_mean(ind, darts, box3).std_error);
  }
  CHECK(testsupport::loglog_slope(ns, ses) ==
        doctest::Approx(-0.5).epsilon(0.3));
}
