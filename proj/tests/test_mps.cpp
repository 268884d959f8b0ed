#include "kdarts/mps.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "support/stat_utils.hpp"

using namespace kdarts;
using namespace kdarts::mps;

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d2);
}

double min_pairwise(const PointCloud& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j)
      best = std::min(best, dist(cloud.point(i), cloud.point(j)));
  return best;
}

std::vector<double> endpoints_of(const SegmentList& g) {
  return {g.endpoints().begin(), g.endpoints().end()};
}

}  // namespace

TEST_CASE("segment subtraction splits, trims, and drops covered segments") {
  SegmentList g;
  g.reset_unit();
  g.subtract(0.4, 0.6);
  CHECK(endpoints_of(g) == std::vector<double>{0.0, 0.4, 0.6, 1.0});

  g.reset_unit();
  g.subtract(-0.5, -0.1);
  CHECK(endpoints_of(g) == std::vector<double>{0.0, 1.0});

  // Trim both outer segments and drop the covered endpoints 0.3 and 0.5.
  g.clear();
  g.subtract(0.0, 0.0);  // no-op on empty
  g.reset_unit();
  g.subtract(0.3, 0.5);
  CHECK(endpoints_of(g) == std::vector<double>{0.0, 0.3, 0.5, 1.0});
  g.subtract(0.2, 0.7);
  CHECK(endpoints_of(g) == std::vector<double>{0.0, 0.2, 0.7, 1.0});

  g.reset_unit();
  g.subtract(-1.0, 2.0);
  CHECK(g.empty());

  // Interval around a disk at 0.5 with r = 0.1 at perpendicular distance
  // 0.06: half-width sqrt(0.01 - 0.0036) = 0.08.
  g.reset_unit();
  const double h = std::sqrt(0.01 - 0.0036);
  g.subtract(0.5 - h, 0.5 + h);
  REQUIRE(g.endpoints().size() == 4);
  CHECK(g.endpoints()[1] == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(g.endpoints()[2] == doctest::Approx(0.58).epsilon(1e-12));
}

TEST_CASE("segment endpoints stay within the subtraction bound") {
  SegmentList g;
  g.reset_unit();
  RngStream rng(51, 0);
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const double c = rng.next_double();
    const double h = 0.002 * rng.next_double();
    g.subtract(c - h, c + h);
    CHECK(g.endpoints().size() <= 2 * static_cast<std::size_t>(i + 2));
    CHECK(std::is_sorted(g.endpoints().begin(), g.endpoints().end()));
  }
}

TEST_CASE("segment sampling is uniform over the remaining length") {
  SegmentList g;
  g.reset_unit();
  g.subtract(0.1, 0.9);
  RngStream rng(51, 1);
  std::uint64_t low = 0, high = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = g.sample(rng);
    REQUIRE(((x >= 0.0 && x <= 0.1) || (x >= 0.9 && x <= 1.0)));
    (x <= 0.1 ? low : high) += 1;
  }
  const std::vector<std::uint64_t> counts = {low, high};
  const std::vector<double> expected = {50000.0, 50000.0};
  // One degree of freedom; 6.635 is the 1% tail.
  CHECK(testsupport::chi_square_stat(counts, expected) < 6.635);

  g.reset_unit();
  g.subtract(0.2, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.sample(rng);
    CHECK(x >= 0.0);
    CHECK(x <= 0.2);
  }

  g.clear();
  CHECK_THROWS_AS((void)g.sample(rng), std::runtime_error);
}

TEST_CASE("kd-tree queries match brute force") {
  RngStream rng(51, 2);
  const int d = 4;
  KdTree tree(d);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> p(d);
    for (double& c : p) c = rng.next_double();
    pts.push_back(p);
    tree.insert(p);

    if (i % 40 != 0) continue;  // query against the mixed tree+buffer state
    std::vector<double> q(d);
    for (double& c : q) c = rng.next_double();

    double got_dist = 0.0;
    const std::size_t got = tree.nearest(q, &got_dist);
    std::size_t want = KdTree::npos;
    double want_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (dist(pts[j], q) < want_dist) {
        want_dist = dist(pts[j], q);
        want = j;
      }
    CHECK(got == want);
    CHECK(got_dist == doctest::Approx(want_dist).epsilon(1e-12));
  }

  RngStream qrng(51, 3);
  std::vector<std::size_t> out;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(d);
    for (double& c : q) c = qrng.next_double();
    const double rho = 0.05 + 0.3 * qrng.next_double();

    tree.collect_in_ball(q, rho, out);
    std::set<std::size_t> got(out.begin(), out.end());
    std::set<std::size_t> want;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (dist(pts[j], q) < rho) want.insert(j);
    CHECK(got == want);

    const int axis = static_cast<int>(qrng.next_below(d));
    tree.collect_near_line(axis, q, rho, out);
    got = {out.begin(), out.end()};
    want.clear();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double d2 = 0.0;
      for (int a = 0; a < d; ++a) {
        if (a == axis) continue;
        const double df = pts[j][static_cast<std::size_t>(a)] -
                          q[static_cast<std::size_t>(a)];
        d2 += df * df;
      }
      if (d2 < rho * rho) want.insert(j);
    }
    CHECK(got == want);
  }

  // Excluding a point returns its true nearest neighbor instead.
  double dummy = 0.0;
  const std::size_t n0 = tree.nearest(pts[0], &dummy, 0);
  CHECK(n0 != 0);
  CHECK(n0 != KdTree::npos);
}

TEST_CASE("required consecutive misses") {
  CHECK(required_misses(1e-2, 4, 0) == 100);
  CHECK(required_misses(1e-2, 4, 1) == 9);
  CHECK(required_misses(1.0, 3, 1) == 1);
  CHECK(required_misses(1.0, 2, 0) == 1);
  CHECK_THROWS_AS((void)required_misses(0.0, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)required_misses(2.0, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)required_misses(0.5, 2, 3), std::invalid_argument);
}

TEST_CASE("line darts on an empty cloud always hit inside the box") {
  MpsConfig cfg;
  cfg.dim = 3;
  cfg.r_f = 0.2;
  RngStream rng(51, 4);
  for (int i = 0; i < 20; ++i) {
    MpsState state(cfg);
    const ThrowResult res = throw_line_dart(state, cfg, rng);
    REQUIRE(res.hit);
    REQUIRE(res.point.size() == 3);
    for (const double c : res.point) {
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
    }
    CHECK(state.cloud.size() == 1);
  }
}

TEST_CASE("a fully covered line dart misses") {
  MpsConfig cfg;
  cfg.dim = 1;
  cfg.r_f = 0.11;
  MpsState state(cfg);
  for (double c = 0.05; c < 1.0; c += 0.1) {
    const double p[1] = {c};
    state.cloud.push_back(std::span<const double>(p, 1));
    state.tree.insert(std::span<const double>(p, 1));
  }
  RngStream rng(51, 5);
  for (int i = 0; i < 50; ++i) {
    const ThrowResult res = throw_line_dart(state, cfg, rng);
    CHECK(!res.hit);
  }
}

TEST_CASE("accepted points clear every prior disk") {
  MpsConfig cfg;
  cfg.dim = 2;
  cfg.r_f = 0.15;
  cfg.max_darts = 400;
  MpsState state(cfg);
  RngStream rng(51, 6);
  for (int i = 0; i < 400; ++i) (void)throw_line_dart(state, cfg, rng);
  REQUIRE(state.cloud.size() >= 10);
  CHECK(min_pairwise(state.cloud) >= cfg.r_f);

  // Point darts respect the same invariant.
  MpsState pstate(cfg);
  for (int i = 0; i < 400; ++i) (void)throw_point_dart(pstate, cfg, rng);
  REQUIRE(pstate.cloud.size() >= 10);
  CHECK(min_pairwise(pstate.cloud) >= cfg.r_f);
}

TEST_CASE("runs terminate within the packing bound") {
  MpsConfig cfg;
  cfg.dim = 2;
  cfg.r_f = 0.5;
  cfg.void_fraction = 1e-4;
  const auto [cloud, stats] = run_mps(cfg, RngStream(51, 7));
  CHECK(cloud.size() >= 1);
  CHECK(cloud.size() <= 9);  // 3x3 grid is the densest 0.5-separated set
  CHECK(min_pairwise(cloud) >= 0.5);
  CHECK(stats.hits == cloud.size());
  CHECK(stats.consecutive_misses ==
        required_misses(cfg.void_fraction, cfg.dim, 1));
  REQUIRE(!stats.inserted_over_time.empty());
  CHECK(stats.inserted_over_time.back().points == cloud.size());
}

TEST_CASE("runs are reproducible and bounded in memory") {
  MpsConfig cfg;
  cfg.dim = 2;
  cfg.r_f = 0.04;
  cfg.void_fraction = 0.05;
  const auto [cloud1, stats1] = run_mps(cfg, RngStream(51, 8));
  const auto [cloud2, stats2] = run_mps(cfg, RngStream(51, 8));
  CHECK(cloud1.coords == cloud2.coords);
  CHECK(stats1.hits == stats2.hits);
  CHECK(stats1.misses == stats2.misses);

  const std::size_t n = cloud1.size();
  REQUIRE(n >= 50);
  CHECK(min_pairwise(cloud1) >= cfg.r_f);
  CHECK(stats1.max_segment_endpoints <= 2 * (n + 1));
  // Capacity doubling may hold up to twice each live vector.
  CHECK(stats1.peak_memory_bytes <= 4 * expected_peak_memory_bytes(n, cfg.dim));

  cfg.dart_kind = DartKind::point;
  const auto [pcloud1, p1] = run_mps(cfg, RngStream(51, 9));
  const auto [pcloud2, p2] = run_mps(cfg, RngStream(51, 9));
  CHECK(pcloud1.coords == pcloud2.coords);
  CHECK(min_pairwise(pcloud1) >= cfg.r_f);
}

TEST_CASE("dart caps and time budgets stop a run early") {
  MpsConfig cfg;
  cfg.dim = 2;
  cfg.r_f = 0.01;
  cfg.void_fraction = 1e-6;
  cfg.max_darts = 200;
  const auto [cloud, stats] = run_mps(cfg, RngStream(51, 10));
  CHECK(stats.hits + stats.misses == 200);
  CHECK(cloud.size() == stats.hits);

  cfg.max_darts = 0;
  cfg.time_budget_s = 0.05;
  const auto [tcloud, tstats] = run_mps(cfg, RngStream(51, 11));
  CHECK(tcloud.size() > 0);
  CHECK(tstats.wall_s < 5.0);
}

TEST_CASE("quality of the four-corner configuration") {
  PointCloud cloud{2, {0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0}};
  REQUIRE(cloud.size() == 4);
  const QualityReport rep =
      measure_quality(cloud, 1.0, 20000, RngStream(51, 12));
  CHECK(rep.r_f_measured == doctest::Approx(1.0).epsilon(1e-12));
  // The probe maximum approaches sqrt(2)/2 from below.
  CHECK(rep.r_c_estimate <= std::sqrt(0.5) + 1e-12);
  CHECK(rep.r_c_estimate > 0.65);
  CHECK(rep.aspect_ratio == doctest::Approx(rep.r_c_estimate).epsilon(1e-12));

  const PointCloud lone{2, {0.5, 0.5}};
  const QualityReport empty = measure_quality(lone, 1.0, 10, RngStream(51, 13));
  CHECK(empty.r_f_measured == 0.0);
}
