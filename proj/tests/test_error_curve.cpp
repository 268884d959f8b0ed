#include "kdarts/error_curve.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "doctest.h"
#include "kdarts/rng.hpp"
#include "kdarts/shapes.hpp"
#include "support/stat_utils.hpp"

using namespace kdarts;

namespace {

KSpec aligned_k(int k) { return {k, FlatVariant::aligned, std::to_string(k)}; }

const ErrorCurveCell& cell_at(const std::vector<ErrorCurveCell>& cells,
                              const std::string& label, std::uint64_t n) {
  for (const auto& c : cells)
    if (c.k.label == label && c.n == n) return c;
  throw std::runtime_error("missing cell");
}

}  // namespace

TEST_CASE("volume objects carry their analytic volume") {
  const VolumeObject s = VolumeObject::unit_sphere(3);
  CHECK(std::holds_alternative<Sphere>(s.shape));
  CHECK(s.true_volume == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(s.domain.volume() == doctest::Approx(8.0));

  const VolumeObject e =
      VolumeObject::random_ellipsoid(4, 0.5, 6, RngStream(71, 0));
  const auto& body = std::get<Ellipsoid>(e.shape);
  CHECK(body.dim() == 4);
  CHECK(e.true_volume == doctest::Approx(true_volume(body)).epsilon(1e-15));
  CHECK(e.true_volume > 0.0);
}

TEST_CASE("full-dimension darts are exact") {
  const VolumeObject obj = VolumeObject::unit_sphere(3);
  for (std::uint64_t budget : {1ull, 5ull}) {
    const ReplicationResult r = run_volume_replication(
        obj, SamplerKind::monte_carlo, aligned_k(3), budget, RngStream(71, 1));
    CHECK(std::abs(r.estimate / obj.true_volume - 1.0) < 1e-12);
    CHECK(r.std_error == doctest::Approx(0.0));
  }
}

TEST_CASE("replications are seeded and budget-sensitive") {
  const VolumeObject obj = VolumeObject::unit_sphere(2);
  const KSpec ks = aligned_k(1);
  const ReplicationResult a = run_volume_replication(
      obj, SamplerKind::monte_carlo, ks, 99, RngStream(71, 2));
  const ReplicationResult b = run_volume_replication(
      obj, SamplerKind::monte_carlo, ks, 99, RngStream(71, 2));
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);

  // A one-flat budget bump truncates the final dart differently.
  const ReplicationResult c = run_volume_replication(
      obj, SamplerKind::monte_carlo, ks, 100, RngStream(71, 2));
  CHECK(a.estimate != c.estimate);

  // Rough unbiasedness at a modest budget.
  CHECK(c.estimate == doctest::Approx(obj.true_volume).epsilon(0.5));
}

TEST_CASE("latin hypercube tables drive the aligned sampler") {
  const VolumeObject obj = VolumeObject::unit_sphere(3);
  const ReplicationResult r = run_volume_replication(
      obj, SamplerKind::latin_hypercube, aligned_k(1), 300, RngStream(71, 3));
  CHECK(r.estimate == doctest::Approx(obj.true_volume).epsilon(0.35));

  const ReplicationResult again = run_volume_replication(
      obj, SamplerKind::latin_hypercube, aligned_k(1), 300, RngStream(71, 3));
  CHECK(again.estimate == r.estimate);
}

TEST_CASE("oriented line variants cover the 2-d disk") {
  const VolumeObject obj = VolumeObject::unit_sphere(2);
  for (FlatVariant v : {FlatVariant::oriented_single, FlatVariant::oriented_pair}) {
    const KSpec ks{1, v, "1r"};
    const ReplicationResult r = run_volume_replication(
        obj, SamplerKind::monte_carlo, ks, 2000, RngStream(71, 4));
    CHECK(r.estimate == doctest::Approx(std::numbers::pi).epsilon(0.1));
  }

  const VolumeObject obj3 = VolumeObject::unit_sphere(3);
  CHECK_THROWS_AS(
      (void)run_volume_replication(obj3, SamplerKind::monte_carlo,
                                   KSpec{1, FlatVariant::oriented_single, "1r"},
                                   100, RngStream(71, 5)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)run_volume_replication(obj, SamplerKind::latin_hypercube,
                                   KSpec{1, FlatVariant::oriented_single, "1r"},
                                   100, RngStream(71, 5)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)run_volume_replication(obj, SamplerKind::monte_carlo, aligned_k(1),
                                   0, RngStream(71, 5)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)run_volume_replication(obj, SamplerKind::monte_carlo, aligned_k(5),
                                   100, RngStream(71, 5)),
      std::invalid_argument);
}

TEST_CASE("error grid: higher k means lower error") {
  const VolumeObject obj = VolumeObject::unit_sphere(3);
  ErrorCurveConfig cfg;
  cfg.ks = {aligned_k(0), aligned_k(1), aligned_k(2), aligned_k(3)};
  cfg.flat_budgets = {64, 1024};
  cfg.replications = 100;
  cfg.seed = 71;
  cfg.keep_ratios = true;
  const auto cells = error_curve(obj, cfg);
  CHECK(cells.size() == 8);

  const double rms0 = cell_at(cells, "0", 1024).rms_rel;
  const double rms1 = cell_at(cells, "1", 1024).rms_rel;
  const double rms2 = cell_at(cells, "2", 1024).rms_rel;
  const double rms3 = cell_at(cells, "3", 1024).rms_rel;
  CHECK(rms2 < rms1);
  CHECK(rms1 < rms0);
  CHECK(rms3 < 1e-12);

  // More flats help every non-exact family.
  for (const std::string label : {"0", "1", "2"}) {
    CHECK(cell_at(cells, label, 1024).rms_rel <
          cell_at(cells, label, 64).rms_rel);
  }

  for (const auto& c : cells) {
    CHECK(c.ratios.size() == 100);
    CHECK(c.mean_abs_rel <= c.rms_rel + 1e-15);
    if (c.k.k < 3) {
      // Per-replication standard errors track the observed spread.
      CHECK(c.std_err_rel > 0.3 * c.rms_rel);
      CHECK(c.std_err_rel < 3.0 * c.rms_rel);
    }
  }
}

TEST_CASE("error decays like one over sqrt n") {
  const VolumeObject obj = VolumeObject::unit_sphere(3);
  ErrorCurveConfig cfg;
  cfg.ks = {aligned_k(1)};
  cfg.flat_budgets = {256, 1024, 4096};
  cfg.replications = 60;
  cfg.seed = 72;
  const auto cells = error_curve(obj, cfg);
  std::vector<double> n, rms;
  for (const auto& c : cells) {
    n.push_back(static_cast<double>(c.n));
    rms.push_back(c.rms_rel);
  }
  CHECK(testsupport::loglog_slope(n, rms) ==
        doctest::Approx(-0.5).epsilon(0.4));
}

TEST_CASE("thread count never changes the table") {
  const VolumeObject obj =
      VolumeObject::random_ellipsoid(3, 0.5, 4, RngStream(71, 6));
  ErrorCurveConfig cfg;
  cfg.ks = {aligned_k(0), aligned_k(2)};
  cfg.flat_budgets = {128};
  cfg.replications = 25;
  cfg.seed = 73;
  cfg.keep_ratios = true;
  const auto serial = error_curve(obj, cfg);
  cfg.threads = 3;
  const auto threaded = error_curve(obj, cfg);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].rms_rel == threaded[i].rms_rel);
    CHECK(serial[i].mean_abs_rel == threaded[i].mean_abs_rel);
    CHECK(serial[i].std_err_rel == threaded[i].std_err_rel);
    CHECK(serial[i].ratios == threaded[i].ratios);
  }
}

TEST_CASE("invalid grids are rejected") {
  const VolumeObject obj = VolumeObject::unit_sphere(2);
  ErrorCurveConfig cfg;
  cfg.flat_budgets = {16};
  CHECK_THROWS_AS((void)error_curve(obj, cfg), std::invalid_argument);
  cfg.ks = {aligned_k(1)};
  cfg.flat_budgets = {};
  CHECK_THROWS_AS((void)error_curve(obj, cfg), std::invalid_argument);
  cfg.flat_budgets = {16};
  cfg.replications = 0;
  CHECK_THROWS_AS((void)error_curve(obj, cfg), std::invalid_argument);
}
