#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "kdarts/domain.hpp"
#include "kdarts/rng.hpp"
#include "kdarts/shapes.hpp"

namespace kdarts {

// A target shape in its domain with the analytic volume to compare against.
struct VolumeObject {
  std::variant<Sphere, Ellipsoid> shape;
  BoxDomain domain;
  double true_volume = 0.0;

  static VolumeObject unit_sphere(int dim);
  static VolumeObject random_ellipsoid(int dim, double squish,
                                       int rotation_count, RngStream rng);
};

enum class SamplerKind { monte_carlo, latin_hypercube };

// Flat family of one table row: aligned k-flats, independent oriented 2-d
// lines, or orthogonal 2-d line pairs.
enum class FlatVariant { aligned, oriented_single, oriented_pair };

struct KSpec {
  int k = 0;
  FlatVariant variant = FlatVariant::aligned;
  std::string label;  // CSV label, e.g. "1", "1a", "1r", "1o"
};

struct ReplicationResult {
  double estimate = 0.0;   // volume estimate
  double std_error = 0.0;  // per-replication standard error, volume units
};

// One seeded volume estimate of the object at the given flat budget. Darts
// are generated until the budget is exhausted, the last dart truncated to
// the remaining flats.
ReplicationResult run_volume_replication(const VolumeObject& obj,
                                         SamplerKind sampler, const KSpec& ks,
                                         std::uint64_t flat_budget,
                                         RngStream rng);

struct ErrorCurveConfig {
  SamplerKind sampler = SamplerKind::monte_carlo;
  std::vector<KSpec> ks;
  std::vector<std::uint64_t> flat_budgets;
  int replications = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  bool keep_ratios = false;  // keep per-replication estimate/true ratios
};

struct ErrorCurveCell {
  KSpec k;
  std::uint64_t n = 0;        // flat budget
  double rms_rel = 0.0;       // sqrt(mean((est/true - 1)^2))
  double mean_abs_rel = 0.0;  // mean(|est - true| / true)
  double std_err_rel = 0.0;   // mean per-replication std error / true
  double wall_s = 0.0;
  std::vector<double> ratios;  // est/true per replication, if kept
};

// Error table over the (k, n) grid, N replications per cell, replications
// parallelized with per-index streams and reduced in index order.
std::vector<ErrorCurveCell> error_curve(const VolumeObject& obj,
                                        const ErrorCurveConfig& cfg);

}  // namespace kdarts
