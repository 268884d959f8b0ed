#include "kdarts/error_curve.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kdarts/combinatorics.hpp"
#include "kdarts/dart_gen.hpp"
#include "kdarts/parallel.hpp"
#include "kdarts/stats.hpp"

namespace kdarts {

VolumeObject VolumeObject::unit_sphere(int dim) {
  VolumeObject obj{Sphere{dim, 1.0, {}}, BoxDomain::two_cube(dim),
                   ball_volume(dim, 1.0)};
  return obj;
}

VolumeObject VolumeObject::random_ellipsoid(int dim, double squish,
                                            int rotation_count,
                                            RngStream rng) {
  Ellipsoid e = make_ellipsoid(dim, squish, rotation_count, rng);
  const double vol = kdarts::true_volume(e);
  return VolumeObject{std::move(e), BoxDomain::two_cube(dim), vol};
}

namespace {

double aligned_fraction(const VolumeObject& obj, std::span<const int> fixed_idx,
                        std::span<const double> fixed_val) {
  const int d = obj.domain.dim;
  if (const auto* s = std::get_if<Sphere>(&obj.shape))
    return flat_fraction_sphere_aligned(d, fixed_idx, fixed_val, *s,
                                        obj.domain);
  return flat_fraction_aligned(d, fixed_idx, fixed_val,
                               std::get<Ellipsoid>(obj.shape), obj.domain);
}

double line_fraction(const VolumeObject& obj, const Flat& flat) {
  if (const auto* s = std::get_if<Sphere>(&obj.shape))
    return flat_fraction_sphere(flat, *s, obj.domain);
  return flat_fraction(flat, std::get<Ellipsoid>(obj.shape), obj.domain);
}

ReplicationResult finish(const RunningStat& st, const BoxDomain& domain) {
  const double vol = domain.volume();
  return {st.mean * vol, st.std_error() * vol};
}

ReplicationResult run_aligned_mc(const VolumeObject& obj, int k,
                                 std::uint64_t flat_budget, RngStream& rng) {
  const int d = obj.domain.dim;
  const int pinned = d - k;
  const std::uint64_t per_dart = binomial(d, pinned);
  const std::uint64_t full = flat_budget / per_dart;
  const std::uint64_t rem = flat_budget % per_dart;
  double fixed_val[64];
  RunningStat st;
  const auto one_dart = [&](std::uint64_t flats) {
    double sum = 0.0;
    std::uint64_t used = 0;
    for_each_combination(d, pinned, [&](std::span<const int> combo) {
      if (used >= flats) return;
      for (std::size_t a = 0; a < combo.size(); ++a)
        fixed_val[a] = rng.uniform(
            obj.domain.lo[static_cast<std::size_t>(combo[a])],
            obj.domain.hi[static_cast<std::size_t>(combo[a])]);
      sum += aligned_fraction(
          obj, combo, std::span<const double>(fixed_val, combo.size()));
      ++used;
    });
    st.add(sum / static_cast<double>(used));
  };
  for (std::uint64_t i = 0; i < full; ++i) one_dart(per_dart);
  if (rem > 0) one_dart(rem);
  return finish(st, obj.domain);
}

ReplicationResult run_aligned_lhs(const VolumeObject& obj, int k,
                                  std::uint64_t flat_budget, RngStream& rng) {
  const int d = obj.domain.dim;
  const int pinned = d - k;
  const std::uint64_t per_dart = binomial(d, pinned);
  const std::uint64_t full = flat_budget / per_dart;
  const std::uint64_t rem = flat_budget % per_dart;
  const std::uint64_t darts = full + (rem > 0 ? 1 : 0);
  const LhsTable table(obj.domain, k, darts, rng);
  double fixed_val[64];
  RunningStat st;
  for (std::uint64_t i = 0; i < darts; ++i) {
    const std::uint64_t flats = (i < full) ? per_dart : rem;
    double sum = 0.0;
    for (std::uint64_t m = 0; m < flats; ++m) {
      const auto axes = table.fixed_axes(static_cast<std::size_t>(m));
      table.fixed_values(static_cast<std::size_t>(m), i,
                         std::span<double>(fixed_val, axes.size()));
      sum += aligned_fraction(
          obj, axes, std::span<const double>(fixed_val, axes.size()));
    }
    st.add(sum / static_cast<double>(flats));
  }
  return finish(st, obj.domain);
}

// Diagonal-anchored lines are uniform in signed offset, not length weighted,
// so a plain mean of chord/length ratios is biased. Weighting each line by
// its clipped length restores consistency: chord and length sums estimate the
// object and domain measures under the same line density.
ReplicationResult run_oriented(const VolumeObject& obj, bool pair,
                               std::uint64_t flat_budget, RngStream& rng) {
  const std::uint64_t per_dart = pair ? 2 : 1;
  const std::uint64_t full = flat_budget / per_dart;
  const std::uint64_t rem = flat_budget % per_dart;
  const std::uint64_t darts = full + (rem > 0 ? 1 : 0);
  std::vector<double> chord(darts), len(darts);
  double chord_sum = 0.0, len_sum = 0.0;
  for (std::uint64_t i = 0; i < darts; ++i) {
    const Dart dart = gen_unaligned_line_dart_2d(obj.domain, pair, rng);
    const std::uint64_t flats = (i < full) ? per_dart : rem;
    double c = 0.0, l = 0.0;
    for (std::uint64_t m = 0; m < flats; ++m) {
      const Flat& f = dart.flats[static_cast<std::size_t>(m)];
      const double measure = clipped_flat_measure(f, obj.domain);
      c += line_fraction(obj, f) * measure;
      l += measure;
    }
    chord[i] = c;
    len[i] = l;
    chord_sum += c;
    len_sum += l;
  }
  const double ratio = chord_sum / len_sum;
  ReplicationResult out;
  out.estimate = ratio * obj.domain.volume();
  if (darts > 1) {
    // Linearized ratio variance over independent darts.
    double sq = 0.0;
    for (std::uint64_t i = 0; i < darts; ++i) {
      const double g = chord[i] - ratio * len[i];
      sq += g * g;
    }
    const double mean_len = len_sum / static_cast<double>(darts);
    const double se_ratio =
        std::sqrt(sq / static_cast<double>(darts - 1) /
                  static_cast<double>(darts)) /
        mean_len;
    out.std_error = se_ratio * obj.domain.volume();
  }
  return out;
}

}  // namespace

ReplicationResult run_volume_replication(const VolumeObject& obj,
                                         SamplerKind sampler, const KSpec& ks,
                                         std::uint64_t flat_budget,
                                         RngStream rng) {
  if (flat_budget == 0)
    throw std::invalid_argument("run_volume_replication: empty budget");
  const int d = obj.domain.dim;
  if (d > 64)
    throw std::invalid_argument("run_volume_replication: dimension too large");
  if (ks.variant == FlatVariant::aligned) {
    if (ks.k < 0 || ks.k > d)
      throw std::invalid_argument("run_volume_replication: invalid k");
    return sampler == SamplerKind::latin_hypercube
               ? run_aligned_lhs(obj, ks.k, flat_budget, rng)
               : run_aligned_mc(obj, ks.k, flat_budget, rng);
  }
  if (d != 2 || ks.k != 1)
    throw std::invalid_argument(
        "run_volume_replication: oriented lines want d = 2, k = 1");
  if (sampler == SamplerKind::latin_hypercube)
    throw std::invalid_argument(
        "run_volume_replication: no stratified table for oriented lines");
  return run_oriented(obj, ks.variant == FlatVariant::oriented_pair,
                      flat_budget, rng);
}

std::vector<ErrorCurveCell> error_curve(const VolumeObject& obj,
                                        const ErrorCurveConfig& cfg) {
  if (cfg.ks.empty() || cfg.flat_budgets.empty())
    throw std::invalid_argument("error_curve: empty grid");
  if (cfg.replications < 1)
    throw std::invalid_argument("error_curve: need at least one replication");
  if (!(obj.true_volume > 0.0))
    throw std::invalid_argument("error_curve: true volume must be positive");

  std::vector<ErrorCurveCell> cells;
  cells.reserve(cfg.ks.size() * cfg.flat_budgets.size());
  const auto reps = static_cast<std::uint64_t>(cfg.replications);
  std::vector<ReplicationResult> results(reps);
  std::uint64_t cell_index = 0;
  for (const auto& ks : cfg.ks) {
    for (const std::uint64_t n : cfg.flat_budgets) {
      const auto t0 = std::chrono::steady_clock::now();
      parallel_for(reps, cfg.threads, [&](std::uint64_t r) {
        // One stream per (cell, replication): the reduction below walks
        // the slots in index order, so thread count never shows.
        RngStream rng(cfg.seed, (cell_index << 32) | r);
        results[r] = run_volume_replication(obj, cfg.sampler, ks, n, rng);
      });
      ErrorCurveCell cell;
      cell.k = ks;
      cell.n = n;
      double sq = 0.0, abs_sum = 0.0, se_sum = 0.0;
      if (cfg.keep_ratios) cell.ratios.reserve(reps);
      for (const auto& res : results) {
        const double rel = res.estimate / obj.true_volume - 1.0;
        sq += rel * rel;
        abs_sum += std::abs(rel);
        se_sum += res.std_error / obj.true_volume;
        if (cfg.keep_ratios) cell.ratios.push_back(res.estimate / obj.true_volume);
      }
      cell.rms_rel = std::sqrt(sq / static_cast<double>(reps));
      cell.mean_abs_rel = abs_sum / static_cast<double>(reps);
      cell.std_err_rel = se_sum / static_cast<double>(reps);
      cell.wall_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return cells;
}

}  // namespace kdarts
