#include "kdarts/pof.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kdarts/parallel.hpp"
#include "kdarts/shapes.hpp"
#include "kdarts/stats.hpp"

namespace kdarts::pof {

namespace {

// Formula only; the open-box validation lives in eval_surface so the
// samplers can evaluate boundary-grazing points by continuity.
double surface_value(const ResponseSurface& s, const double* x) {
  const int d = s.dim;
  if (s.kind == SurfaceKind::circular_parabola) {
    double sum = 0.0;
    for (int a = 0; a < d; ++a) {
      const double c = 2.0 * x[a] - 1.0;
      sum += c * c;
    }
    return sum;
  }
  // (1 + cos(2 pi x)) / 2 == cos(pi x)^2, which avoids the cancellation
  // near the center planes.
  double prod = 1.0;
  for (int a = 0; a < d; ++a) {
    const double c = std::cos(std::numbers::pi * x[a]);
    prod *= c * c;
  }
  return std::pow(prod, 1.0 / d);
}

void validate_surface(const ResponseSurface& s) {
  if (s.dim < 1) throw std::invalid_argument("pof: dimension must be >= 1");
}

}  // namespace

double eval_surface(const ResponseSurface& s, std::span<const double> x) {
  validate_surface(s);
  if (x.size() != static_cast<std::size_t>(s.dim))
    throw std::invalid_argument("eval_surface: dimension mismatch");
  for (const double c : x)
    if (!(c > 0.0) || !(c < 1.0))
      throw std::invalid_argument("eval_surface: point outside the open box");
  return surface_value(s, x.data());
}

double failure_length(const ResponseSurface& s, double y_t, int axis,
                      std::span<const double> fixed) {
  validate_surface(s);
  if (axis < 0 || axis >= s.dim)
    throw std::invalid_argument("failure_length: bad axis");
  if (fixed.size() != static_cast<std::size_t>(s.dim - 1))
    throw std::invalid_argument("failure_length: bad pinned count");
  if (!(y_t > 0.0)) return 0.0;

  if (s.kind == SurfaceKind::circular_parabola) {
    double rest = 0.0;
    for (const double c : fixed) {
      const double v = 2.0 * c - 1.0;
      rest += v * v;
    }
    const double gap = y_t - rest;
    if (gap <= 0.0) return 0.0;
    const double w = 0.5 * std::sqrt(gap);
    return std::min(0.5 + w, 1.0) - std::max(0.5 - w, 0.0);
  }

  // Cross: failure along the free axis is cos(pi t)^2 < y_t^d / Cg with
  // Cg the product of the pinned cos^2 factors; one period of t in (0, 1).
  const double tau = std::pow(y_t, static_cast<double>(s.dim));
  double cg = 1.0;
  for (const double c : fixed) {
    const double v = std::cos(std::numbers::pi * c);
    cg *= v * v;
  }
  const double u = tau / cg;
  if (!(u < 1.0)) return 1.0;
  return 1.0 - (2.0 / std::numbers::pi) * std::acos(std::sqrt(u));
}

double failure_length_scan(const ResponseSurface& s, double y_t, int axis,
                           std::span<const double> fixed, int resolution) {
  validate_surface(s);
  if (axis < 0 || axis >= s.dim)
    throw std::invalid_argument("failure_length_scan: bad axis");
  if (fixed.size() != static_cast<std::size_t>(s.dim - 1))
    throw std::invalid_argument("failure_length_scan: bad pinned count");
  if (resolution < 1)
    throw std::invalid_argument("failure_length_scan: bad resolution");

  std::vector<double> x(static_cast<std::size_t>(s.dim));
  {
    std::size_t m = 0;
    for (int a = 0; a < s.dim; ++a)
      if (a != axis) x[static_cast<std::size_t>(a)] = fixed[m++];
  }
  std::uint64_t failing = 0;
  for (int i = 0; i < resolution; ++i) {
    x[static_cast<std::size_t>(axis)] = (i + 0.5) / resolution;
    if (surface_value(s, x.data()) < y_t) ++failing;
  }
  return static_cast<double>(failing) / resolution;
}

namespace {

// Deterministic Latin hypercube of pinned coordinates for the cross
// calibration: each free-axis group strata-samples the other axes, and the
// exact per-line failure lengths make the bracketed volume monotone in y_t.
struct LineOracle {
  explicit LineOracle(const ResponseSurface& s, std::uint64_t total,
                      std::uint64_t seed)
      : surface(s) {
    const int d = s.dim;
    pins.resize(static_cast<std::size_t>(d));
    counts.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const std::uint64_t m =
          total / static_cast<std::uint64_t>(d) +
          (static_cast<std::uint64_t>(j) < total % static_cast<std::uint64_t>(d)
               ? 1
               : 0);
      counts[static_cast<std::size_t>(j)] = m;
      auto& table = pins[static_cast<std::size_t>(j)];
      table.assign(static_cast<std::size_t>(m) *
                       static_cast<std::size_t>(d - 1),
                   0.0);
      for (int a = 0; a < d - 1; ++a) {
        RngStream rng(seed, (static_cast<std::uint64_t>(j) << 16) |
                                static_cast<std::uint64_t>(a));
        std::vector<std::uint64_t> perm(static_cast<std::size_t>(m));
        for (std::uint64_t i = 0; i < m; ++i) perm[i] = i;
        for (std::uint64_t i = m; i > 1; --i) {
          const std::uint64_t k = rng.next_below(i);
          std::swap(perm[i - 1], perm[k]);
        }
        for (std::uint64_t i = 0; i < m; ++i) {
          const double v =
              (static_cast<double>(perm[i]) + rng.next_double()) /
              static_cast<double>(m);
          table[static_cast<std::size_t>(i) * static_cast<std::size_t>(d - 1) +
                static_cast<std::size_t>(a)] = v;
        }
      }
    }
  }

  double volume(double y_t) const {
    const int d = surface.dim;
    double sum = 0.0;
    std::uint64_t total = 0;
    for (int j = 0; j < d; ++j) {
      const std::uint64_t m = counts[static_cast<std::size_t>(j)];
      const auto& table = pins[static_cast<std::size_t>(j)];
      for (std::uint64_t i = 0; i < m; ++i) {
        const std::span<const double> fixed(
            table.data() +
                static_cast<std::size_t>(i) * static_cast<std::size_t>(d - 1),
            static_cast<std::size_t>(d - 1));
        sum += failure_length(surface, y_t, j, fixed);
      }
      total += m;
    }
    return sum / static_cast<double>(total);
  }

  ResponseSurface surface;
  std::vector<std::vector<double>> pins;  // per free axis, m x (d-1)
  std::vector<std::uint64_t> counts;
};

}  // namespace

double calibrate_threshold(const ResponseSurface& s, double target_pf,
                           const CalibrateOptions& opt) {
  validate_surface(s);
  if (!(target_pf > 0.0) || !(target_pf < 0.5))
    throw std::invalid_argument(
        "calibrate_threshold: target_pf must be in (0, 0.5)");

  if (s.kind == SurfaceKind::circular_parabola) {
    // The failure set is the ball |2x - 1| < sqrt(y_t) around the center.
    const double radius =
        std::pow(target_pf / ball_volume(s.dim, 1.0), 1.0 / s.dim);
    if (radius > 0.5)
      throw std::runtime_error(
          "calibrate_threshold: failure ball exceeds the box");
    return 4.0 * radius * radius;
  }

  if (opt.oracle_flats < static_cast<std::uint64_t>(s.dim))
    throw std::invalid_argument("calibrate_threshold: too few oracle flats");
  const LineOracle oracle(s, opt.oracle_flats, opt.oracle_seed);
  double lo = 0.0, hi = 1.0;
  if (oracle.volume(hi) < target_pf)
    throw std::runtime_error("calibrate_threshold: failed to bracket");
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opt.rel_tol * mid) return mid;
    if (oracle.volume(mid) < target_pf)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("calibrate_threshold: bisection did not converge");
}

Estimate estimate_pof(const FailureSpec& spec, int k, std::uint64_t n_flats,
                      RngStream rng) {
  validate_surface(spec.surface);
  if (k != 0 && k != 1)
    throw std::invalid_argument("estimate_pof: k must be 0 or 1");
  if (n_flats == 0) throw std::invalid_argument("estimate_pof: empty budget");
  const int d = spec.surface.dim;
  RunningStat st;
  double x[64];
  if (d > 64) throw std::invalid_argument("estimate_pof: dimension too large");
  for (std::uint64_t i = 0; i < n_flats; ++i) {
    if (k == 0) {
      for (int a = 0; a < d; ++a) x[a] = rng.next_double();
      const double y = surface_value(spec.surface, x);
      st.add(y < spec.y_t ? 1.0 : 0.0);
    } else {
      const int axis = static_cast<int>(i % static_cast<std::uint64_t>(d));
      for (int a = 0; a < d - 1; ++a) x[a] = rng.next_double();
      st.add(failure_length(spec.surface, spec.y_t, axis,
                            std::span<const double>(x, static_cast<std::size_t>(d - 1))));
    }
  }
  Estimate est;
  est.mean = st.mean;
  est.std_error = st.std_error();
  est.n = st.count;
  return est;
}

namespace {

// RMS relative error of `reps` independent replications against the
// calibration target, parallel over replications.
double replicated_rms(const FailureSpec& spec, int k, std::uint64_t n_flats,
                      const RngStream& parent, std::uint64_t fork_tag, int reps,
                      int threads, double* mean_out) {
  std::vector<double> est(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::uint64_t>(reps), threads, [&](std::uint64_t r) {
    RngStream child = parent;
    est[r] = estimate_pof(spec, k, n_flats, child.fork(fork_tag | r)).mean;
  });
  double sq = 0.0, mean = 0.0;
  for (const double e : est) {
    const double rel = (e - spec.target_pf) / spec.target_pf;
    sq += rel * rel;
    mean += e;
  }
  if (mean_out) *mean_out = mean / reps;
  return std::sqrt(sq / reps);
}

}  // namespace

SpeedupResult speedup_experiment(const FailureSpec& spec,
                                 std::uint64_t base_flats, int reps,
                                 RngStream rng, int threads,
                                 int max_doublings) {
  validate_surface(spec.surface);
  if (base_flats == 0 || reps < 1)
    throw std::invalid_argument("speedup_experiment: empty budget");
  if (!(spec.target_pf > 0.0))
    throw std::invalid_argument("speedup_experiment: target_pf must be set");
  using clock = std::chrono::steady_clock;

  SpeedupResult out;
  out.n_line = base_flats;
  auto t0 = clock::now();
  out.rms_line = replicated_rms(spec, 1, base_flats, rng, 1ull << 32, reps,
                                threads, &out.estimate_line);
  out.wall_line_s = std::chrono::duration<double>(clock::now() - t0).count();

  std::uint64_t n = base_flats;
  for (int step = 0; step <= max_doublings; ++step) {
    const std::uint64_t tag =
        (2ull << 32) | (static_cast<std::uint64_t>(step) << 24);
    t0 = clock::now();
    out.rms_point =
        replicated_rms(spec, 0, n, rng, tag, reps, threads, &out.estimate_point);
    out.wall_point_s = std::chrono::duration<double>(clock::now() - t0).count();
    out.n_point = n;
    if (out.rms_point <= out.rms_line) {
      out.matched = true;
      break;
    }
    if (step < max_doublings) n *= 2;
  }
  out.speedup = out.wall_line_s > 0.0 ? out.wall_point_s / out.wall_line_s
                                      : 0.0;
  return out;
}

}  // namespace kdarts::pof
