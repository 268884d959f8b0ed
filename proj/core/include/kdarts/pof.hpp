#pragma once

#include <cstdint>
#include <span>

#include "kdarts/estimator.hpp"
#include "kdarts/rng.hpp"

namespace kdarts::pof {

// Response surfaces on the open unit box (0,1)^d. Failure is y(x) < y_t.
//
//   circular_parabola: y = sum_i (2 x_i - 1)^2, a bowl centered at 1/2.
//   planar_cross:      y = [prod_i (1 + cos(2 pi x_i)) / 2]^(1/d), zero on
//                      the center planes x_i = 1/2, so the failure region
//                      is a thin cross of slabs.
enum class SurfaceKind { circular_parabola, planar_cross };

struct ResponseSurface {
  SurfaceKind kind = SurfaceKind::circular_parabola;
  int dim = 2;
};

struct FailureSpec {
  ResponseSurface surface;
  double y_t = 0.0;       // failure threshold
  double target_pf = 0.0; // probability the threshold was calibrated for
};

// Pointwise surface value; x outside the open box is a domain error.
double eval_surface(const ResponseSurface& s, std::span<const double> x);

struct CalibrateOptions {
  std::uint64_t oracle_flats = 400'000;  // volume oracle sample count
  double rel_tol = 1e-3;                 // bisection width on y_t
  int max_iter = 200;
  std::uint64_t oracle_seed = 0x6b64706f66ull;
};

// Threshold y_t with failure volume equal to target_pf (0 < target_pf <
// 0.5). The parabola inverts in closed form (the failure set is a ball of
// radius sqrt(y_t)/2). The cross bisects y_t against a deterministic
// line-flat volume oracle: a fixed Latin hypercube set of pinned
// coordinates whose per-line failure lengths are exact, so the bracketed
// volume is monotone in y_t and the bisection converges to rel_tol.
// Failure to bracket the target is a calibration error.
double calibrate_threshold(const ResponseSurface& s, double target_pf,
                           const CalibrateOptions& opt = {});

// Total length of {x_axis in (0,1) : y < y_t} along the axis-aligned line
// with the given pinned coordinates (ascending axis order, skipping
// `axis`). Closed form for both surfaces: a clipped root interval for the
// parabola, a per-period cosine inversion for the cross.
double failure_length(const ResponseSurface& s, double y_t, int axis,
                      std::span<const double> fixed);

// Brute-force measure of the same set: a dense midpoint scan of the failure
// indicator, accurate to about one cell per interval endpoint. Used to
// cross-check the closed forms.
double failure_length_scan(const ResponseSurface& s, double y_t, int axis,
                           std::span<const double> fixed,
                           int resolution = 1'000'000);

// Probability-of-failure estimate with point samples (k = 0) or line flats
// (k = 1, the free axis cycling j mod d). Line values are exact failure
// lengths, so the estimator needs no roots beyond the closed forms.
Estimate estimate_pof(const FailureSpec& spec, int k, std::uint64_t n_flats,
                      RngStream rng);

// Matched-accuracy comparison for one failure spec: the line estimator at
// base_flats sets the RMS target over `reps` replications; the point
// estimator's budget doubles until it matches. speedup is the wall-time
// ratio at matched RMS; the budget ratio n_point / n_line is its
// deterministic counterpart.
struct SpeedupResult {
  double rms_line = 0.0;
  double rms_point = 0.0;
  std::uint64_t n_line = 0;
  std::uint64_t n_point = 0;
  double estimate_line = 0.0;   // mean estimate at the final budget
  double estimate_point = 0.0;
  double wall_line_s = 0.0;
  double wall_point_s = 0.0;
  double speedup = 0.0;
  bool matched = false;  // false when the point budget hit the cap
};

SpeedupResult speedup_experiment(const FailureSpec& spec,
                                 std::uint64_t base_flats, int reps,
                                 RngStream rng, int threads = 1,
                                 int max_doublings = 24);

}  // namespace kdarts::pof
