#include "kdarts/mps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kdarts/combinatorics.hpp"
#include "kdarts/parallel.hpp"

namespace kdarts::mps {

void SegmentList::subtract(double lo, double hi) {
  if (!(lo <= hi))
    throw std::invalid_argument("SegmentList::subtract: inverted interval");
  if (endpoints_.empty()) return;
  if (hi < endpoints_.front() || lo > endpoints_.back()) return;
  const auto first = std::lower_bound(endpoints_.begin(), endpoints_.end(), lo);
  const auto last = std::upper_bound(first, endpoints_.end(), hi);
  const auto p = static_cast<std::size_t>(first - endpoints_.begin());
  const auto q = static_cast<std::size_t>(last - endpoints_.begin());
  // Odd index means the cut lands strictly inside a kept segment, so a
  // survivor endpoint replaces the removed ones on that side.
  double repl[2];
  std::size_t nrepl = 0;
  if (p % 2 == 1) repl[nrepl++] = lo;
  if (q % 2 == 1) repl[nrepl++] = hi;
  const std::size_t removed = q - p;
  if (nrepl <= removed) {
    std::copy(repl, repl + nrepl, endpoints_.begin() + static_cast<std::ptrdiff_t>(p));
    endpoints_.erase(endpoints_.begin() + static_cast<std::ptrdiff_t>(p + nrepl),
                     endpoints_.begin() + static_cast<std::ptrdiff_t>(q));
  } else {
    // Split inside a single segment: p == q, both survivors inserted.
    endpoints_.insert(endpoints_.begin() + static_cast<std::ptrdiff_t>(p), repl,
                      repl + nrepl);
  }
}

double SegmentList::total_length() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < endpoints_.size(); i += 2)
    total += endpoints_[i + 1] - endpoints_[i];
  return total;
}

double SegmentList::sample(RngStream& rng) const {
  if (endpoints_.empty())
    throw std::runtime_error("SegmentList::sample: empty list");
  const double total = total_length();
  if (!(total > 0.0))
    throw std::runtime_error("SegmentList::sample: zero-length list");
  double u = rng.next_double() * total;
  for (std::size_t i = 0; i + 1 < endpoints_.size(); i += 2) {
    const double len = endpoints_[i + 1] - endpoints_[i];
    if (u <= len || i + 3 >= endpoints_.size())
      return std::min(endpoints_[i] + u, endpoints_[i + 1]);
    u -= len;
  }
  return endpoints_.back();
}

namespace {

void kd_build(const std::vector<double>& pts, std::vector<std::uint32_t>& perm,
              int dim, std::size_t lo, std::size_t hi, int depth) {
  if (hi - lo <= 1) return;
  const std::size_t m = lo + (hi - lo) / 2;
  const int axis = depth % dim;
  std::nth_element(
      perm.begin() + static_cast<std::ptrdiff_t>(lo),
      perm.begin() + static_cast<std::ptrdiff_t>(m),
      perm.begin() + static_cast<std::ptrdiff_t>(hi),
      [&](std::uint32_t a, std::uint32_t b) {
        return pts[static_cast<std::size_t>(a) * static_cast<std::size_t>(dim) +
                   static_cast<std::size_t>(axis)] <
               pts[static_cast<std::size_t>(b) * static_cast<std::size_t>(dim) +
                   static_cast<std::size_t>(axis)];
      });
  kd_build(pts, perm, dim, lo, m, depth + 1);
  kd_build(pts, perm, dim, m + 1, hi, depth + 1);
}

void kd_nearest(const std::vector<double>& pts,
                const std::vector<std::uint32_t>& perm, int dim, std::size_t lo,
                std::size_t hi, int depth, const double* q, std::size_t exclude,
                double& best_d2, std::size_t& best_i) {
  if (lo >= hi) return;
  const std::size_t m = lo + (hi - lo) / 2;
  const auto idx = static_cast<std::size_t>(perm[m]);
  const double* p = pts.data() + idx * static_cast<std::size_t>(dim);
  if (idx != exclude) {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double df = p[a] - q[a];
      d2 += df * df;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best_i = idx;
    }
  }
  const int axis = depth % dim;
  const double diff = q[axis] - p[axis];
  // nth_element leaves coordinates <= split on the left, >= on the right,
  // so the far side is safe to skip once diff^2 reaches the current best.
  if (diff <= 0.0) {
    kd_nearest(pts, perm, dim, lo, m, depth + 1, q, exclude, best_d2, best_i);
    if (diff * diff < best_d2)
      kd_nearest(pts, perm, dim, m + 1, hi, depth + 1, q, exclude, best_d2,
                 best_i);
  } else {
    kd_nearest(pts, perm, dim, m + 1, hi, depth + 1, q, exclude, best_d2,
               best_i);
    if (diff * diff < best_d2)
      kd_nearest(pts, perm, dim, lo, m, depth + 1, q, exclude, best_d2, best_i);
  }
}

}  // namespace

void KdTree::insert(std::span<const double> p) {
  if (static_cast<int>(p.size()) != dim_)
    throw std::invalid_argument("KdTree::insert: dimension mismatch");
  pts_.insert(pts_.end(), p.begin(), p.end());
  const std::size_t n = size();
  if ((n - tree_count_) * 4 >= n) rebuild();
}

void KdTree::rebuild() {
  tree_count_ = size();
  perm_.resize(tree_count_);
  std::iota(perm_.begin(), perm_.end(), 0u);
  kd_build(pts_, perm_, dim_, 0, tree_count_, 0);
}

template <typename Accept, typename Visit>
void KdTree::walk(std::size_t lo, std::size_t hi, int depth, const Accept& prune,
                  const Visit& visit) const {
  if (lo >= hi) return;
  const std::size_t m = lo + (hi - lo) / 2;
  const auto idx = static_cast<std::size_t>(perm_[m]);
  visit(idx);
  const int axis = depth % dim_;
  const double split =
      pts_[idx * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)];
  const auto [go_left, go_right] = prune(axis, split);
  if (go_left) walk(lo, m, depth + 1, prune, visit);
  if (go_right) walk(m + 1, hi, depth + 1, prune, visit);
}

void KdTree::collect_near_line(int free_axis, std::span<const double> anchor,
                               double rho,
                               std::vector<std::size_t>& out) const {
  if (free_axis < 0 || free_axis >= dim_ ||
      static_cast<int>(anchor.size()) != dim_)
    throw std::invalid_argument("KdTree::collect_near_line: bad query");
  out.clear();
  const double rho2 = rho * rho;
  const auto prune = [&](int axis, double split) -> std::pair<bool, bool> {
    if (axis == free_axis) return {true, true};
    return {anchor[static_cast<std::size_t>(axis)] - rho <= split,
            anchor[static_cast<std::size_t>(axis)] + rho >= split};
  };
  const auto visit = [&](std::size_t idx) {
    const double* p = pts_.data() + idx * static_cast<std::size_t>(dim_);
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      if (a == free_axis) continue;
      const double df = p[a] - anchor[static_cast<std::size_t>(a)];
      d2 += df * df;
    }
    if (d2 < rho2) out.push_back(idx);
  };
  walk(0, tree_count_, 0, prune, visit);
  for (std::size_t i = tree_count_; i < size(); ++i) visit(i);
}

void KdTree::collect_in_ball(std::span<const double> center, double rho,
                             std::vector<std::size_t>& out) const {
  if (static_cast<int>(center.size()) != dim_)
    throw std::invalid_argument("KdTree::collect_in_ball: bad query");
  out.clear();
  const double rho2 = rho * rho;
  const auto prune = [&](int axis, double split) -> std::pair<bool, bool> {
    return {center[static_cast<std::size_t>(axis)] - rho <= split,
            center[static_cast<std::size_t>(axis)] + rho >= split};
  };
  const auto visit = [&](std::size_t idx) {
    const double* p = pts_.data() + idx * static_cast<std::size_t>(dim_);
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double df = p[a] - center[static_cast<std::size_t>(a)];
      d2 += df * df;
    }
    if (d2 < rho2) out.push_back(idx);
  };
  walk(0, tree_count_, 0, prune, visit);
  for (std::size_t i = tree_count_; i < size(); ++i) visit(i);
}

std::size_t KdTree::nearest(std::span<const double> q, double* dist_out,
                            std::size_t exclude) const {
  if (static_cast<int>(q.size()) != dim_)
    throw std::invalid_argument("KdTree::nearest: bad query");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_i = npos;
  kd_nearest(pts_, perm_, dim_, 0, tree_count_, 0, q.data(), exclude, best_d2,
             best_i);
  for (std::size_t i = tree_count_; i < size(); ++i) {
    if (i == exclude) continue;
    const double* p = pts_.data() + i * static_cast<std::size_t>(dim_);
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double df = p[a] - q[static_cast<std::size_t>(a)];
      d2 += df * df;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best_i = i;
    }
  }
  if (dist_out) *dist_out = std::sqrt(best_d2);
  return best_i;
}

std::uint64_t required_misses(double void_fraction, int dim, int k) {
  if (!(void_fraction > 0.0) || void_fraction > 1.0)
    throw std::invalid_argument(
        "required_misses: void fraction must be in (0, 1]");
  if (dim < 1 || k < 0 || k > dim)
    throw std::invalid_argument("required_misses: bad dimensions");
  double hit_prob;
  if (k == 0) {
    hit_prob = void_fraction;
  } else {
    const double per_flat =
        std::pow(void_fraction, static_cast<double>(dim - k) / dim);
    const auto flats = static_cast<double>(binomial(dim, k));
    hit_prob = 1.0 - std::pow(1.0 - per_flat, flats);
  }
  if (!(hit_prob > 0.0))
    throw std::runtime_error("required_misses: vanishing hit probability");
  return static_cast<std::uint64_t>(std::ceil(1.0 / hit_prob));
}

namespace {

void validate_config(const MpsConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("mps: dimension must be >= 1");
  if (!(cfg.r_f > 0.0)) throw std::invalid_argument("mps: r_f must be positive");
  if (!(cfg.void_fraction > 0.0) || cfg.void_fraction > 1.0)
    throw std::invalid_argument("mps: void fraction must be in (0, 1]");
}

std::size_t live_memory_bytes(const MpsState& state, int dim) {
  return state.cloud.coords.capacity() * sizeof(double) +
         state.tree.memory_bytes() +
         state.segments.capacity() * sizeof(double) +
         state.neighbors.capacity() * sizeof(std::size_t) +
         static_cast<std::size_t>(dim) * sizeof(double);
}

}  // namespace

ThrowResult throw_line_dart(MpsState& state, const MpsConfig& cfg,
                            RngStream& rng, MpsStats* stats) {
  validate_config(cfg);
  const int d = cfg.dim;
  ThrowResult res;
  res.anchor.resize(static_cast<std::size_t>(d));
  for (double& c : res.anchor) c = rng.next_double();

  res.axis_order.resize(static_cast<std::size_t>(d));
  std::iota(res.axis_order.begin(), res.axis_order.end(), 0);
  for (int i = d - 1; i > 0; --i) {
    const auto j = static_cast<int>(
        rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(res.axis_order[static_cast<std::size_t>(i)],
              res.axis_order[static_cast<std::size_t>(j)]);
  }

  const double r2 = cfg.r_f * cfg.r_f;
  for (const int axis : res.axis_order) {
    state.segments.reset_unit();
    state.tree.collect_near_line(axis, res.anchor, cfg.r_f, state.neighbors);
    for (const std::size_t idx : state.neighbors) {
      const auto p = state.tree.point(idx);
      double rho2 = 0.0;
      for (int a = 0; a < d; ++a) {
        if (a == axis) continue;
        const double df = p[static_cast<std::size_t>(a)] -
                          res.anchor[static_cast<std::size_t>(a)];
        rho2 += df * df;
      }
      const double h = std::sqrt(std::max(0.0, r2 - rho2));
      // Pad the covered interval so a sample at its very edge still clears
      // the minimum distance after rounding.
      const double pad = h * 1e-12 + 1e-18;
      const double c = p[static_cast<std::size_t>(axis)];
      state.segments.subtract(c - h - pad, c + h + pad);
    }
    if (stats)
      stats->max_segment_endpoints = std::max(
          stats->max_segment_endpoints, state.segments.endpoints().size());
    if (!state.segments.empty()) {
      res.hit = true;
      res.point = res.anchor;
      res.point[static_cast<std::size_t>(axis)] = state.segments.sample(rng);
      state.cloud.push_back(res.point);
      state.tree.insert(res.point);
      return res;
    }
  }
  return res;
}

ThrowResult throw_point_dart(MpsState& state, const MpsConfig& cfg,
                             RngStream& rng) {
  validate_config(cfg);
  ThrowResult res;
  res.anchor.resize(static_cast<std::size_t>(cfg.dim));
  for (double& c : res.anchor) c = rng.next_double();
  double dist = std::numeric_limits<double>::infinity();
  const std::size_t near = state.tree.nearest(res.anchor, &dist);
  if (near == KdTree::npos || dist >= cfg.r_f) {
    res.hit = true;
    res.point = res.anchor;
    state.cloud.push_back(res.point);
    state.tree.insert(res.point);
  }
  return res;
}

std::pair<PointCloud, MpsStats> run_mps(const MpsConfig& cfg, RngStream rng) {
  validate_config(cfg);
  MpsState state(cfg);
  MpsStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  const std::uint64_t needed = required_misses(
      cfg.void_fraction, cfg.dim, cfg.dart_kind == DartKind::line ? 1 : 0);
  std::uint64_t darts = 0;
  for (;;) {
    if (cfg.max_darts > 0 && darts >= cfg.max_darts) break;
    if (cfg.time_budget_s > 0.0 && elapsed() >= cfg.time_budget_s) break;
    const ThrowResult res = cfg.dart_kind == DartKind::line
                                ? throw_line_dart(state, cfg, rng, &stats)
                                : throw_point_dart(state, cfg, rng);
    ++darts;
    if (res.hit) {
      ++stats.hits;
      const std::uint64_t run = stats.consecutive_misses;
      stats.consecutive_misses = 0;
      // Power-of-two checkpoints keep the event list deterministic in the
      // dart sequence while still tracing the growth curve.
      if ((stats.hits & (stats.hits - 1)) == 0)
        stats.inserted_over_time.push_back({elapsed(), stats.hits, run});
      stats.peak_memory_bytes =
          std::max(stats.peak_memory_bytes, live_memory_bytes(state, cfg.dim));
    } else {
      ++stats.misses;
      if (++stats.consecutive_misses >= needed) break;
    }
  }
  stats.wall_s = elapsed();
  stats.inserted_over_time.push_back(
      {stats.wall_s, stats.hits, stats.consecutive_misses});
  stats.peak_memory_bytes =
      std::max(stats.peak_memory_bytes, live_memory_bytes(state, cfg.dim));
  return {std::move(state.cloud), std::move(stats)};
}

QualityReport measure_quality(const PointCloud& cloud, double r_f_config,
                              std::uint64_t probes, RngStream rng,
                              int threads) {
  QualityReport rep;
  const std::size_t n = cloud.size();
  if (n < 2) return rep;
  if (!(r_f_config > 0.0))
    throw std::invalid_argument("measure_quality: r_f must be positive");
  const int d = cloud.dim;
  KdTree tree(d);
  for (std::size_t i = 0; i < n; ++i) tree.insert(cloud.point(i));

  std::vector<double> dmin(n);
  parallel_for(n, threads, [&](std::uint64_t i) {
    double dist = 0.0;
    tree.nearest(cloud.point(i), &dist, i);
    dmin[i] = dist;
  });
  rep.r_f_measured = *std::min_element(dmin.begin(), dmin.end());

  if (probes > 0) {
    std::vector<double> px(probes * static_cast<std::size_t>(d));
    for (double& c : px) c = rng.next_double();
    std::vector<double> dprobe(probes);
    parallel_for(probes, threads, [&](std::uint64_t i) {
      double dist = 0.0;
      tree.nearest(
          std::span<const double>(px.data() + i * static_cast<std::size_t>(d),
                                  static_cast<std::size_t>(d)),
          &dist);
      dprobe[i] = dist;
    });
    rep.r_c_estimate = *std::max_element(dprobe.begin(), dprobe.end());
  }
  rep.aspect_ratio = rep.r_c_estimate / r_f_config;
  return rep;
}

std::size_t expected_peak_memory_bytes(std::size_t n, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t cloud = n * d * sizeof(double);
  const std::size_t tree = n * d * sizeof(double) + n * sizeof(std::uint32_t);
  const std::size_t segments = 2 * (n + 1) * sizeof(double);
  return cloud + tree + segments + d * sizeof(double);
}

}  // namespace kdarts::mps
