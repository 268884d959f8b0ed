#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "kdarts/rng.hpp"

namespace kdarts::mps {

enum class DartKind { point, line };

// Maximal Poisson-disk sampling of the unit box (non-periodic): minimum
// pairwise distance r_f, termination when the run of consecutive misses
// reaches the count implied by the target void fraction V.
struct MpsConfig {
  int dim = 2;
  double r_f = 0.1;
  double void_fraction = 1e-2;  // V in the stopping rule
  DartKind dart_kind = DartKind::line;
  std::uint64_t max_darts = 0;   // 0 means unlimited
  double time_budget_s = 0.0;    // 0 means no wall-clock cap
};

// Union of disjoint segments of [0, 1] kept as sorted endpoints
// [a0 b0 a1 b1 ...]; subtraction clips, splits, or removes segments and
// never allocates beyond the endpoint vector itself.
class SegmentList {
 public:
  void reset_unit() { endpoints_.assign({0.0, 1.0}); }
  void clear() { endpoints_.clear(); }
  bool empty() const { return endpoints_.empty(); }
  std::span<const double> endpoints() const { return endpoints_; }
  std::size_t capacity() const { return endpoints_.capacity(); }

  // Removes the closed interval [lo, hi]. A boundary point may survive as a
  // segment endpoint; strict lower_bound/upper_bound splicing never leaves a
  // zero-length pair behind.
  void subtract(double lo, double hi);

  double total_length() const;

  // Uniform point of the remaining union; sampling an empty list is an
  // empty-void error.
  double sample(RngStream& rng) const;

 private:
  std::vector<double> endpoints_;
};

struct PointCloud {
  int dim = 0;
  std::vector<double> coords;  // n * dim, insertion order

  std::size_t size() const {
    return dim > 0 ? coords.size() / static_cast<std::size_t>(dim) : 0;
  }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  void push_back(std::span<const double> p) {
    coords.insert(coords.end(), p.begin(), p.end());
  }
};

// kd-tree over the accepted points. Inserts are buffered and scanned
// linearly; the tree is rebuilt once the buffer reaches a quarter of the
// points, so queries stay O(log n) amortized. Range collectors filter by
// exact distance, so they return every point strictly within rho and none
// farther.
class KdTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit KdTree(int dim) : dim_(dim) {}

  std::size_t size() const {
    return pts_.size() / static_cast<std::size_t>(dim_);
  }
  std::span<const double> point(std::size_t i) const {
    return {pts_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }

  void insert(std::span<const double> p);

  // Points with perpendicular distance < rho from the axis-aligned line
  // through `anchor` along free_axis (the anchor's free_axis coordinate is
  // ignored).
  void collect_near_line(int free_axis, std::span<const double> anchor,
                         double rho, std::vector<std::size_t>& out) const;

  // Points with Euclidean distance < rho from the center.
  void collect_in_ball(std::span<const double> center, double rho,
                       std::vector<std::size_t>& out) const;

  // Index of the nearest stored point, skipping `exclude`; npos when empty.
  std::size_t nearest(std::span<const double> q, double* dist_out = nullptr,
                      std::size_t exclude = npos) const;

  std::size_t memory_bytes() const {
    return pts_.capacity() * sizeof(double) +
           perm_.capacity() * sizeof(std::uint32_t);
  }

 private:
  void rebuild();
  template <typename Accept, typename Visit>
  void walk(std::size_t lo, std::size_t hi, int depth, const Accept& prune,
            const Visit& visit) const;

  int dim_;
  std::vector<double> pts_;
  std::vector<std::uint32_t> perm_;  // kd layout over [0, tree_count_)
  std::size_t tree_count_ = 0;       // points beyond this index are buffered
};

struct MpsStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t consecutive_misses = 0;  // run length at termination
  struct Event {
    double wall_s = 0.0;
    std::uint64_t points = 0;
    std::uint64_t miss_run = 0;  // consecutive misses preceding the event
  };
  // Samples at power-of-two insert counts plus the final state.
  std::vector<Event> inserted_over_time;
  std::size_t max_segment_endpoints = 0;
  std::size_t peak_memory_bytes = 0;
  double wall_s = 0.0;
};

struct MpsState {
  explicit MpsState(const MpsConfig& cfg)
      : cloud{cfg.dim, {}}, tree(cfg.dim) {}
  PointCloud cloud;
  KdTree tree;
  SegmentList segments;               // the single reusable scratch list
  std::vector<std::size_t> neighbors;  // reusable range-query buffer
};

struct ThrowResult {
  bool hit = false;
  std::vector<double> point;       // filled on a hit
  std::vector<double> anchor;      // the dart's pinned coordinates
  std::vector<int> axis_order;     // line darts: axes in visit order
};

// One line dart: an anchor point defines d candidate lines, visited in a
// fresh random axis order; the first line whose uncovered segment list is
// non-empty yields a uniformly sampled point, inserted into the state. A
// dart whose d lines are all fully covered is a miss.
ThrowResult throw_line_dart(MpsState& state, const MpsConfig& cfg,
                            RngStream& rng, MpsStats* stats = nullptr);

// One classic point dart: accepted iff no prior point lies strictly within
// r_f.
ThrowResult throw_point_dart(MpsState& state, const MpsConfig& cfg,
                             RngStream& rng);

// Consecutive-miss count m >= ceil(1 / P_k) that certifies the residual
// void fraction V at the dart's hit probability: p_k = V^((d-k)/d) per
// flat, P_k = 1 - (1 - p_k)^C(d,k); P_0 = V for point darts.
std::uint64_t required_misses(double void_fraction, int dim, int k);

// Runs darts until the consecutive-miss rule, the dart cap, or the time
// budget stops the process.
std::pair<PointCloud, MpsStats> run_mps(const MpsConfig& cfg, RngStream rng);

struct QualityReport {
  double r_f_measured = 0.0;   // minimum pairwise distance
  double r_c_estimate = 0.0;   // largest probe-to-sample distance
  double aspect_ratio = 0.0;   // r_c_estimate / configured r_f
};

// Nearest-neighbor probe of the cloud quality; fewer than two points leave
// nothing to measure.
QualityReport measure_quality(const PointCloud& cloud, double r_f_config,
                              std::uint64_t probes, RngStream rng,
                              int threads = 1);

// Analytic footprint of a run at n points: cloud plus kd-tree plus one
// segment list plus the d-sized anchor scratch.
std::size_t expected_peak_memory_bytes(std::size_t n, int dim);

}  // namespace kdarts::mps
