#include "kdarts/dart_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "kdarts/combinatorics.hpp"

namespace kdarts {

std::vector<int> Flat::free_axes() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(dim) - fixed_idx.size());
  std::size_t m = 0;
  for (int a = 0; a < dim; ++a) {
    if (m < fixed_idx.size() && fixed_idx[m] == a) {
      ++m;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c = c * (n - k + i) / i, exact at every step
    const auto num = static_cast<std::uint64_t>(n - k + i);
    const std::uint64_t g = std::gcd(c, static_cast<std::uint64_t>(i));
    std::uint64_t ci = c / g;
    const std::uint64_t rem = static_cast<std::uint64_t>(i) / g;
    const std::uint64_t numq = num / rem;  // divides exactly after the gcd
    if (ci > std::numeric_limits<std::uint64_t>::max() / numq)
      throw std::overflow_error("binomial: result exceeds 64 bits");
    c = ci * numq;
  }
  return c;
}

Dart gen_point_dart(const BoxDomain& domain, RngStream& rng) {
  return gen_aligned_dart(domain, 0, rng);
}

Dart gen_aligned_dart(const BoxDomain& domain, int k, RngStream& rng) {
  const int d = domain.dim;
  if (k < 0 || k > d)
    throw std::invalid_argument("gen_aligned_dart: invalid dimension k");
  Dart dart;
  dart.k = k;
  dart.flats.reserve(binomial(d, d - k));
  for_each_combination(d, d - k, [&](std::span<const int> fixed) {
    Flat f;
    f.dim = d;
    f.fixed_idx.assign(fixed.begin(), fixed.end());
    f.fixed_val.resize(fixed.size());
    for (std::size_t m = 0; m < fixed.size(); ++m)
      f.fixed_val[m] = rng.uniform(domain.lo[static_cast<std::size_t>(fixed[m])],
                                   domain.hi[static_cast<std::size_t>(fixed[m])]);
    dart.flats.push_back(std::move(f));
  });
  return dart;
}

namespace {

struct Diagonal {
  std::array<double, 2> from;
  std::array<double, 2> to;
};

// Main diagonals of the box: rising (lo,lo)-(hi,hi) and falling
// (lo,hi)-(hi,lo).
std::array<Diagonal, 2> box_diagonals(const BoxDomain& b) {
  return {Diagonal{{b.lo[0], b.lo[1]}, {b.hi[0], b.hi[1]}},
          Diagonal{{b.lo[0], b.hi[1]}, {b.hi[0], b.lo[1]}}};
}

Flat oriented_line(const BoxDomain& domain, double theta, double where,
                   bool other_diagonal) {
  const auto diags = box_diagonals(domain);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // |dot| with the rising diagonal direction (1,1)/sqrt(2) vs the falling
  // one; the smaller dot is the more perpendicular diagonal, which the
  // line is guaranteed to cross.
  const double dot_rising = std::abs(c + s);
  const double dot_falling = std::abs(c - s);
  int pick = dot_rising < dot_falling ? 0 : 1;
  if (other_diagonal) pick = 1 - pick;
  const Diagonal& dg = diags[static_cast<std::size_t>(pick)];
  Flat f;
  f.dim = 2;
  f.orientation = Flat::Oriented{
      {c, s},
      {dg.from[0] + where * (dg.to[0] - dg.from[0]),
       dg.from[1] + where * (dg.to[1] - dg.from[1])}};
  return f;
}

}  // namespace

Dart gen_unaligned_line_dart_2d(const BoxDomain& domain, bool orthogonal_pair,
                                RngStream& rng) {
  if (domain.dim != 2)
    throw std::invalid_argument(
        "gen_unaligned_line_dart_2d: unsupported dimension, d must be 2");
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double where = rng.next_double();
  Dart dart;
  dart.k = 1;
  dart.flats.push_back(oriented_line(domain, theta, where, false));
  if (orthogonal_pair) {
    const double where2 = rng.next_double();
    // Perpendicular direction; its own nearest-to-perpendicular diagonal is
    // the one the first line skipped.
    Flat second =
        oriented_line(domain, theta, where2, true);
    second.orientation->dir = {-std::sin(theta), std::cos(theta)};
    dart.flats.push_back(std::move(second));
  }
  return dart;
}

LhsTable::LhsTable(const BoxDomain& domain, int k, std::uint64_t n,
                   RngStream& rng) {
  const int d = domain.dim;
  if (k < 0 || k > d)
    throw std::invalid_argument("LhsTable: invalid dimension k");
  if (n == 0) throw std::invalid_argument("LhsTable: n must be >= 1");
  n_ = n;
  pinned_ = static_cast<std::size_t>(d - k);
  for_each_combination(d, d - k, [&](std::span<const int> fixed) {
    combos_.emplace_back(fixed.begin(), fixed.end());
  });
  values_.resize(combos_.size() * pinned_ * n);
  std::vector<std::uint32_t> perm(n);
  double* slot = values_.data();
  for (const auto& combo : combos_) {
    for (std::size_t a = 0; a < pinned_; ++a) {
      const auto axis = static_cast<std::size_t>(combo[a]);
      const double lo = domain.lo[axis];
      const double w = domain.extent(combo[a]) / static_cast<double>(n);
      for (std::uint64_t i = 0; i < n; ++i)
        perm[i] = static_cast<std::uint32_t>(i);
      for (std::uint64_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.next_below(i)]);
      for (std::uint64_t i = 0; i < n; ++i)
        slot[i] = lo + (static_cast<double>(perm[i]) + rng.next_double()) * w;
      slot += n;
    }
  }
}

void LhsTable::fixed_values(std::size_t family, std::uint64_t i,
                            std::span<double> out) const {
  const double* base = values_.data() + (family * pinned_) * n_;
  for (std::size_t a = 0; a < pinned_; ++a) out[a] = base[a * n_ + i];
}

std::vector<Dart> gen_lhs_darts(const BoxDomain& domain, int k,
                                std::uint64_t n, RngStream& rng) {
  LhsTable table(domain, k, n, rng);
  std::vector<Dart> darts(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Dart& dart = darts[i];
    dart.k = k;
    dart.flats.resize(table.families());
    for (std::size_t fam = 0; fam < table.families(); ++fam) {
      Flat& f = dart.flats[fam];
      f.dim = domain.dim;
      const auto axes = table.fixed_axes(fam);
      f.fixed_idx.assign(axes.begin(), axes.end());
      f.fixed_val.resize(axes.size());
      table.fixed_values(fam, i, f.fixed_val);
    }
  }
  return darts;
}

double clipped_flat_measure(const Flat& flat, const BoxDomain& domain) {
  if (flat.dim != domain.dim)
    throw std::invalid_argument("clipped_flat_measure: dimension mismatch");
  if (flat.aligned()) {
    double m = 1.0;
    std::size_t next = 0;
    for (int a = 0; a < domain.dim; ++a) {
      if (next < flat.fixed_idx.size() && flat.fixed_idx[next] == a) {
        ++next;
      } else {
        m *= domain.extent(a);
      }
    }
    return m;
  }
  // Liang-Barsky clip of anchor + t * dir against the box; dir is unit, so
  // the parameter range equals the length.
  const auto& o = *flat.orientation;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 2; ++a) {
    const auto u = static_cast<std::size_t>(a);
    if (std::abs(o.dir[u]) < 1e-300) {
      if (o.anchor[u] < domain.lo[u] || o.anchor[u] > domain.hi[u]) return 0.0;
      continue;
    }
    double ta = (domain.lo[u] - o.anchor[u]) / o.dir[u];
    double tb = (domain.hi[u] - o.anchor[u]) / o.dir[u];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return std::max(0.0, t1 - t0);
}

}  // namespace kdarts
