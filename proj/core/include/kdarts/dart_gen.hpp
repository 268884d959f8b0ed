#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kdarts/domain.hpp"
#include "kdarts/flat.hpp"
#include "kdarts/rng.hpp"

namespace kdarts {

// A dart with k = 0: one flat pinning every coordinate, i.e. a point sample.
Dart gen_point_dart(const BoxDomain& domain, RngStream& rng);

// A dart of C(d, k) axis-aligned k-flats, one per combination of pinned
// axes (lexicographic order), every pinned coordinate uniform over its
// extent. k outside [0, d] is an invalid dimension.
Dart gen_aligned_dart(const BoxDomain& domain, int k, RngStream& rng);

// A 2-d line of uniform angle theta in [0, pi), anchored uniformly on the
// main diagonal of the box more perpendicular to it, so the line always
// crosses the domain. With orthogonal_pair the dart carries a second,
// perpendicular line anchored on the other diagonal. Domains with d != 2
// are unsupported.
Dart gen_unaligned_line_dart_2d(const BoxDomain& domain, bool orthogonal_pair,
                                RngStream& rng);

// Stratified pinned-coordinate tables backing Latin hypercube darts: for
// every pinned-axis combination and every pinned axis, the n values occupy
// the n equal strata of that extent exactly once, jittered within the
// stratum, with an independent random stratum permutation per coordinate.
class LhsTable {
 public:
  LhsTable(const BoxDomain& domain, int k, std::uint64_t n, RngStream& rng);

  std::uint64_t darts() const { return n_; }
  std::size_t families() const { return combos_.size(); }
  std::span<const int> fixed_axes(std::size_t family) const {
    return combos_[family];
  }
  // Pinned values of dart i in the given family, parallel to fixed_axes().
  void fixed_values(std::size_t family, std::uint64_t i,
                    std::span<double> out) const;

 private:
  std::uint64_t n_ = 0;
  std::size_t pinned_ = 0;
  std::vector<std::vector<int>> combos_;
  std::vector<double> values_;  // [family][pinned slot][dart]
};

// n Latin hypercube darts of aligned k-flats built from an LhsTable.
std::vector<Dart> gen_lhs_darts(const BoxDomain& domain, int k, std::uint64_t n,
                                RngStream& rng);

// Measure of the flat clipped to the domain: the product of free-axis
// extents for aligned flats (1 for points), the Euclidean length of the
// clipped segment for oriented 2-d lines.
double clipped_flat_measure(const Flat& flat, const BoxDomain& domain);

}  // namespace kdarts
