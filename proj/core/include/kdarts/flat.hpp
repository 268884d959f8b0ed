#pragma once

#include <array>
#include <optional>
#include <vector>

namespace kdarts {

// A k-dimensional axis-aligned slice of a d-dimensional domain, described by
// the d-k pinned coordinates. In two dimensions a line may instead carry an
// arbitrary orientation (unit direction plus an anchor point); the aligned
// and oriented representations are mutually exclusive.
struct Flat {
  int dim = 0;
  std::vector<int> fixed_idx;     // sorted, size d-k, aligned form only
  std::vector<double> fixed_val;  // parallel to fixed_idx

  struct Oriented {
    std::array<double, 2> dir;     // unit length
    std::array<double, 2> anchor;  // a point on the line
  };
  std::optional<Oriented> orientation;  // set only for d == 2, k == 1

  bool aligned() const { return !orientation.has_value(); }
  int k() const {
    return aligned() ? dim - static_cast<int>(fixed_idx.size()) : 1;
  }

  // Complement of fixed_idx, ascending.
  std::vector<int> free_axes() const;
};

// An ordered bundle of C(d, k) flats, one per combination of pinned axes,
// evaluated together as a single sample.
struct Dart {
  int k = 0;
  std::vector<Flat> flats;
};

}  // namespace kdarts
