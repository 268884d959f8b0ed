#pragma once

#include <span>
#include <vector>

namespace kdarts {

// Axis-aligned box [lo_i, hi_i]^d, the sampling domain for all generators.
struct BoxDomain {
  int dim = 0;
  std::vector<double> lo;
  std::vector<double> hi;

  BoxDomain() = default;
  BoxDomain(std::vector<double> lo_in, std::vector<double> hi_in);

  static BoxDomain unit(int d);      // [0,1]^d
  static BoxDomain two_cube(int d);  // [-1,1]^d

  double extent(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  bool contains(std::span<const double> x) const;
};

}  // namespace kdarts
