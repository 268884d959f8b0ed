#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kdarts/domain.hpp"
#include "kdarts/flat.hpp"

namespace kdarts {

// Function contract for flat-based estimation: a pointwise value always,
// plus an exact integral over a clipped flat when the integrand affords one.
// flat_average() prefers the exact integral and falls back to grid
// integration of the pointwise values.
class FlatIntegrable {
 public:
  virtual ~FlatIntegrable() = default;
  virtual double value(std::span<const double> x) const = 0;
  virtual std::optional<double> flat_integral(const Flat&,
                                              const BoxDomain&) const {
    return std::nullopt;
  }
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample stddev / sqrt(n)
  std::uint64_t n = 0;
  std::vector<double> per_sample;  // kept only on request
};

// Composite midpoint rule over the flat clipped to the box: resolution^k
// cells for an aligned k-flat (k >= 1), resolution subsegments for an
// oriented 2-d line. resolution < 2 is invalid.
double integrate_flat_grid(
    const Flat& flat,
    const std::function<double(std::span<const double>)>& f,
    const BoxDomain& domain, int resolution);

// H = G / |F| where G integrates f over the clipped flat and |F| is the
// clipped measure; a flat of zero measure is degenerate. For k = 0 this is
// the pointwise value.
double flat_average(const Flat& flat, const FlatIntegrable& f,
                    const BoxDomain& domain, int grid_resolution = 256);

// Unweighted mean of flat_average over the dart's flats. A dart with k = d
// evaluates the exact domain average.
double dart_value(const Dart& dart, const FlatIntegrable& f,
                  const BoxDomain& domain, int grid_resolution = 256);

// Sample mean of dart_value over the darts with its standard error
// (stddev / sqrt(n)). An empty dart list has no sample to estimate from.
Estimate estimate_mean(const FlatIntegrable& f, std::span<const Dart> darts,
                       const BoxDomain& domain, bool keep_samples = false,
                       int grid_resolution = 256);

}  // namespace kdarts
