#include "kdarts/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kdarts/dart_gen.hpp"
#include "kdarts/stats.hpp"

namespace kdarts {

double integrate_flat_grid(
    const Flat& flat, const std::function<double(std::span<const double>)>& f,
    const BoxDomain& domain, int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("integrate_flat_grid: resolution must be >= 2");
  if (flat.dim != domain.dim)
    throw std::invalid_argument("integrate_flat_grid: dimension mismatch");

  if (!flat.aligned()) {
    // Midpoints of `resolution` subsegments of the clipped line.
    const auto& o = *flat.orientation;
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 2; ++a) {
      const auto u = static_cast<std::size_t>(a);
      if (std::abs(o.dir[u]) < 1e-300) {
        if (o.anchor[u] < domain.lo[u] || o.anchor[u] > domain.hi[u])
          return 0.0;
        continue;
      }
      double ta = (domain.lo[u] - o.anchor[u]) / o.dir[u];
      double tb = (domain.hi[u] - o.anchor[u]) / o.dir[u];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    if (!(t1 > t0)) return 0.0;
    const double h = (t1 - t0) / resolution;
    double sum = 0.0;
    double x[2];
    for (int i = 0; i < resolution; ++i) {
      const double t = t0 + (i + 0.5) * h;
      x[0] = o.anchor[0] + t * o.dir[0];
      x[1] = o.anchor[1] + t * o.dir[1];
      sum += f(std::span<const double>(x, 2));
    }
    return sum * h;
  }

  const int k = flat.k();
  if (k < 1)
    throw std::invalid_argument("integrate_flat_grid: point flat, k must be >= 1");
  const auto free = flat.free_axes();

  std::vector<double> x(static_cast<std::size_t>(flat.dim));
  for (std::size_t m = 0; m < flat.fixed_idx.size(); ++m)
    x[static_cast<std::size_t>(flat.fixed_idx[m])] = flat.fixed_val[m];

  double cell = 1.0;
  std::vector<double> h(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    h[static_cast<std::size_t>(i)] =
        domain.extent(free[static_cast<std::size_t>(i)]) / resolution;
    cell *= h[static_cast<std::size_t>(i)];
  }

  // Odometer over the resolution^k cell midpoints.
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  double sum = 0.0;
  for (;;) {
    for (int i = 0; i < k; ++i) {
      const auto u = static_cast<std::size_t>(i);
      x[static_cast<std::size_t>(free[u])] =
          domain.lo[static_cast<std::size_t>(free[u])] +
          (idx[u] + 0.5) * h[u];
    }
    sum += f(x);
    int i = k - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == resolution) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return sum * cell;
}

double flat_average(const Flat& flat, const FlatIntegrable& f,
                    const BoxDomain& domain, int grid_resolution) {
  const double measure = clipped_flat_measure(flat, domain);
  if (!(measure > 0.0))
    throw std::runtime_error("flat_average: degenerate flat, zero measure");
  if (flat.aligned() && flat.k() == 0) {
    std::vector<double> x(static_cast<std::size_t>(flat.dim));
    for (std::size_t m = 0; m < flat.fixed_idx.size(); ++m)
      x[static_cast<std::size_t>(flat.fixed_idx[m])] = flat.fixed_val[m];
    return f.value(x);
  }
  if (const auto g = f.flat_integral(flat, domain)) return *g / measure;
  const double g = integrate_flat_grid(
      flat, [&f](std::span<const double> x) { return f.value(x); }, domain,
      grid_resolution);
  return g / measure;
}

double dart_value(const Dart& dart, const FlatIntegrable& f,
                  const BoxDomain& domain, int grid_resolution) {
  if (dart.flats.empty())
    throw std::invalid_argument("dart_value: dart has no flats");
  double acc = 0.0;
  for (const auto& flat : dart.flats)
    acc += flat_average(flat, f, domain, grid_resolution);
  return acc / static_cast<double>(dart.flats.size());
}

Estimate estimate_mean(const FlatIntegrable& f, std::span<const Dart> darts,
                       const BoxDomain& domain, bool keep_samples,
                       int grid_resolution) {
  if (darts.empty())
    throw std::invalid_argument("estimate_mean: empty sample");
  Estimate est;
  RunningStat st;
  if (keep_samples) est.per_sample.reserve(darts.size());
  for (const auto& dart : darts) {
    const double y = dart_value(dart, f, domain, grid_resolution);
    st.add(y);
    if (keep_samples) est.per_sample.push_back(y);
  }
  est.mean = st.mean;
  est.std_error = st.std_error();
  est.n = st.count;
  return est;
}

}  // namespace kdarts
