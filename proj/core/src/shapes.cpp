#include "kdarts/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kdarts/dart_gen.hpp"

namespace kdarts {

double ball_volume(int k, double radius) {
  if (k < 0) throw std::invalid_argument("ball_volume: negative dimension");
  if (radius < 0.0) throw std::invalid_argument("ball_volume: negative radius");
  if (k == 0) return 1.0;
  const double half = 0.5 * k;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) *
         std::pow(radius, static_cast<double>(k));
}

Ellipsoid::Ellipsoid(int dim, double squish, std::vector<GivensRotation> rotations)
    : dim_(dim), squish_(squish), rots_(std::move(rotations)) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("Ellipsoid: dimension out of range");
  if (!(squish > 0.0))
    throw std::invalid_argument("Ellipsoid: squish must be positive");
  for (const auto& r : rots_)
    if (r.i < 0 || r.j <= r.i || r.j >= dim)
      throw std::invalid_argument("Ellipsoid: bad rotation plane");
  scale_.assign(static_cast<std::size_t>(dim), 1.0);
  if (squish <= 1.0) {
    scale_[0] = squish;
  } else {
    for (int a = 1; a < dim; ++a) scale_[static_cast<std::size_t>(a)] = 1.0 / squish;
  }
}

void Ellipsoid::back_project(std::span<const double> x,
                             std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(dim_) || out.size() != x.size())
    throw std::invalid_argument("Ellipsoid::back_project: size mismatch");
  std::copy(x.begin(), x.end(), out.begin());
  for (auto it = rots_.rbegin(); it != rots_.rend(); ++it) {
    const double c = std::cos(it->theta), s = std::sin(it->theta);
    const auto i = static_cast<std::size_t>(it->i);
    const auto j = static_cast<std::size_t>(it->j);
    const double xi = out[i], xj = out[j];
    out[i] = c * xi + s * xj;  // transpose of the forward rotation
    out[j] = -s * xi + c * xj;
  }
  for (int a = 0; a < dim_; ++a)
    out[static_cast<std::size_t>(a)] /= scale_[static_cast<std::size_t>(a)];
}

void Ellipsoid::forward(std::span<const double> u, std::span<double> out) const {
  if (u.size() != static_cast<std::size_t>(dim_) || out.size() != u.size())
    throw std::invalid_argument("Ellipsoid::forward: size mismatch");
  for (int a = 0; a < dim_; ++a)
    out[static_cast<std::size_t>(a)] =
        u[static_cast<std::size_t>(a)] * scale_[static_cast<std::size_t>(a)];
  for (const auto& r : rots_) {
    const double c = std::cos(r.theta), s = std::sin(r.theta);
    const auto i = static_cast<std::size_t>(r.i);
    const auto j = static_cast<std::size_t>(r.j);
    const double xi = out[i], xj = out[j];
    out[i] = c * xi - s * xj;
    out[j] = s * xi + c * xj;
  }
}

Ellipsoid make_ellipsoid(int dim, double squish, int rotation_count,
                         RngStream& rng) {
  if (dim < 2 && rotation_count > 0)
    throw std::invalid_argument("make_ellipsoid: rotations need dim >= 2");
  if (rotation_count < 0)
    throw std::invalid_argument("make_ellipsoid: negative rotation count");
  std::vector<GivensRotation> rots;
  rots.reserve(static_cast<std::size_t>(rotation_count));
  for (int r = 0; r < rotation_count; ++r) {
    auto a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dim)));
    auto b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dim - 1)));
    if (b >= a) ++b;  // uniform unordered pair
    const double theta = rng.uniform(0.0, std::numbers::pi);
    rots.push_back({std::min(a, b), std::max(a, b), theta});
  }
  return Ellipsoid(dim, squish, std::move(rots));
}

double true_volume(const Ellipsoid& e) {
  double v = ball_volume(e.dim(), 1.0);
  for (double s : e.axis_scale()) v *= s;
  return v;
}

bool point_inside(std::span<const double> x, const Ellipsoid& e) {
  double u[Ellipsoid::kMaxDim];
  e.back_project(x, std::span<double>(u, x.size()));
  double n2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) n2 += u[a] * u[a];
  return n2 <= 1.0;
}

namespace {

// k-volume of the ellipsoid's cross-section with the aligned flat, before
// dividing by the flat's clipped measure. Computed in the unit-ball frame
// and scaled forward. Returns the membership indicator for k = 0.
double aligned_cross_section(int dim, std::span<const int> fixed_idx,
                             std::span<const double> fixed_val,
                             const Ellipsoid& e) {
  constexpr int D = Ellipsoid::kMaxDim;
  if (dim != e.dim())
    throw std::invalid_argument("flat_fraction: dimension mismatch");
  const int k = dim - static_cast<int>(fixed_idx.size());
  if (k < 0) throw std::invalid_argument("flat_fraction: too many pinned axes");
  const auto d = static_cast<std::size_t>(dim);

  // Anchor point of the flat: pinned coordinates set, free ones at zero.
  double p[D], q0[D];
  std::fill(p, p + d, 0.0);
  for (std::size_t m = 0; m < fixed_idx.size(); ++m)
    p[static_cast<std::size_t>(fixed_idx[m])] = fixed_val[m];
  e.back_project(std::span<const double>(p, d), std::span<double>(q0, d));

  if (k == 0) {
    double n2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) n2 += q0[a] * q0[a];
    return n2 <= 1.0 ? 1.0 : 0.0;
  }

  // Back-project the free axis directions; they span the flat's image.
  double b[D * D];
  {
    std::size_t m = 0;  // two-pointer over the sorted pinned list
    int row = 0;
    double ei[D], bi[D];
    for (int a = 0; a < dim; ++a) {
      if (m < fixed_idx.size() && fixed_idx[m] == a) {
        ++m;
        continue;
      }
      std::fill(ei, ei + d, 0.0);
      ei[static_cast<std::size_t>(a)] = 1.0;
      e.back_project(std::span<const double>(ei, d), std::span<double>(bi, d));
      std::copy(bi, bi + d, b + static_cast<std::size_t>(row) * d);
      ++row;
    }
  }

  // Two-pass modified Gram-Schmidt; the rows of b become orthonormal.
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < k; ++i) {
      double* ui = b + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < i; ++j) {
        const double* uj = b + static_cast<std::size_t>(j) * d;
        double dot = 0.0;
        for (std::size_t a = 0; a < d; ++a) dot += ui[a] * uj[a];
        for (std::size_t a = 0; a < d; ++a) ui[a] -= dot * uj[a];
      }
      double n2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) n2 += ui[a] * ui[a];
      const double norm = std::sqrt(n2);
      if (norm < 1e-12)
        throw std::runtime_error("flat_fraction: singular flat image");
      for (std::size_t a = 0; a < d; ++a) ui[a] /= norm;
    }
  }

  // Perpendicular distance from the origin to the flat's image.
  double r[D];
  std::copy(q0, q0 + d, r);
  for (int i = 0; i < k; ++i) {
    const double* ui = b + static_cast<std::size_t>(i) * d;
    double dot = 0.0;
    for (std::size_t a = 0; a < d; ++a) dot += r[a] * ui[a];
    for (std::size_t a = 0; a < d; ++a) r[a] -= dot * ui[a];
  }
  double t2 = 0.0;
  for (std::size_t a = 0; a < d; ++a) t2 += r[a] * r[a];
  if (t2 >= 1.0) return 0.0;

  // Jacobian of the forward map on the flat's direction span: Gram
  // determinant of the mapped orthonormal basis, via Cholesky.
  double mrows[D * D];
  for (int i = 0; i < k; ++i)
    e.forward(std::span<const double>(b + static_cast<std::size_t>(i) * d, d),
              std::span<double>(mrows + static_cast<std::size_t>(i) * d, d));
  double g[D * D];
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      double dot = 0.0;
      const double* mi = mrows + static_cast<std::size_t>(i) * d;
      const double* mj = mrows + static_cast<std::size_t>(j) * d;
      for (std::size_t a = 0; a < d; ++a) dot += mi[a] * mj[a];
      g[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
        static_cast<std::size_t>(j)] = dot;
    }
  double sqrt_det = 1.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = g[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                     static_cast<std::size_t>(j)];
      for (int m = 0; m < j; ++m)
        sum -= g[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                 static_cast<std::size_t>(m)] *
               g[static_cast<std::size_t>(j) * static_cast<std::size_t>(k) +
                 static_cast<std::size_t>(m)];
      if (j == i) {
        if (sum <= 0.0)
          throw std::runtime_error("flat_fraction: degenerate Gram matrix");
        g[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
          static_cast<std::size_t>(i)] = std::sqrt(sum);
        sqrt_det *= std::sqrt(sum);
      } else {
        g[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
          static_cast<std::size_t>(j)] =
            sum / g[static_cast<std::size_t>(j) * static_cast<std::size_t>(k) +
                    static_cast<std::size_t>(j)];
      }
    }
  }

  return ball_volume(k, std::sqrt(1.0 - t2)) * sqrt_det;
}

}  // namespace

double flat_fraction_aligned(int dim, std::span<const int> fixed_idx,
                             std::span<const double> fixed_val,
                             const Ellipsoid& e, const BoxDomain& domain) {
  const int k = dim - static_cast<int>(fixed_idx.size());
  const double cross = aligned_cross_section(dim, fixed_idx, fixed_val, e);
  if (k == 0) return cross;
  double measure = 1.0;
  std::size_t m = 0;
  for (int a = 0; a < dim; ++a) {
    if (m < fixed_idx.size() && fixed_idx[m] == a) {
      ++m;
      continue;
    }
    measure *= domain.extent(a);
  }
  return cross / measure;
}

double flat_fraction_line2d(std::span<const double, 2> dir,
                            std::span<const double, 2> anchor,
                            const Ellipsoid& e, const BoxDomain& domain) {
  if (e.dim() != 2 || domain.dim != 2)
    throw std::invalid_argument("flat_fraction_line2d: wants dimension 2");
  double v[2], a0[2];
  e.back_project(dir, std::span<double>(v, 2));
  e.back_project(anchor, std::span<double>(a0, 2));
  const double vn = std::hypot(v[0], v[1]);
  if (vn < 1e-300)
    throw std::runtime_error("flat_fraction_line2d: degenerate direction");
  const double w[2] = {v[0] / vn, v[1] / vn};
  // Perpendicular distance of the back-projected line from the origin.
  const double proj = a0[0] * w[0] + a0[1] * w[1];
  const double rx = a0[0] - proj * w[0], ry = a0[1] - proj * w[1];
  const double t2 = rx * rx + ry * ry;

  Flat clip;
  clip.dim = 2;
  clip.orientation = Flat::Oriented{{dir[0], dir[1]}, {anchor[0], anchor[1]}};
  const double length = clipped_flat_measure(clip, domain);
  if (!(length > 0.0))
    throw std::runtime_error("flat_fraction_line2d: line misses the domain");
  if (t2 >= 1.0) return 0.0;

  double fw[2];
  e.forward(std::span<const double>(w, 2), std::span<double>(fw, 2));
  const double chord = 2.0 * std::sqrt(1.0 - t2) * std::hypot(fw[0], fw[1]);
  return chord / length;
}

double flat_fraction(const Flat& flat, const Ellipsoid& e,
                     const BoxDomain& domain) {
  if (flat.aligned())
    return flat_fraction_aligned(flat.dim, flat.fixed_idx, flat.fixed_val, e,
                                 domain);
  const auto& o = *flat.orientation;
  return flat_fraction_line2d(std::span<const double, 2>(o.dir),
                              std::span<const double, 2>(o.anchor), e, domain);
}

double flat_fraction_sphere_aligned(int dim, std::span<const int> fixed_idx,
                                    std::span<const double> fixed_val,
                                    const Sphere& s, const BoxDomain& domain) {
  if (dim != s.dim || dim != domain.dim)
    throw std::invalid_argument("flat_fraction_sphere: dimension mismatch");
  const int k = dim - static_cast<int>(fixed_idx.size());
  if (k < 0)
    throw std::invalid_argument("flat_fraction_sphere: too many pinned axes");
  double d2 = 0.0;
  for (std::size_t m = 0; m < fixed_idx.size(); ++m) {
    const double c =
        s.center.empty() ? 0.0 : s.center[static_cast<std::size_t>(fixed_idx[m])];
    const double dv = fixed_val[m] - c;
    d2 += dv * dv;
  }
  const double r2 = s.radius * s.radius;
  if (k == 0) return d2 <= r2 ? 1.0 : 0.0;
  if (d2 >= r2) return 0.0;
  double measure = 1.0;
  std::size_t m = 0;
  for (int a = 0; a < dim; ++a) {
    if (m < fixed_idx.size() && fixed_idx[m] == a) {
      ++m;
      continue;
    }
    measure *= domain.extent(a);
  }
  return ball_volume(k, std::sqrt(r2 - d2)) / measure;
}

double flat_fraction_sphere(const Flat& flat, const Sphere& s,
                            const BoxDomain& domain) {
  if (flat.aligned())
    return flat_fraction_sphere_aligned(flat.dim, flat.fixed_idx,
                                        flat.fixed_val, s, domain);
  const auto& o = *flat.orientation;
  const double cx = s.center.empty() ? 0.0 : s.center[0];
  const double cy = s.center.empty() ? 0.0 : s.center[1];
  // Perpendicular distance from the center to the line.
  const double ax = o.anchor[0] - cx, ay = o.anchor[1] - cy;
  const double proj = ax * o.dir[0] + ay * o.dir[1];
  const double rx = ax - proj * o.dir[0], ry = ay - proj * o.dir[1];
  const double t2 = rx * rx + ry * ry;
  const double r2 = s.radius * s.radius;
  const double length = clipped_flat_measure(flat, domain);
  if (!(length > 0.0))
    throw std::runtime_error("flat_fraction_sphere: line misses the domain");
  if (t2 >= r2) return 0.0;
  return 2.0 * std::sqrt(r2 - t2) / length;
}

double SphereIndicator::value(std::span<const double> x) const {
  const double r2 = sphere_.radius * sphere_.radius;
  double d2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double c = sphere_.center.empty() ? 0.0 : sphere_.center[a];
    d2 += (x[a] - c) * (x[a] - c);
  }
  return d2 <= r2 ? 1.0 : 0.0;
}

std::optional<double> SphereIndicator::flat_integral(
    const Flat& flat, const BoxDomain& domain) const {
  return flat_fraction_sphere(flat, sphere_, domain) *
         clipped_flat_measure(flat, domain);
}

double EllipsoidIndicator::value(std::span<const double> x) const {
  return point_inside(x, ellipsoid_) ? 1.0 : 0.0;
}

std::optional<double> EllipsoidIndicator::flat_integral(
    const Flat& flat, const BoxDomain& domain) const {
  return flat_fraction(flat, ellipsoid_, domain) *
         clipped_flat_measure(flat, domain);
}

}  // namespace kdarts
