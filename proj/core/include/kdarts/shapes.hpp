#pragma once

#include <span>
#include <vector>

#include "kdarts/domain.hpp"
#include "kdarts/estimator.hpp"
#include "kdarts/flat.hpp"
#include "kdarts/rng.hpp"

namespace kdarts {

// Volume of the k-ball of the given radius; 1 for k = 0.
double ball_volume(int k, double radius);

struct Sphere {
  int dim = 0;
  double radius = 1.0;
  std::vector<double> center;  // empty means the origin
};

// Plane rotation by theta in the (i, j) coordinate plane, i < j.
struct GivensRotation {
  int i = 0;
  int j = 1;
  double theta = 0.0;
};

// A squished, randomly rotated unit ball centered at the origin. The unit
// ball is first scaled per axis (squish <= 1 narrows axis 0 to `squish`;
// squish > 1 keeps axis 0 at 1 and narrows the rest to 1/squish, so the
// object always fits in the two-cube), then the rotations apply in order.
class Ellipsoid {
 public:
  Ellipsoid(int dim, double squish, std::vector<GivensRotation> rotations);

  int dim() const { return dim_; }
  double squish() const { return squish_; }
  const std::vector<GivensRotation>& rotations() const { return rots_; }
  std::span<const double> axis_scale() const { return scale_; }

  // Inverse map into the unit-ball frame: inverse rotations in reverse
  // order, then the inverse axis scaling. Linear, so it serves points and
  // directions alike.
  void back_project(std::span<const double> x, std::span<double> out) const;

  // Forward map out of the unit-ball frame: axis scaling, then the
  // rotations in order.
  void forward(std::span<const double> u, std::span<double> out) const;

  static constexpr int kMaxDim = 64;

 private:
  int dim_;
  double squish_;
  std::vector<GivensRotation> rots_;
  std::vector<double> scale_;
};

// Ellipsoid with `rotation_count` random Givens rotations: each picks a
// uniform coordinate pair i < j and a uniform angle in [0, pi). squish <= 0
// is invalid.
Ellipsoid make_ellipsoid(int dim, double squish, int rotation_count,
                         RngStream& rng);

// ball_volume(d, 1) times the product of the axis scales.
double true_volume(const Ellipsoid& e);

// Strict interior test via the back-projected norm.
bool point_inside(std::span<const double> x, const Ellipsoid& e);

// Fraction of the clipped flat covered by the ellipsoid. The flat is
// back-projected into the unit-ball frame, where the intersection is a
// k-ball of radius sqrt(1 - t^2) at perpendicular distance t from the
// origin; its volume is scaled forward by the k-volume Jacobian of the
// forward map restricted to the flat's direction span (the square root of
// the Gram determinant of the mapped orthonormal basis). For k = 0 this is
// the membership indicator. Oriented 2-d lines use the chord of the
// back-projected disk, stretched by the direction's forward norm.
double flat_fraction(const Flat& flat, const Ellipsoid& e,
                     const BoxDomain& domain);

// Alloc-free aligned form used by the experiment drivers.
double flat_fraction_aligned(int dim, std::span<const int> fixed_idx,
                             std::span<const double> fixed_val,
                             const Ellipsoid& e, const BoxDomain& domain);
double flat_fraction_line2d(std::span<const double, 2> dir,
                            std::span<const double, 2> anchor,
                            const Ellipsoid& e, const BoxDomain& domain);

// Same fraction for a sphere and an aligned flat, in closed form.
double flat_fraction_sphere(const Flat& flat, const Sphere& s,
                            const BoxDomain& domain);
double flat_fraction_sphere_aligned(int dim, std::span<const int> fixed_idx,
                                    std::span<const double> fixed_val,
                                    const Sphere& s, const BoxDomain& domain);

// Indicator adapters plugging the shapes into the estimator.
class SphereIndicator : public FlatIntegrable {
 public:
  explicit SphereIndicator(Sphere s) : sphere_(std::move(s)) {}
  double value(std::span<const double> x) const override;
  std::optional<double> flat_integral(const Flat& flat,
                                      const BoxDomain& domain) const override;

 private:
  Sphere sphere_;
};

class EllipsoidIndicator : public FlatIntegrable {
 public:
  explicit EllipsoidIndicator(Ellipsoid e) : ellipsoid_(std::move(e)) {}
  double value(std::span<const double> x) const override;
  std::optional<double> flat_integral(const Flat& flat,
                                      const BoxDomain& domain) const override;
  const Ellipsoid& shape() const { return ellipsoid_; }

 private:
  Ellipsoid ellipsoid_;
};

}  // namespace kdarts
