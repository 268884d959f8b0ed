#include "kdarts/domain.hpp"

#include <stdexcept>
#include <utility>

namespace kdarts {

BoxDomain::BoxDomain(std::vector<double> lo_in, std::vector<double> hi_in)
    : dim(static_cast<int>(lo_in.size())),
      lo(std::move(lo_in)),
      hi(std::move(hi_in)) {
  if (dim < 1) throw std::invalid_argument("BoxDomain: dimension must be >= 1");
  if (lo.size() != hi.size())
    throw std::invalid_argument("BoxDomain: lo/hi size mismatch");
  for (int i = 0; i < dim; ++i) {
    if (!(lo[static_cast<std::size_t>(i)] < hi[static_cast<std::size_t>(i)]))
      throw std::invalid_argument("BoxDomain: lo < hi violated");
  }
}

BoxDomain BoxDomain::unit(int d) {
  if (d < 1) throw std::invalid_argument("BoxDomain: dimension must be >= 1");
  return BoxDomain(std::vector<double>(static_cast<std::size_t>(d), 0.0),
                   std::vector<double>(static_cast<std::size_t>(d), 1.0));
}

BoxDomain BoxDomain::two_cube(int d) {
  if (d < 1) throw std::invalid_argument("BoxDomain: dimension must be >= 1");
  return BoxDomain(std::vector<double>(static_cast<std::size_t>(d), -1.0),
                   std::vector<double>(static_cast<std::size_t>(d), 1.0));
}

double BoxDomain::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= extent(i);
  return v;
}

bool BoxDomain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim) return false;
  for (int i = 0; i < dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (x[u] < lo[u] || x[u] > hi[u]) return false;
  }
  return true;
}

}  // namespace kdarts
