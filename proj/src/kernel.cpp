#include "bfinito/kernel.hpp"

#include <cmath>

#include "bfinito/model.hpp"

namespace bfinito {

namespace {

bool all_positive(const Vec& x, double floor) {
  for (int j = 0; j < x.size(); ++j) {
    if (!(x[j] > floor)) return false;
  }
  return true;
}

}  // namespace

Kernel make_euclidean_kernel(int n) {
  if (n < 1) throw std::invalid_argument("make_euclidean_kernel: dimension must be >= 1");
  Kernel k;
  k.family = Kernel::Family::euclidean;
  k.dimension = n;
  k.value = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  k.gradient = [](const Vec& x) { return x; };
  k.in_domain = [](const Vec&) { return true; };
  k.in_interior = [](const Vec&) { return true; };
  return k;
}

Kernel make_quartic_kernel(int n) {
  if (n < 1) throw std::invalid_argument("make_quartic_kernel: dimension must be >= 1");
  Kernel k;
  k.family = Kernel::Family::quartic;
  k.dimension = n;
  k.value = [](const Vec& x) {
    double q = x.squaredNorm();
    return 0.25 * q * q + 0.5 * q;
  };
  k.gradient = [](const Vec& x) -> Vec { return (x.squaredNorm() + 1.0) * x; };
  k.in_domain = [](const Vec&) { return true; };
  k.in_interior = [](const Vec&) { return true; };
  return k;
}

Kernel make_poisson_kernel_from_moments(double a_sq, double b, int n) {
  if (n < 1) throw std::invalid_argument("make_poisson_kernel: dimension must be >= 1");
  if (!(a_sq > 0.0)) throw std::invalid_argument("make_poisson_kernel: a must be nonzero");
  if (b < 0.0) throw std::invalid_argument("make_poisson_kernel: b must be nonnegative");
  Kernel k;
  k.family = Kernel::Family::poisson;
  k.dimension = n;
  k.a_sq = a_sq;
  k.b = b;
  if (b == 0.0) {
    // Degenerates to a scaled Euclidean kernel with full domain.
    k.value = [a_sq](const Vec& x) { return a_sq * x.squaredNorm(); };
    k.gradient = [a_sq](const Vec& x) -> Vec { return 2.0 * a_sq * x; };
    k.in_domain = [](const Vec&) { return true; };
    k.in_interior = [](const Vec&) { return true; };
    return k;
  }
  k.value = [a_sq, b](const Vec& x) {
    if (!all_positive(x, 0.0)) return std::numeric_limits<double>::infinity();
    return a_sq * x.squaredNorm() - 2.0 * b * x.array().log().sum();
  };
  k.gradient = [a_sq, b](const Vec& x) -> Vec {
    return 2.0 * a_sq * x - 2.0 * b * x.cwiseInverse();
  };
  k.in_domain = [](const Vec& x) { return all_positive(x, 0.0); };
  k.in_interior = [](const Vec& x) { return all_positive(x, kEpsDom); };
  return k;
}

Kernel make_poisson_kernel(const Vec& a, double b) {
  if (a.size() < 1) throw std::invalid_argument("make_poisson_kernel: dimension must be >= 1");
  if ((a.array() < 0.0).any())
    throw std::invalid_argument("make_poisson_kernel: a must be elementwise nonnegative");
  double a_sq = a.squaredNorm();
  return make_poisson_kernel_from_moments(a_sq, b, static_cast<int>(a.size()));
}

double bregman(const Kernel& k, const Vec& x, const Vec& y) {
  if (x.size() != k.dimension || y.size() != k.dimension)
    throw std::invalid_argument("bregman: dimension mismatch");
  if (!k.in_interior(y)) throw std::domain_error("bregman: y must be interior");
  if (!k.in_domain(x)) return std::numeric_limits<double>::infinity();
  return k.value(x) - k.value(y) - k.gradient(y).dot(x - y);
}

double bregman(const DerivedKernel& k, const Vec& x, const Vec& y) {
  if (!k.base.in_interior(y)) throw std::domain_error("bregman: y must be interior");
  if (!k.base.in_domain(x)) return std::numeric_limits<double>::infinity();
  return k.value(x) - k.value(y) - k.gradient(y).dot(x - y);
}

DerivedKernel make_derived_kernel(const Kernel& base, const Component& component,
                                  double gamma, int n_components) {
  if (n_components < 1)
    throw std::invalid_argument("make_derived_kernel: n_components must be >= 1");
  double limit = n_components / component.smoothness_constant;
  if (!(gamma > 0.0) || !(gamma < limit))
    throw std::invalid_argument("make_derived_kernel: stepsize outside (0, N/L_f)");
  DerivedKernel d;
  d.base = base;
  d.component_value = component.value;
  d.component_gradient = component.gradient;
  d.gamma = gamma;
  d.n_components = n_components;
  return d;
}

}  // namespace bfinito
