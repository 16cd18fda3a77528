#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <stdexcept>

namespace bfinito {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Strict-positivity floor for log-domain kernels: interior membership requires
// every coordinate > eps_dom so diagnostics never evaluate log at the boundary.
inline constexpr double kEpsDom = 1e-12;

// Legendre distance-generating function: value finite exactly on the domain,
// gradient defined exactly on the interior.
struct Kernel {
  enum class Family { euclidean, quartic, poisson };

  Family family = Family::euclidean;
  int dimension = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<bool(const Vec&)> in_domain;
  std::function<bool(const Vec&)> in_interior;
  // Poisson-family moments (|a|^2 and b); zero for the other families.
  double a_sq = 0.0;
  double b = 0.0;
};

// h(x) = 1/2 |x|^2, full domain.
Kernel make_euclidean_kernel(int n);

// h(x) = 1/4 |x|^4 + 1/2 |x|^2, full domain; gradient (|x|^2 + 1) x.
Kernel make_quartic_kernel(int n);

// h(x) = |a|^2 |x|^2 - 2 b sum_j log x_j; domain = positive orthant when
// b > 0 (degenerates to scaled Euclidean when b = 0); gradient coordinates
// 2 |a|^2 x_j - 2 b / x_j.
Kernel make_poisson_kernel(const Vec& a, double b);

// Same kernel constructed from the moments directly (used for the mirror
// descent aggregate).
Kernel make_poisson_kernel_from_moments(double a_sq, double b, int n);

// D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>; +inf when x is outside the
// domain; y must be interior.
double bregman(const Kernel& k, const Vec& x, const Vec& y);

struct Component;  // model.hpp

// Derived kernel h_hat_i = h_i / gamma_i - f_i / N; Legendre with the same
// domain as the base whenever gamma_i in (0, N / L_{f_i}).
struct DerivedKernel {
  Kernel base;
  std::function<double(const Vec&)> component_value;
  std::function<Vec(const Vec&)> component_gradient;
  double gamma = 0.0;
  int n_components = 0;

  double value(const Vec& x) const {
    return base.value(x) / gamma - component_value(x) / n_components;
  }
  Vec gradient(const Vec& x) const {
    return base.gradient(x) / gamma - component_gradient(x) / n_components;
  }
};

// gamma must lie in the open interval (0, N / L_f) of the component.
DerivedKernel make_derived_kernel(const Kernel& base, const Component& component,
                                  double gamma, int n_components);

double bregman(const DerivedKernel& k, const Vec& x, const Vec& y);

}  // namespace bfinito
