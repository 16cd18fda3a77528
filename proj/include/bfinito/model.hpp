#pragma once

#include <string>
#include <vector>

#include "bfinito/kernel.hpp"

namespace bfinito {

// One summand f_i of the finite sum, paired with its reference kernel h_i and
// the constant L_{f_i} certifying L-smoothness of f_i relative to h_i.
struct Component {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  double smoothness_constant = 0.0;
  Kernel kernel;
};

// f(x) = 1/4 (<a,x>^2 - b)^2 with the quartic kernel; L = 3|a|^4 + |a|^2 |b|.
Component squared_loss_component(const Vec& a, double b);

// f(x) = -b log(<a,x>^2) + <a,x>^2 on the positive orthant, a >= 0, with the
// matching Poisson kernel; L = 1.
Component poisson_component(const Vec& a, double b);

// f(x) = weight * 1/2 |x - c|^2 with the Euclidean kernel; L = |weight| (tiny
// positive floor when weight = 0). Negative weight gives a concave component.
Component quadratic_component(const Vec& c, double weight);

struct Regularizer {
  enum class Kind { none, l1, l0ball };

  Kind kind = Kind::none;
  double lambda = 0.0;  // l1 weight
  int kappa = 0;        // l0 ball sparsity budget

  static Regularizer none() { return {}; }
  static Regularizer l1(double lambda);
  static Regularizer l0ball(int kappa);

  // Extended-real value: lambda |x|_1, or the {0, +inf} indicator of the
  // kappa-sparse ball, or 0.
  double value(const Vec& x) const;
};

// Unique root t* >= 0 of t^3 + p t + q = 0 for p > 0, q <= 0, by Cardano's
// formula plus a guarded Newton polish (the radical cancels badly when
// p^3/27 << q^2/4). Residual <= 1e-10 * max(1, |q|).
double cardano_positive_root(double p, double q);

// Componentwise sign(v_j) * max(|v_j| - tau, 0).
Vec soft_threshold(const Vec& v, double tau);

// Keeps the kappa largest-magnitude entries, zeroes the rest; ties keep the
// lowest index.
Vec project_l0_ball(const Vec& v, int kappa);

// Closed-form minimizers of g(w) + sum_i h_i(w)/gamma_i - <s, w> for the
// shipped kernel/regularizer pairs. gbar = (sum_i 1/gamma_i)^{-1} throughout.

// Quartic kernels, g = lambda |.|_1: y = soft_threshold(gbar s, gbar lambda),
// then t* y with |y|^2 t^3 + t - 1 = 0.
Vec t_solve_quartic_l1(const Vec& s, double lambda, const Vec& gammas);

// Quartic kernels, g = indicator of the kappa-sparse ball: y =
// project_l0_ball(gbar s, kappa), then (t*/|y|) y with t^3 + t - |y| = 0.
Vec t_solve_quartic_l0(const Vec& s, int kappa, const Vec& gammas);

// Poisson kernels, g = lambda |.|_1 on the positive orthant: coordinatewise
// w_j = (s_j - lambda + sqrt((s_j - lambda)^2 + c_a c_b)) / c_a with
// c_a = sum_i 4 |a_i|^2 / gamma_i and c_b = sum_i 4 b_i / gamma_i.
Vec t_solve_poisson_l1(const Vec& s, double lambda,
                       const std::vector<Component>& components, const Vec& gammas);

// Same map from precomputed coefficients (mirror descent uses a single kernel).
Vec t_solve_poisson_l1_coeffs(const Vec& s, double lambda, double c_a, double c_b);

// Euclidean kernels: prox_{gbar g}(gbar s).
Vec t_solve_euclidean(const Vec& s, const Regularizer& reg, const Vec& gammas);

// L_f * D_h(y, x) - |f(y) - f(x) - <grad f(x), y - x>|; nonnegative when the
// relative-smoothness certificate holds.
double relative_smoothness_margin(const Component& c, const Vec& x, const Vec& y);

// Finite-sum problem: N components, regularizer g, stepsizes gamma_i in
// (0, N / L_{f_i}), the derived kernels h_hat_i, and the closed-form T.
struct Problem {
  std::vector<Component> components;
  Regularizer regularizer;
  Vec gammas;
  int dimension = 0;
  std::vector<DerivedKernel> derived;

  int size() const { return static_cast<int>(components.size()); }
  double gamma_bar() const { return 1.0 / gammas.cwiseInverse().sum(); }

  // T(s) = argmin_w { g(w) + sum_i h_i(w)/gamma_i - <s, w> }; the output is
  // strictly interior to the common kernel domain.
  Vec t_solve(const Vec& s) const;
};

// Validates dimensions, kernel-family homogeneity, the regularizer pairing and
// every stepsize, then precomputes the derived kernels.
Problem make_problem(std::vector<Component> components, Regularizer reg, Vec gammas);

// Same with the default stepsizes gamma_i = gamma_scale * N / L_{f_i}.
Problem make_problem(std::vector<Component> components, Regularizer reg,
                     double gamma_scale = 0.99);

}  // namespace bfinito
