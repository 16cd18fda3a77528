#include "bfinito/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bfinito {

Component squared_loss_component(const Vec& a, double b) {
  if (a.size() < 1 || a.isZero(0.0))
    throw std::invalid_argument("squared_loss_component: a must be nonzero");
  if (b < 0.0) throw std::invalid_argument("squared_loss_component: b must be nonnegative");
  double a_sq = a.squaredNorm();
  Component c;
  c.value = [a, b](const Vec& x) {
    double r = a.dot(x);
    double d = r * r - b;
    return 0.25 * d * d;
  };
  c.gradient = [a, b](const Vec& x) -> Vec {
    double r = a.dot(x);
    return ((r * r - b) * r) * a;
  };
  c.smoothness_constant = 3.0 * a_sq * a_sq + a_sq * std::abs(b);
  c.kernel = make_quartic_kernel(static_cast<int>(a.size()));
  return c;
}

Component poisson_component(const Vec& a, double b) {
  if (a.size() < 1 || a.isZero(0.0))
    throw std::invalid_argument("poisson_component: a must be nonzero");
  if ((a.array() < 0.0).any())
    throw std::invalid_argument("poisson_component: a must be elementwise nonnegative");
  if (b < 0.0) throw std::invalid_argument("poisson_component: b must be nonnegative");
  Component c;
  c.value = [a, b](const Vec& x) {
    double r = a.dot(x);
    double r_sq = r * r;
    if (r_sq <= 0.0) return std::numeric_limits<double>::infinity();
    return (b > 0.0 ? -b * std::log(r_sq) : 0.0) + r_sq;
  };
  c.gradient = [a, b](const Vec& x) -> Vec {
    double r = a.dot(x);
    return (2.0 * r - 2.0 * b / r) * a;
  };
  c.smoothness_constant = 1.0;
  c.kernel = make_poisson_kernel(a, b);
  return c;
}

Component quadratic_component(const Vec& center, double weight) {
  Component c;
  c.value = [center, weight](const Vec& x) { return weight * 0.5 * (x - center).squaredNorm(); };
  c.gradient = [center, weight](const Vec& x) -> Vec { return weight * (x - center); };
  c.smoothness_constant = std::max(std::abs(weight), 1e-12);
  c.kernel = make_euclidean_kernel(static_cast<int>(center.size()));
  return c;
}

Regularizer Regularizer::l1(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("Regularizer::l1: lambda must be nonnegative");
  Regularizer r;
  r.kind = Kind::l1;
  r.lambda = lambda;
  return r;
}

Regularizer Regularizer::l0ball(int kappa) {
  if (kappa < 1) throw std::invalid_argument("Regularizer::l0ball: kappa must be positive");
  Regularizer r;
  r.kind = Kind::l0ball;
  r.kappa = kappa;
  return r;
}

double Regularizer::value(const Vec& x) const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::l1:
      return lambda * x.lpNorm<1>();
    case Kind::l0ball: {
      int nnz = 0;
      for (int j = 0; j < x.size(); ++j) nnz += x[j] != 0.0;
      return nnz <= kappa ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return 0.0;
}

double cardano_positive_root(double p, double q) {
  if (!(p > 0.0)) throw std::invalid_argument("cardano_positive_root: p must be positive");
  if (q > 0.0) throw std::invalid_argument("cardano_positive_root: q must be nonpositive");
  double c = std::sqrt(0.25 * q * q + p * p * p / 27.0);
  double t = std::cbrt(c - 0.5 * q) - std::cbrt(c + 0.5 * q);
  // The radical difference cancels when p^3/27 << q^2/4; Newton restores full
  // precision in a few guarded steps (f' = 3t^2 + p > 0).
  for (int it = 0; it < 8; ++it) {
    double f = (t * t + p) * t + q;
    double fp = 3.0 * t * t + p;
    double step = f / fp;
    double next = t - step;
    if (next < 0.0) next = 0.0;
    if (next == t) break;
    t = next;
  }
  return t;
}

Vec soft_threshold(const Vec& v, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be nonnegative");
  Vec out(v.size());
  for (int j = 0; j < v.size(); ++j) {
    double m = std::abs(v[j]) - tau;
    out[j] = m > 0.0 ? (v[j] > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

Vec project_l0_ball(const Vec& v, int kappa) {
  int n = static_cast<int>(v.size());
  if (kappa < 1 || kappa > n) throw std::invalid_argument("project_l0_ball: kappa out of range");
  if (kappa == n) return v;
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  // Larger magnitude first; ties keep the lowest index.
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return std::abs(v[i]) > std::abs(v[j]); });
  Vec out = Vec::Zero(n);
  for (int r = 0; r < kappa; ++r) out[idx[static_cast<std::size_t>(r)]] = v[idx[static_cast<std::size_t>(r)]];
  return out;
}

namespace {

double gamma_bar_of(const Vec& gammas) {
  if (gammas.size() < 1) throw std::invalid_argument("t_solve: empty stepsize list");
  if ((gammas.array() <= 0.0).any())
    throw std::invalid_argument("t_solve: stepsizes must be positive");
  return 1.0 / gammas.cwiseInverse().sum();
}

}  // namespace

Vec t_solve_quartic_l1(const Vec& s, double lambda, const Vec& gammas) {
  if (lambda < 0.0) throw std::invalid_argument("t_solve_quartic_l1: lambda must be nonnegative");
  double gbar = gamma_bar_of(gammas);
  Vec y = soft_threshold(gbar * s, gbar * lambda);
  double y_sq = y.squaredNorm();
  if (y_sq == 0.0) return Vec::Zero(s.size());
  double t = cardano_positive_root(1.0 / y_sq, -1.0 / y_sq);
  return t * y;
}

Vec t_solve_quartic_l0(const Vec& s, int kappa, const Vec& gammas) {
  double gbar = gamma_bar_of(gammas);
  Vec y = project_l0_ball(gbar * s, kappa);
  double y_norm = y.norm();
  if (y_norm == 0.0) return Vec::Zero(s.size());
  // Positive root of t^3 + t - |y| = 0; the positive ray satisfies the
  // first-order condition (|w|^2 + 1) w = gbar s on the kept support.
  double t = cardano_positive_root(1.0, -y_norm);
  return (t / y_norm) * y;
}

Vec t_solve_poisson_l1_coeffs(const Vec& s, double lambda, double c_a, double c_b) {
  if (!(c_a > 0.0)) throw std::invalid_argument("t_solve_poisson_l1: c_a must be positive");
  if (c_b < 0.0) throw std::invalid_argument("t_solve_poisson_l1: c_b must be nonnegative");
  Vec w(s.size());
  for (int j = 0; j < s.size(); ++j) {
    double r = s[j] - lambda;
    if (c_b == 0.0 && r <= 0.0)
      throw std::domain_error("t_solve_poisson_l1: boundary solution (c_b = 0 with s_j <= lambda)");
    w[j] = (r + std::sqrt(r * r + c_a * c_b)) / c_a;
  }
  return w;
}

Vec t_solve_poisson_l1(const Vec& s, double lambda,
                       const std::vector<Component>& components, const Vec& gammas) {
  if (lambda < 0.0) throw std::invalid_argument("t_solve_poisson_l1: lambda must be nonnegative");
  if (components.empty() || static_cast<int>(components.size()) != gammas.size())
    throw std::invalid_argument("t_solve_poisson_l1: components/stepsizes mismatch");
  double c_a = 0.0;
  double c_b = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const Kernel& k = components[i].kernel;
    if (k.family != Kernel::Family::poisson)
      throw std::invalid_argument("t_solve_poisson_l1: non-poisson kernel");
    c_a += 4.0 * k.a_sq / gammas[static_cast<int>(i)];
    c_b += 4.0 * k.b / gammas[static_cast<int>(i)];
  }
  return t_solve_poisson_l1_coeffs(s, lambda, c_a, c_b);
}

Vec t_solve_euclidean(const Vec& s, const Regularizer& reg, const Vec& gammas) {
  double gbar = gamma_bar_of(gammas);
  Vec y = gbar * s;
  switch (reg.kind) {
    case Regularizer::Kind::none:
      return y;
    case Regularizer::Kind::l1:
      return soft_threshold(y, gbar * reg.lambda);
    case Regularizer::Kind::l0ball:
      return project_l0_ball(y, reg.kappa);
  }
  return y;
}

double relative_smoothness_margin(const Component& c, const Vec& x, const Vec& y) {
  double lin = c.value(y) - c.value(x) - c.gradient(x).dot(y - x);
  return c.smoothness_constant * bregman(c.kernel, y, x) - std::abs(lin);
}

Vec Problem::t_solve(const Vec& s) const {
  if (s.size() != dimension) throw std::invalid_argument("t_solve: dimension mismatch");
  switch (components.front().kernel.family) {
    case Kernel::Family::euclidean:
      return t_solve_euclidean(s, regularizer, gammas);
    case Kernel::Family::quartic:
      if (regularizer.kind == Regularizer::Kind::l0ball)
        return t_solve_quartic_l0(s, regularizer.kappa, gammas);
      return t_solve_quartic_l1(
          s, regularizer.kind == Regularizer::Kind::l1 ? regularizer.lambda : 0.0, gammas);
    case Kernel::Family::poisson:
      return t_solve_poisson_l1(
          s, regularizer.kind == Regularizer::Kind::l1 ? regularizer.lambda : 0.0, components,
          gammas);
  }
  throw std::logic_error("t_solve: unreachable");
}

Problem make_problem(std::vector<Component> components, Regularizer reg, Vec gammas) {
  if (components.empty()) throw std::invalid_argument("make_problem: no components");
  int N = static_cast<int>(components.size());
  int n = components.front().kernel.dimension;
  Kernel::Family family = components.front().kernel.family;
  for (const Component& c : components) {
    if (c.kernel.dimension != n) throw std::invalid_argument("make_problem: dimension mismatch");
    if (c.kernel.family != family)
      throw std::invalid_argument("make_problem: mixed kernel families are not solvable in closed form");
  }
  if (family == Kernel::Family::poisson && reg.kind == Regularizer::Kind::l0ball)
    throw std::invalid_argument("make_problem: no closed-form T for poisson kernels with an l0 ball");
  if (reg.kind == Regularizer::Kind::l1 && reg.lambda < 0.0)
    throw std::invalid_argument("make_problem: lambda must be nonnegative");
  if (reg.kind == Regularizer::Kind::l0ball && (reg.kappa < 1 || reg.kappa > n))
    throw std::invalid_argument("make_problem: kappa out of range");
  if (gammas.size() != N) throw std::invalid_argument("make_problem: stepsize count mismatch");

  Problem p;
  p.regularizer = reg;
  p.gammas = std::move(gammas);
  p.dimension = n;
  p.derived.reserve(components.size());
  for (int i = 0; i < N; ++i)
    p.derived.push_back(make_derived_kernel(components[static_cast<std::size_t>(i)].kernel,
                                            components[static_cast<std::size_t>(i)], p.gammas[i], N));
  p.components = std::move(components);
  return p;
}

Problem make_problem(std::vector<Component> components, Regularizer reg, double gamma_scale) {
  if (!(gamma_scale > 0.0) || !(gamma_scale < 1.0))
    throw std::invalid_argument("make_problem: gamma_scale must lie in (0,1)");
  int N = static_cast<int>(components.size());
  Vec gammas(N);
  for (int i = 0; i < N; ++i)
    gammas[i] = gamma_scale * N / components[static_cast<std::size_t>(i)].smoothness_constant;
  return make_problem(std::move(components), reg, std::move(gammas));
}

}  // namespace bfinito
