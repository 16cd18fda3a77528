#include "bfinito/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace bfinito {

double cost(const Problem& problem, const Vec& z) {
  double g = problem.regularizer.value(z);
  if (std::isinf(g)) return g;
  double acc = 0.0;
  for (const Component& c : problem.components) {
    double v = c.value(z);
    if (std::isinf(v) || std::isnan(v)) return std::numeric_limits<double>::infinity();
    acc += v;
  }
  return acc / problem.size() + g;
}

double lyapunov(const Problem& problem, const Vec& z, const Mat& anchors) {
  if (anchors.rows() != problem.size() || anchors.cols() != problem.dimension)
    throw std::invalid_argument("lyapunov: anchor table shape mismatch");
  double acc = cost(problem, z);
  for (int i = 0; i < problem.size(); ++i)
    acc += bregman(problem.derived[static_cast<std::size_t>(i)], z, anchors.row(i).transpose());
  return acc;
}

double op_residual(const Problem& problem, const Vec& z) {
  Vec s = Vec::Zero(problem.dimension);
  for (const DerivedKernel& d : problem.derived) {
    if (!d.base.in_interior(z)) throw std::domain_error("op_residual: z must be interior");
    s += d.gradient(z);
  }
  return (z - problem.t_solve(s)).norm();
}

double strconvex_rate_bound(double mu_phi, const Vec& gammas, const Vec& kernel_lipschitz,
                            const Vec& weak_convexity, const Vec& probabilities) {
  int N = static_cast<int>(gammas.size());
  if (N < 1 || kernel_lipschitz.size() != N || weak_convexity.size() != N ||
      probabilities.size() != N)
    throw std::invalid_argument("strconvex_rate_bound: size mismatch");
  if (!(mu_phi > 0.0)) throw std::invalid_argument("strconvex_rate_bound: mu_phi must be positive");
  if ((gammas.array() <= 0.0).any() || (kernel_lipschitz.array() <= 0.0).any())
    throw std::invalid_argument("strconvex_rate_bound: gammas and kernel constants must be positive");
  if ((probabilities.array() < 0.0).any() || !(probabilities.minCoeff() >= 0.0))
    throw std::invalid_argument("strconvex_rate_bound: probabilities must be nonnegative");
  double denom = 1.0;
  for (int i = 0; i < N; ++i)
    denom += (kernel_lipschitz[i] / gammas[i] - weak_convexity[i] / N) / mu_phi;
  if (!(denom > 0.0))
    throw std::invalid_argument("strconvex_rate_bound: degenerate denominator");
  return probabilities.minCoeff() / denom;
}

bool descent_check(const Trace& trace, double slack) {
  const double* prev = nullptr;
  for (const TraceRecord& r : trace) {
    if (!r.lyapunov.has_value()) continue;
    if (prev && *r.lyapunov > *prev + slack * std::max(1.0, std::abs(*prev))) return false;
    prev = &*r.lyapunov;
  }
  return true;
}

}  // namespace bfinito
