#include "bfinito/solver_md.hpp"

#include <chrono>
#include <cmath>

#include "bfinito/rng.hpp"

namespace bfinito {

Kernel make_aggregate_kernel(const Problem& problem) {
  const Kernel& first = problem.components.front().kernel;
  switch (first.family) {
    case Kernel::Family::euclidean:
      return make_euclidean_kernel(problem.dimension);
    case Kernel::Family::quartic:
      return make_quartic_kernel(problem.dimension);
    case Kernel::Family::poisson: {
      double a_sq = 0.0;
      double b = 0.0;
      for (const Component& c : problem.components) {
        a_sq += c.kernel.a_sq;
        b += c.kernel.b;
      }
      int N = problem.size();
      return make_poisson_kernel_from_moments(a_sq / N, b / N, problem.dimension);
    }
  }
  throw std::logic_error("make_aggregate_kernel: unreachable");
}

MDConfig make_md_config(const Problem& problem, bool stochastic, double alpha,
                        std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("make_md_config: alpha must be positive");
  MDConfig cfg;
  cfg.stochastic = stochastic;
  cfg.alpha = alpha;
  cfg.seed = seed;
  double acc = 0.0;
  for (const Component& c : problem.components) acc += c.smoothness_constant;
  cfg.aggregate_smoothness = acc / problem.size();
  cfg.aggregate_kernel = make_aggregate_kernel(problem);
  return cfg;
}

Vec md_step(const Vec& x, const MDConfig& config, const Problem& problem,
            std::int64_t k, int sampled_index) {
  if (k < 1) throw std::invalid_argument("md_step: iteration index must be >= 1");
  if (!config.aggregate_kernel.in_interior(x))
    throw std::domain_error("md_step: x must be interior");
  double L = config.aggregate_smoothness;
  double gamma_k = config.stochastic ? config.alpha / (L * static_cast<double>(k)) : 1.0 / L;

  Vec g;
  if (sampled_index < 0) {
    g = Vec::Zero(problem.dimension);
    for (const Component& c : problem.components) g += c.gradient(x);
    g /= problem.size();
  } else {
    if (sampled_index >= problem.size())
      throw std::invalid_argument("md_step: sampled index out of range");
    g = problem.components[static_cast<std::size_t>(sampled_index)].gradient(x);
  }

  // argmin_w g(w) + <g_k, w> + (1/gamma_k) D_h(w, x) rearranges to the shared
  // subproblem with the single kernel h and s = grad h(x)/gamma_k - g_k.
  Vec s = config.aggregate_kernel.gradient(x) / gamma_k - g;
  Vec gamma(1);
  gamma[0] = gamma_k;
  const Regularizer& reg = problem.regularizer;
  Vec w;
  switch (config.aggregate_kernel.family) {
    case Kernel::Family::euclidean:
      w = t_solve_euclidean(s, reg, gamma);
      break;
    case Kernel::Family::quartic:
      if (reg.kind == Regularizer::Kind::l0ball)
        w = t_solve_quartic_l0(s, reg.kappa, gamma);
      else
        w = t_solve_quartic_l1(s, reg.kind == Regularizer::Kind::l1 ? reg.lambda : 0.0, gamma);
      break;
    case Kernel::Family::poisson: {
      double c_a = 4.0 * config.aggregate_kernel.a_sq / gamma_k;
      double c_b = 4.0 * config.aggregate_kernel.b / gamma_k;
      w = t_solve_poisson_l1_coeffs(s, reg.kind == Regularizer::Kind::l1 ? reg.lambda : 0.0,
                                    c_a, c_b);
      break;
    }
  }
  if (!config.aggregate_kernel.in_interior(w))
    throw std::domain_error("md_step: subproblem left the domain");
  return w;
}

RunResult md_run(const Problem& problem, const MDConfig& config, const Vec& x_init,
                 const RunOptions& options, const TraceSink& sink) {
  if (x_init.size() != problem.dimension)
    throw std::invalid_argument("md_run: dimension mismatch");
  if (!config.aggregate_kernel.in_interior(x_init))
    throw std::domain_error("md_run: x_init must be interior");
  Rng rng(config.seed);
  Vec x = x_init;
  std::int64_t k = 0;
  double epochs = 0.0;
  double per_step = config.stochastic ? 1.0 / problem.size() : 1.0;

  RunResult res;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (options.stop.max_epochs <= 0.0) {
    res.z = x;
    res.final_cost = cost(problem, x);
    if (options.with_residual) res.final_residual = op_residual(problem, x);
    return res;
  }

  double emit_due = 0.0;
  bool stopped = false;
  while (true) {
    if (options.iterate_observer) options.iterate_observer(x);
    bool budget_done = epochs >= options.stop.max_epochs;
    if (epochs >= emit_due || budget_done) {
      TraceRecord rec;
      rec.iter = k;
      rec.epochs = epochs;
      rec.cost = cost(problem, x);
      if (options.with_residual) rec.residual = op_residual(problem, x);
      rec.wall_seconds = elapsed();
      if (sink) sink(rec);
      res.trace.push_back(rec);
      emit_due = std::floor(epochs) + 1.0;
      if (options.stop.residual_tol > 0.0 && rec.residual &&
          *rec.residual <= options.stop.residual_tol)
        stopped = true;
    }
    if (budget_done || stopped) break;
    int idx = config.stochastic ? rng.bounded(problem.size()) : -1;
    x = md_step(x, config, problem, k + 1, idx);
    ++k;
    epochs += per_step;
  }

  res.z = x;
  res.epochs = epochs;
  res.iterations = k;
  res.grad_evals = config.stochastic ? k : k * problem.size();
  res.final_cost = res.trace.back().cost;
  if (res.trace.back().residual)
    res.final_residual = *res.trace.back().residual;
  else if (options.with_residual)
    res.final_residual = op_residual(problem, res.z);
  return res;
}

}  // namespace bfinito
