#pragma once

#include "bfinito/solver_bfinito.hpp"

namespace bfinito {

// Mirror-descent baselines: full MD with stepsize 1/L_f and stochastic MD with
// the square-summable schedule gamma_k = alpha / (L_f k), k >= 1, both against
// the aggregate kernel h = (1/N) sum_i h_i.
struct MDConfig {
  bool stochastic = false;
  double alpha = 1.0;
  double aggregate_smoothness = 0.0;  // L_f = (1/N) sum_i L_{f_i}
  Kernel aggregate_kernel;
  std::uint64_t seed = 0;
};

MDConfig make_md_config(const Problem& problem, bool stochastic, double alpha = 1.0,
                        std::uint64_t seed = 0);

// Aggregate kernel of the problem's component family: quartic stays quartic,
// Euclidean stays Euclidean, Poisson averages the moments.
Kernel make_aggregate_kernel(const Problem& problem);

// One mirror step from x with iteration index k >= 1:
// argmin_w { g(w) + <g_k, w> + (1/gamma_k) D_h(w, x) }, with g_k the full
// gradient (sampled_index < 0) or grad f_i(x). Solved by the closed-form T
// machinery specialized to the single aggregate kernel.
Vec md_step(const Vec& x, const MDConfig& config, const Problem& problem,
            std::int64_t k, int sampled_index = -1);

RunResult md_run(const Problem& problem, const MDConfig& config, const Vec& x_init,
                 const RunOptions& options = {}, const TraceSink& sink = {});

}  // namespace bfinito
