#pragma once

#include <memory>

#include "bfinito/solver_bfinito.hpp"

namespace bfinito {

// O(n) state: no N x n table. selectable marks K^k, the indices not yet
// sampled since the last full update; K^0 = empty forces a first full update.
struct LowMemState {
  Vec s_tilde;                          // n
  Vec z_anchor;                         // z_tilde, the last full-update point
  Vec z;                                // T(s_tilde) cached per iteration
  std::vector<std::uint8_t> selectable; // K^k membership flags
  int remaining = 0;                    // |K^k|
  bool has_point = false;
  std::int64_t k = 0;
  double epoch_equivalents = 0.0;
  std::int64_t grad_evals = 0;
};

// Picks a nonempty incremental batch I subset of K from the current state.
using LowMemSelector = std::function<std::vector<int>(const LowMemState&)>;

// Deterministic ascending order over K (the experiments' inner loop).
LowMemSelector cyclic_inner(int batch = 1);

// Uniformly random elements of K without replacement; stateful, so construct
// a fresh selector per run for reproducibility.
LowMemSelector shuffled_inner(int batch, std::uint64_t seed);

LowMemState lowmem_init(const Problem& problem, const Vec& x_init);

const Vec& lowmem_point(LowMemState& state, const Problem& problem);

// One iteration at the cached point: full branch when K is empty (z_anchor <-
// z, K <- [N], s_tilde recomputed from scratch as sum_i grad h_hat_i(z));
// otherwise the incremental correction over I = selector(state), K <- K \ I.
// Incremental indices cost two component-gradient evaluations each.
void lowmem_apply(LowMemState& state, const Problem& problem,
                  const LowMemSelector& selector);

void lowmem_step(LowMemState& state, const Problem& problem,
                 const LowMemSelector& selector);

// Replays the K-set evolution to produce the induced index schedule that makes
// the table solver reproduce this variant exactly (one entry per iteration;
// full updates appear as the full index set).
std::vector<std::vector<int>> lowmem_induced_schedule(int n_components,
                                                      std::int64_t iterations,
                                                      const LowMemSelector& selector);

// Runs like bfinito_run but returns z_tilde and traces cost/residual at
// z_tilde; the Lyapunov (optional) uses a sidecar anchor table owned by the
// runner, keeping the solver state O(n).
RunResult lowmem_run(const Problem& problem, const LowMemSelector& selector,
                     const Vec& x_init, const RunOptions& options = {},
                     const TraceSink& sink = {});

}  // namespace bfinito
