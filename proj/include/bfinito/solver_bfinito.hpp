#pragma once

#include "bfinito/diagnostics.hpp"
#include "bfinito/model.hpp"
#include "bfinito/sampler.hpp"

namespace bfinito {

// Table-based incremental solver state. Row i of the table holds
// s_i = grad h_i(x_i)/gamma_i - grad f_i(x_i)/N for the anchor x_i (the point
// at which s_i was last refreshed); s_tilde is maintained as sum_i s_i.
struct BFinitoState {
  Mat table;      // N x n
  Vec s_tilde;    // n
  Vec z;          // T(s_tilde) cached by the latest point computation
  Mat anchors;    // N x n (diagnostics mode only)
  bool track_anchors = true;
  bool has_point = false;
  std::int64_t k = 0;
  double epoch_equivalents = 0.0;
  std::int64_t grad_evals = 0;  // component-gradient evaluations
};

// Builds the table at x_init; anchors optional to preserve the O(nN) table as
// the only large allocation in production mode.
BFinitoState bfinito_init(const Problem& problem, const Vec& x_init,
                          bool track_anchors = true);

// z^k = T(s_tilde^k), cached in the state; errors if the subproblem output is
// not strictly interior to every kernel domain.
const Vec& bfinito_point(BFinitoState& state, const Problem& problem);

// Refreshes rows index_set at the cached point and updates s_tilde
// incrementally; advances the counters.
void bfinito_apply(BFinitoState& state, const Problem& problem,
                   const std::vector<int>& index_set);

// One full iteration: point + apply.
void bfinito_step(BFinitoState& state, const Problem& problem,
                  const std::vector<int>& index_set);

struct StopRule {
  double max_epochs = 50.0;
  double residual_tol = 0.0;  // 0 disables residual stopping
};

struct RunOptions {
  StopRule stop;
  bool with_lyapunov = true;
  bool with_residual = true;
  // Called at every computed iterate (each z^k); used by tests to observe
  // per-iteration behavior without changing the trace cadence.
  std::function<void(const Vec&)> iterate_observer;
};

struct RunResult {
  Vec z;
  Trace trace;
  double epochs = 0.0;
  std::int64_t iterations = 0;
  std::int64_t grad_evals = 0;
  double final_cost = 0.0;
  double final_residual = 0.0;
};

// Runs until Op(z) <= residual_tol (checked once per epoch-equivalent) or the
// epoch budget is exhausted. Trace cadence: one record at k=0 plus one per
// epoch-equivalent crossing. max_epochs <= 0 returns the initialization with
// an empty trace.
RunResult bfinito_run(const Problem& problem, Sampler& sampler, const Vec& x_init,
                      const RunOptions& options = {}, const TraceSink& sink = {});

}  // namespace bfinito
