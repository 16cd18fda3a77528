#include "bfinito/solver_bfinito.hpp"

#include <chrono>
#include <cmath>

namespace bfinito {

namespace {

void check_interior(const Problem& problem, const Vec& x, const char* what) {
  for (const Component& c : problem.components) {
    if (!c.kernel.in_interior(x)) throw std::domain_error(std::string(what) + ": point outside the domain interior");
  }
}

}  // namespace

BFinitoState bfinito_init(const Problem& problem, const Vec& x_init, bool track_anchors) {
  if (x_init.size() != problem.dimension)
    throw std::invalid_argument("bfinito_init: dimension mismatch");
  check_interior(problem, x_init, "bfinito_init");
  int N = problem.size();
  BFinitoState st;
  st.track_anchors = track_anchors;
  st.table.resize(N, problem.dimension);
  st.s_tilde = Vec::Zero(problem.dimension);
  for (int i = 0; i < N; ++i) {
    Vec row = problem.derived[static_cast<std::size_t>(i)].gradient(x_init);
    st.table.row(i) = row.transpose();
    st.s_tilde += row;
  }
  st.grad_evals += N;
  if (track_anchors) st.anchors = x_init.transpose().replicate(N, 1);
  return st;
}

const Vec& bfinito_point(BFinitoState& state, const Problem& problem) {
  state.z = problem.t_solve(state.s_tilde);
  check_interior(problem, state.z, "bfinito_point");
  state.has_point = true;
  return state.z;
}

void bfinito_apply(BFinitoState& state, const Problem& problem,
                   const std::vector<int>& index_set) {
  if (index_set.empty()) throw std::invalid_argument("bfinito_apply: empty index set");
  if (!state.has_point) throw std::logic_error("bfinito_apply: no point computed for this step");
  int N = problem.size();
  for (int i : index_set) {
    if (i < 0 || i >= N) throw std::invalid_argument("bfinito_apply: index out of range");
    Vec row = problem.derived[static_cast<std::size_t>(i)].gradient(state.z);
    state.s_tilde += row - state.table.row(i).transpose();
    state.table.row(i) = row.transpose();
    if (state.track_anchors) state.anchors.row(i) = state.z.transpose();
  }
  state.grad_evals += static_cast<std::int64_t>(index_set.size());
  state.epoch_equivalents += static_cast<double>(index_set.size()) / N;
  ++state.k;
  state.has_point = false;
#ifndef NDEBUG
  Vec check = state.table.colwise().sum().transpose();
  if ((state.s_tilde - check).norm() > 1e-12 * (1.0 + state.s_tilde.norm()))
    throw std::logic_error("bfinito_apply: aggregate drifted from the table sum");
#endif
}

void bfinito_step(BFinitoState& state, const Problem& problem,
                  const std::vector<int>& index_set) {
  bfinito_point(state, problem);
  bfinito_apply(state, problem, index_set);
}

RunResult bfinito_run(const Problem& problem, Sampler& sampler, const Vec& x_init,
                      const RunOptions& options, const TraceSink& sink) {
  if (sampler.n_components() != problem.size())
    throw std::invalid_argument("bfinito_run: sampler component count mismatch");
  BFinitoState st = bfinito_init(problem, x_init, options.with_lyapunov);
  RunResult res;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (options.stop.max_epochs <= 0.0) {
    res.z = bfinito_point(st, problem);
    res.grad_evals = st.grad_evals;
    res.final_cost = cost(problem, res.z);
    if (options.with_residual) res.final_residual = op_residual(problem, res.z);
    return res;
  }

  double emit_due = 0.0;
  bool stopped = false;
  while (true) {
    const Vec& z = bfinito_point(st, problem);
    if (options.iterate_observer) options.iterate_observer(z);
    bool budget_done = st.epoch_equivalents >= options.stop.max_epochs;
    if (st.epoch_equivalents >= emit_due || budget_done) {
      TraceRecord rec;
      rec.iter = st.k;
      rec.epochs = st.epoch_equivalents;
      rec.cost = cost(problem, z);
      if (options.with_lyapunov) rec.lyapunov = lyapunov(problem, z, st.anchors);
      if (options.with_residual) rec.residual = op_residual(problem, z);
      rec.wall_seconds = elapsed();
      if (sink) sink(rec);
      res.trace.push_back(rec);
      emit_due = std::floor(st.epoch_equivalents) + 1.0;
      if (options.stop.residual_tol > 0.0 && rec.residual &&
          *rec.residual <= options.stop.residual_tol)
        stopped = true;
    }
    if (budget_done || stopped) break;
    bfinito_apply(st, problem, sampler.next_index_set());
  }

  res.z = st.z;
  res.epochs = st.epoch_equivalents;
  res.iterations = st.k;
  res.grad_evals = st.grad_evals;
  res.final_cost = res.trace.back().cost;
  if (res.trace.back().residual)
    res.final_residual = *res.trace.back().residual;
  else if (options.with_residual)
    res.final_residual = op_residual(problem, res.z);
  return res;
}

}  // namespace bfinito
