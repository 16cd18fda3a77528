#include "bfinito/solver_lowmem.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "bfinito/rng.hpp"

namespace bfinito {

namespace {

void check_interior(const Problem& problem, const Vec& x, const char* what) {
  for (const Component& c : problem.components) {
    if (!c.kernel.in_interior(x)) throw std::domain_error(std::string(what) + ": point outside the domain interior");
  }
}

}  // namespace

LowMemSelector cyclic_inner(int batch) {
  if (batch < 1) throw std::invalid_argument("cyclic_inner: batch must be positive");
  return [batch](const LowMemState& st) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(batch));
    for (std::size_t i = 0; i < st.selectable.size() && static_cast<int>(out.size()) < batch; ++i)
      if (st.selectable[i]) out.push_back(static_cast<int>(i));
    return out;
  };
}

LowMemSelector shuffled_inner(int batch, std::uint64_t seed) {
  if (batch < 1) throw std::invalid_argument("shuffled_inner: batch must be positive");
  auto rng = std::make_shared<Rng>(seed);
  return [batch, rng](const LowMemState& st) {
    std::vector<int> pool;
    for (std::size_t i = 0; i < st.selectable.size(); ++i)
      if (st.selectable[i]) pool.push_back(static_cast<int>(i));
    int take = std::min<int>(batch, static_cast<int>(pool.size()));
    for (int r = 0; r < take; ++r) {
      int j = r + rng->bounded(static_cast<int>(pool.size()) - r);
      std::swap(pool[static_cast<std::size_t>(r)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(take));
    return pool;
  };
}

LowMemState lowmem_init(const Problem& problem, const Vec& x_init) {
  if (x_init.size() != problem.dimension)
    throw std::invalid_argument("lowmem_init: dimension mismatch");
  check_interior(problem, x_init, "lowmem_init");
  LowMemState st;
  st.s_tilde = Vec::Zero(problem.dimension);
  for (const DerivedKernel& d : problem.derived) st.s_tilde += d.gradient(x_init);
  st.grad_evals += problem.size();
  st.z_anchor = x_init;
  st.selectable.assign(static_cast<std::size_t>(problem.size()), 0);
  st.remaining = 0;  // forces a first full update
  return st;
}

const Vec& lowmem_point(LowMemState& state, const Problem& problem) {
  state.z = problem.t_solve(state.s_tilde);
  check_interior(problem, state.z, "lowmem_point");
  state.has_point = true;
  return state.z;
}

void lowmem_apply(LowMemState& state, const Problem& problem,
                  const LowMemSelector& selector) {
  if (!state.has_point) throw std::logic_error("lowmem_apply: no point computed for this step");
  int N = problem.size();
  if (state.remaining == 0) {
    // Full update: refresh the anchor and recompute the aggregate from
    // scratch, eliminating incremental drift.
    state.z_anchor = state.z;
    state.s_tilde = Vec::Zero(problem.dimension);
    for (const DerivedKernel& d : problem.derived) state.s_tilde += d.gradient(state.z);
    std::fill(state.selectable.begin(), state.selectable.end(), 1);
    state.remaining = N;
    state.grad_evals += N;
    state.epoch_equivalents += 1.0;
  } else {
    std::vector<int> index_set = selector(state);
    if (index_set.empty()) throw std::runtime_error("lowmem_apply: selector returned an empty set");
    for (int i : index_set) {
      if (i < 0 || i >= N || !state.selectable[static_cast<std::size_t>(i)])
        throw std::runtime_error("lowmem_apply: selector picked an index outside K");
      const DerivedKernel& d = problem.derived[static_cast<std::size_t>(i)];
      state.s_tilde += d.gradient(state.z) - d.gradient(state.z_anchor);
      state.selectable[static_cast<std::size_t>(i)] = 0;
      --state.remaining;
    }
    // Two component-gradient evaluations per sampled index (at z and z_anchor).
    state.grad_evals += 2 * static_cast<std::int64_t>(index_set.size());
    state.epoch_equivalents += static_cast<double>(index_set.size()) / N;
  }
  ++state.k;
  state.has_point = false;
}

void lowmem_step(LowMemState& state, const Problem& problem,
                 const LowMemSelector& selector) {
  lowmem_point(state, problem);
  lowmem_apply(state, problem, selector);
}

std::vector<std::vector<int>> lowmem_induced_schedule(int n_components,
                                                      std::int64_t iterations,
                                                      const LowMemSelector& selector) {
  if (n_components < 1) throw std::invalid_argument("lowmem_induced_schedule: bad component count");
  LowMemState st;
  st.selectable.assign(static_cast<std::size_t>(n_components), 0);
  st.remaining = 0;
  std::vector<std::vector<int>> schedule;
  schedule.reserve(static_cast<std::size_t>(iterations));
  for (std::int64_t k = 0; k < iterations; ++k) {
    if (st.remaining == 0) {
      std::vector<int> full(static_cast<std::size_t>(n_components));
      for (int i = 0; i < n_components; ++i) full[static_cast<std::size_t>(i)] = i;
      schedule.push_back(full);
      std::fill(st.selectable.begin(), st.selectable.end(), 1);
      st.remaining = n_components;
    } else {
      std::vector<int> index_set = selector(st);
      if (index_set.empty())
        throw std::runtime_error("lowmem_induced_schedule: selector returned an empty set");
      for (int i : index_set) {
        if (i < 0 || i >= n_components || !st.selectable[static_cast<std::size_t>(i)])
          throw std::runtime_error("lowmem_induced_schedule: selector picked an index outside K");
        st.selectable[static_cast<std::size_t>(i)] = 0;
        --st.remaining;
      }
      schedule.push_back(std::move(index_set));
    }
  }
  return schedule;
}

RunResult lowmem_run(const Problem& problem, const LowMemSelector& selector,
                     const Vec& x_init, const RunOptions& options, const TraceSink& sink) {
  LowMemState st = lowmem_init(problem, x_init);
  // Sidecar anchor table for the optional Lyapunov trace; the solver state
  // itself stays O(n).
  Mat anchors;
  if (options.with_lyapunov) anchors = x_init.transpose().replicate(problem.size(), 1);

  RunResult res;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (options.stop.max_epochs <= 0.0) {
    res.z = st.z_anchor;
    res.grad_evals = st.grad_evals;
    res.final_cost = cost(problem, res.z);
    if (options.with_residual) res.final_residual = op_residual(problem, res.z);
    return res;
  }

  double emit_due = 0.0;
  bool stopped = false;
  while (true) {
    const Vec& z = lowmem_point(st, problem);
    if (options.iterate_observer) options.iterate_observer(z);
    bool budget_done = st.epoch_equivalents >= options.stop.max_epochs;
    if (st.epoch_equivalents >= emit_due || budget_done) {
      TraceRecord rec;
      rec.iter = st.k;
      rec.epochs = st.epoch_equivalents;
      rec.cost = cost(problem, st.z_anchor);
      if (options.with_lyapunov) rec.lyapunov = lyapunov(problem, z, anchors);
      if (options.with_residual) rec.residual = op_residual(problem, st.z_anchor);
      rec.wall_seconds = elapsed();
      if (sink) sink(rec);
      res.trace.push_back(rec);
      emit_due = std::floor(st.epoch_equivalents) + 1.0;
      if (options.stop.residual_tol > 0.0 && rec.residual &&
          *rec.residual <= options.stop.residual_tol)
        stopped = true;
    }
    if (budget_done || stopped) break;
    bool full_next = st.remaining == 0;
    std::vector<int> updated;
    if (!full_next && options.with_lyapunov) updated = selector(st);
    if (full_next) {
      lowmem_apply(st, problem, selector);
      if (options.with_lyapunov) anchors = z.transpose().replicate(problem.size(), 1);
    } else if (options.with_lyapunov) {
      // Replay the already-drawn batch so the sidecar matches the update.
      LowMemSelector fixed = [&updated](const LowMemState&) { return updated; };
      lowmem_apply(st, problem, fixed);
      for (int i : updated) anchors.row(i) = z.transpose();
    } else {
      lowmem_apply(st, problem, selector);
    }
  }

  res.z = st.z_anchor;
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
