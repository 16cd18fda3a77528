#pragma once

#include <iosfwd>
#include <string>

#include "bfinito/datagen.hpp"
#include "bfinito/solver_bfinito.hpp"
#include "bfinito/solver_lowmem.hpp"
#include "bfinito/solver_md.hpp"

namespace bfinito {

// One experiment: problem family, algorithm, sampling rule and sizes. Negative
// sentinel values select the family defaults.
struct RunConfig {
  std::string problem = "pr-squared-l1";  // pr-squared-l1 | pr-squared-l0 | pr-poisson-l1 | toy-quadratic
  std::string algo = "bfinito";           // bfinito | lowmem | md | smd
  std::string sampler = "uniform";        // sampler spec string (bfinito)
  std::string inner = "cyclic";           // lowmem inner selector: cyclic | shuffled
  int inner_batch = 1;
  std::uint64_t seed = 1;
  double max_epochs = 200.0;
  double tol = 0.0;
  double lambda = -1.0;      // default 0.1/N
  int kappa = -1;            // default max(1, n/4)
  double alpha = 1.0;        // smd stepsize constant
  double gamma_scale = 0.99; // gamma_i = gamma_scale * N / L_{f_i}
  int n = 64;
  int d = 5;                 // squared family: N = n d
  int N = -1;                // poisson family; default 4 n
  double p_corrupt = -1.0;   // squared family; default 1/50
  double x_scale = -1.0;     // squared family ground-truth scale; default 0.5/n
  int power_iters = 100;
  std::string init = "spectral";  // spectral | random
  std::string instance_path;      // load instead of generating
  std::string out;                // trace CSV path ("" skips the file)
};

struct ExperimentResult {
  std::string label;
  RunResult run;
};

// Effective defaults resolved against the actual instance sizes (count = N,
// dimension = n), so loaded instances and generated ones agree.
double effective_lambda(const RunConfig& config, int count);
int effective_kappa(const RunConfig& config, int dimension);
int effective_count(const RunConfig& config);  // N for generation

PhaseRetrievalInstance build_instance(const RunConfig& config);
Problem build_problem(const RunConfig& config, const PhaseRetrievalInstance& instance);

// n=1, N=2 Euclidean instance with quadratic components centered at 0 and 2
// and unit stepsizes; minimizer at 1.
Problem toy_quadratic_problem();

Vec initial_point(const RunConfig& config, const PhaseRetrievalInstance& instance);

// Builds the instance (unless toy), problem, sampler and runs the configured
// algorithm. `label` identifies the algo/sampler pair ("bfinito-cyclic", ...).
ExperimentResult run_experiment(const RunConfig& config);

// Same but on an already-built problem/instance (compare reuses one instance).
ExperimentResult run_algo(const RunConfig& config, const Problem& problem, const Vec& x0);

// CSV with header exactly `iter,epochs,cost,lyapunov,residual,time_s`; floats
// with up to 17 significant digits; empty fields for absent diagnostics.
void write_trace_csv(std::ostream& out, const Trace& trace);

// Wide residual-vs-epoch CSV: column per label, row per emission index.
void write_compare_csv(std::ostream& out, const std::vector<std::string>& labels,
                       const std::vector<Trace>& traces);

std::string format_g17(double v);

// key=value assignment of a RunConfig field (config files / flag plumbing);
// unknown keys raise.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace bfinito
