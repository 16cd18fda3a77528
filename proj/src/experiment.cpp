#include "bfinito/experiment.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace bfinito {

namespace {

// Substream tags for the per-run RNG streams derived from the base seed.
constexpr std::uint64_t kStreamInstance = 1;
constexpr std::uint64_t kStreamInit = 2;
constexpr std::uint64_t kStreamSampler = 3;

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t s = base ^ (tag * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

bool is_squared(const std::string& problem) { return problem.rfind("pr-squared", 0) == 0; }
bool is_poisson(const std::string& problem) { return problem == "pr-poisson-l1"; }
bool is_toy(const std::string& problem) { return problem == "toy-quadratic"; }

void check_problem_name(const std::string& problem) {
  if (problem != "pr-squared-l1" && problem != "pr-squared-l0" && !is_poisson(problem) &&
      !is_toy(problem))
    throw std::invalid_argument("unknown problem '" + problem + "'");
}

}  // namespace

double effective_lambda(const RunConfig& config, int count) {
  if (config.lambda >= 0.0) return config.lambda;
  return 0.1 / count;
}

int effective_kappa(const RunConfig& config, int dimension) {
  if (config.kappa >= 1) return config.kappa;
  return std::max(1, dimension / 4);
}

int effective_count(const RunConfig& config) {
  if (is_toy(config.problem)) return 2;
  if (is_poisson(config.problem)) return config.N >= 1 ? config.N : 4 * config.n;
  return config.n * config.d;
}

PhaseRetrievalInstance build_instance(const RunConfig& config) {
  check_problem_name(config.problem);
  if (is_toy(config.problem))
    throw std::invalid_argument("toy-quadratic has no generated instance");
  if (!config.instance_path.empty()) {
    PhaseRetrievalInstance inst = load_instance(config.instance_path);
    bool want_poisson = is_poisson(config.problem);
    bool got_poisson = inst.family == PhaseRetrievalInstance::Family::poisson;
    if (want_poisson != got_poisson)
      throw std::invalid_argument("instance family in '" + config.instance_path +
                                  "' does not match problem '" + config.problem + "'");
    return inst;
  }
  std::uint64_t seed = stream_seed(config.seed, kStreamInstance);
  if (is_poisson(config.problem))
    return make_poisson_instance(config.n, effective_count(config), seed);
  double p_c = config.p_corrupt >= 0.0 ? config.p_corrupt : 1.0 / 50.0;
  double scale = config.x_scale >= 0.0 ? config.x_scale : 0.5 / config.n;
  Rng rng(stream_seed(config.seed, kStreamInstance ^ 0x74727565ULL));
  Vec x_true(config.n);
  for (int j = 0; j < config.n; ++j) x_true[j] = scale * rng.normal();
  return make_squared_instance(config.n, config.d, x_true, p_c, seed);
}

Problem build_problem(const RunConfig& config, const PhaseRetrievalInstance& instance) {
  check_problem_name(config.problem);
  if (is_toy(config.problem)) return toy_quadratic_problem();
  std::vector<Component> components;
  components.reserve(static_cast<std::size_t>(instance.count()));
  for (int i = 0; i < instance.count(); ++i) {
    Vec a = instance.A.row(i).transpose();
    if (is_poisson(config.problem))
      components.push_back(poisson_component(a, instance.b[i]));
    else
      components.push_back(squared_loss_component(a, instance.b[i]));
  }
  Regularizer reg = config.problem == "pr-squared-l0"
                        ? Regularizer::l0ball(effective_kappa(config, instance.n()))
                        : Regularizer::l1(effective_lambda(config, instance.count()));
  return make_problem(std::move(components), reg, config.gamma_scale);
}

Problem toy_quadratic_problem() {
  Vec c0 = Vec::Zero(1);
  Vec c1 = Vec::Constant(1, 2.0);
  std::vector<Component> components{quadratic_component(c0, 1.0), quadratic_component(c1, 1.0)};
  return make_problem(std::move(components), Regularizer::none(), Vec::Ones(2));
}

Vec initial_point(const RunConfig& config, const PhaseRetrievalInstance& instance) {
  if (is_toy(config.problem)) return Vec::Zero(1);
  std::uint64_t seed = stream_seed(config.seed, kStreamInit);
  if (config.init == "spectral")
    return spectral_init(instance, config.power_iters, seed);
  if (config.init == "random") {
    Rng rng(seed);
    Vec x(instance.n());
    for (int j = 0; j < instance.n(); ++j) x[j] = rng.normal();
    x.normalize();
    if (instance.family == PhaseRetrievalInstance::Family::poisson)
      x = x.cwiseAbs().cwiseMax(kEpsDom);
    return x;
  }
  throw std::invalid_argument("unknown init '" + config.init + "'");
}

ExperimentResult run_algo(const RunConfig& config, const Problem& problem, const Vec& x0) {
  RunOptions options;
  options.stop.max_epochs = config.max_epochs;
  options.stop.residual_tol = config.tol;

  ExperimentResult out;
  if (config.algo == "bfinito") {
    SamplerSpec spec = parse_sampler_spec(config.sampler);
    spec.seed = stream_seed(config.seed, kStreamSampler);
    Sampler sampler(spec, problem.size());
    out.run = bfinito_run(problem, sampler, x0, options);
    out.label = "bfinito-" + config.sampler;
  } else if (config.algo == "lowmem") {
    LowMemSelector selector;
    if (config.inner == "cyclic")
      selector = cyclic_inner(config.inner_batch);
    else if (config.inner == "shuffled")
      selector = shuffled_inner(config.inner_batch, stream_seed(config.seed, kStreamSampler));
    else
      throw std::invalid_argument("unknown lowmem inner selector '" + config.inner + "'");
    out.run = lowmem_run(problem, selector, x0, options);
    out.label = "lowmem";
  } else if (config.algo == "md" || config.algo == "smd") {
    bool stochastic = config.algo == "smd";
    MDConfig md = make_md_config(problem, stochastic, config.alpha,
                                 stream_seed(config.seed, kStreamSampler));
    options.with_lyapunov = false;
    out.run = md_run(problem, md, x0, options);
    out.label = config.algo;
  } else {
    throw std::invalid_argument("unknown algo '" + config.algo + "'");
  }
  return out;
}

ExperimentResult run_experiment(const RunConfig& config) {
  check_problem_name(config.problem);
  if (is_toy(config.problem)) {
    Problem problem = toy_quadratic_problem();
    return run_algo(config, problem, Vec::Zero(1));
  }
  PhaseRetrievalInstance instance = build_instance(config);
  Problem problem = build_problem(config, instance);
  Vec x0 = initial_point(config, instance);
  return run_algo(config, problem, x0);
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "iter,epochs,cost,lyapunov,residual,time_s\n";
  for (const TraceRecord& r : trace) {
    out << r.iter << ',' << format_g17(r.epochs) << ',' << format_g17(r.cost) << ',';
    if (r.lyapunov) out << format_g17(*r.lyapunov);
    out << ',';
    if (r.residual) out << format_g17(*r.residual);
    out << ',' << format_g17(r.wall_seconds) << '\n';
  }
}

void write_compare_csv(std::ostream& out, const std::vector<std::string>& labels,
                       const std::vector<Trace>& traces) {
  if (labels.size() != traces.size())
    throw std::invalid_argument("write_compare_csv: label/trace count mismatch");
  out << "epoch";
  for (const std::string& label : labels) out << ',' << label;
  out << '\n';
  std::size_t rows = 0;
  for (const Trace& t : traces) rows = std::max(rows, t.size());
  for (std::size_t r = 0; r < rows; ++r) {
    out << r;
    for (const Trace& t : traces) {
      out << ',';
      if (r < t.size() && t[r].residual) out << format_g17(*t[r].residual);
    }
    out << '\n';
  }
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
  auto as_int = [&] { return std::stoi(value); };
  auto as_double = [&] { return std::stod(value); };
  if (key == "problem") config.problem = value;
  else if (key == "algo") config.algo = value;
  else if (key == "sampler") config.sampler = value;
  else if (key == "inner") config.inner = value;
  else if (key == "inner-batch") config.inner_batch = as_int();
  else if (key == "seed") config.seed = std::stoull(value);
  else if (key == "epochs") config.max_epochs = as_double();
  else if (key == "tol") config.tol = as_double();
  else if (key == "lambda") config.lambda = as_double();
  else if (key == "kappa") config.kappa = as_int();
  else if (key == "alpha") config.alpha = as_double();
  else if (key == "gamma-scale") config.gamma_scale = as_double();
  else if (key == "n") config.n = as_int();
  else if (key == "d") config.d = as_int();
  else if (key == "N") config.N = as_int();
  else if (key == "p-corrupt") config.p_corrupt = as_double();
  else if (key == "x-scale") config.x_scale = as_double();
  else if (key == "power-iters") config.power_iters = as_int();
  else if (key == "init") config.init = value;
  else if (key == "instance") config.instance_path = value;
  else if (key == "out") config.out = value;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

}  // namespace bfinito
