#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "bfinito/experiment.hpp"

namespace {

using namespace bfinito;

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
  sub->add_option("--problem", cfg.problem,
                  "pr-squared-l1 | pr-squared-l0 | pr-poisson-l1 | toy-quadratic");
  sub->add_option("--seed", cfg.seed, "base seed for instance/init/sampler streams");
  sub->add_option("--n", cfg.n, "dimension (power of two for pr-squared)");
  sub->add_option("--d", cfg.d, "measurement blocks for pr-squared (N = n d)");
  sub->add_option("--N", cfg.N, "measurement count for pr-poisson (default 4n)");
  sub->add_option("--lambda", cfg.lambda, "l1 weight (default 0.1/N)");
  sub->add_option("--kappa", cfg.kappa, "l0 ball budget (default max(1, n/4))");
  sub->add_option("--gamma-scale", cfg.gamma_scale, "stepsizes gamma_i = scale * N / L_i");
  sub->add_option("--p-corrupt", cfg.p_corrupt, "pr-squared corruption probability (default 1/50)");
  sub->add_option("--x-scale", cfg.x_scale, "pr-squared ground-truth scale (default 0.5/n)");
  sub->add_option("--power-iters", cfg.power_iters, "spectral init power iterations");
  sub->add_option("--init", cfg.init, "spectral | random");
  sub->add_option("--instance", cfg.instance_path, "load an instance file instead of generating");
  sub->add_option("--out", cfg.out, "output path");
  sub->add_option("--config", config_path, "key=value config file (flags win)");
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Applies key=value lines to `cfg`, skipping keys already given as flags.
void apply_config_file(const CLI::App* sub, RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = trimmed(line);
    if (entry.empty() || entry[0] == '#') continue;
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': '" + entry + "'");
    std::string key = trimmed(entry.substr(0, eq));
    std::string value = trimmed(entry.substr(eq + 1));
    bool flag_given = false;
    try {
      flag_given = sub->count("--" + key) > 0;
    } catch (const CLI::OptionNotFound&) {
      // key has no flag on this subcommand; the config entry still applies
    }
    if (!flag_given) apply_config_entry(cfg, key, value);
  }
}

void add_run_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--algo", cfg.algo, "bfinito | lowmem | md | smd");
  sub->add_option("--sampler", cfg.sampler,
                  "uniform | cyclic | shuffled | minibatch:b | weighted:p1,...,pN");
  sub->add_option("--inner", cfg.inner, "lowmem inner selector: cyclic | shuffled");
  sub->add_option("--inner-batch", cfg.inner_batch, "lowmem incremental batch size");
  sub->add_option("--epochs", cfg.max_epochs, "epoch budget");
  sub->add_option("--tol", cfg.tol, "stop when the residual falls below this (0 disables)");
  sub->add_option("--alpha", cfg.alpha, "smd stepsize constant in alpha/(L_f k)");
}

void print_summary(const ExperimentResult& res, const RunConfig& cfg) {
  std::cout << "summary problem=" << cfg.problem << " algo=" << res.label
            << " epochs=" << format_g17(res.run.epochs) << " iters=" << res.run.iterations
            << " final_cost=" << format_g17(res.run.final_cost)
            << " final_residual=" << format_g17(res.run.final_residual) << '\n';
}

int cmd_generate(const RunConfig& cfg) {
  if (cfg.out.empty()) throw std::invalid_argument("generate requires --out");
  PhaseRetrievalInstance inst = build_instance(cfg);
  save_instance(inst, cfg.out);
  std::cout << "wrote " << cfg.out << " (n=" << inst.n() << " N=" << inst.count() << ")\n";
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  ExperimentResult res = run_experiment(cfg);
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot open '" + cfg.out + "'");
    write_trace_csv(out, res.run.trace);
  }
  print_summary(res, cfg);
  return 0;
}

int compare_threads() {
  if (const char* env = std::getenv("BFINITO_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

RunConfig member_config(const RunConfig& base, const std::string& member) {
  RunConfig cfg = base;
  if (member.rfind("bfinito-", 0) == 0) {
    cfg.algo = "bfinito";
    cfg.sampler = member.substr(8);
  } else if (member == "lowmem" || member == "lowmem-shuffled") {
    cfg.algo = "lowmem";
    cfg.inner = member == "lowmem" ? "cyclic" : "shuffled";
  } else if (member == "md" || member == "smd") {
    cfg.algo = member;
  } else {
    throw std::invalid_argument("unknown compare member '" + member + "'");
  }
  return cfg;
}

int cmd_compare(const RunConfig& base, const std::string& algos) {
  std::vector<std::string> members;
  std::size_t start = 0;
  while (start <= algos.size()) {
    std::size_t comma = algos.find(',', start);
    std::string tok = algos.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) members.push_back(tok);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (members.empty()) throw std::invalid_argument("compare requires --algos");

  // Validate every member before spending time on runs.
  std::vector<RunConfig> configs;
  for (const std::string& m : members) configs.push_back(member_config(base, m));

  Problem problem = base.problem == "toy-quadratic" ? toy_quadratic_problem() : Problem{};
  Vec x0;
  if (base.problem == "toy-quadratic") {
    x0 = Vec::Zero(1);
  } else {
    PhaseRetrievalInstance instance = build_instance(base);
    problem = build_problem(base, instance);
    x0 = initial_point(base, instance);
  }

  std::vector<ExperimentResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      try {
        results[i] = run_algo(configs[i], problem, x0);
      } catch (...) {
        std::scoped_lock lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int n_threads = std::min<int>(compare_threads(), static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<std::string> labels;
  std::vector<Trace> traces;
  for (const ExperimentResult& r : results) {
    labels.push_back(r.label);
    traces.push_back(r.run.trace);
  }
  if (!base.out.empty()) {
    std::ofstream out(base.out);
    if (!out) throw std::runtime_error("cannot open '" + base.out + "'");
    write_compare_csv(out, labels, traces);
  } else {
    write_compare_csv(std::cout, labels, traces);
  }
  for (std::size_t i = 0; i < results.size(); ++i) print_summary(results[i], configs[i]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bregman finito/miso phase retrieval experiments"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string algos;
  std::string config_path;

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic instance file");
  add_common_options(generate, cfg, config_path);

  CLI::App* run = app.add_subcommand("run", "run one solver and emit a trace CSV");
  add_common_options(run, cfg, config_path);
  add_run_options(run, cfg);

  CLI::App* compare = app.add_subcommand("compare", "residual-vs-epoch CSV across solvers");
  add_common_options(compare, cfg, config_path);
  add_run_options(compare, cfg);
  compare->add_option("--algos", algos,
                      "comma list: bfinito-<sampler> | lowmem | lowmem-shuffled | md | smd");

  try {
    app.parse(argc, argv);
    CLI::App* active = generate->parsed() ? generate : run->parsed() ? run : compare;
    if (!config_path.empty()) apply_config_file(active, cfg, config_path);
    if (generate->parsed()) return cmd_generate(cfg);
    if (run->parsed()) return cmd_run(cfg);
    return cmd_compare(cfg, algos);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
