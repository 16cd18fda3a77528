#include <doctest.h>

#include <cmath>

#include "bfinito/experiment.hpp"
#include "bfinito/solver_md.hpp"
#include "oracles.hpp"

using namespace bfinito;

namespace {

Problem small_squared_problem(int n = 16, int d = 3) {
  RunConfig config;
  config.problem = "pr-squared-l1";
  config.n = n;
  config.d = d;
  config.seed = 5;
  PhaseRetrievalInstance inst = build_instance(config);
  return build_problem(config, inst);
}

Problem small_poisson_problem() {
  RunConfig config;
  config.problem = "pr-poisson-l1";
  config.n = 8;
  config.N = 32;
  config.seed = 5;
  PhaseRetrievalInstance inst = build_instance(config);
  return build_problem(config, inst);
}

}  // namespace

TEST_SUITE("solver_md") {

TEST_CASE("aggregate kernel follows the component family") {
  Problem toy = toy_quadratic_problem();
  CHECK(make_aggregate_kernel(toy).family == Kernel::Family::euclidean);

  Problem sq = small_squared_problem();
  CHECK(make_aggregate_kernel(sq).family == Kernel::Family::quartic);

  Problem po = small_poisson_problem();
  Kernel agg = make_aggregate_kernel(po);
  CHECK(agg.family == Kernel::Family::poisson);
  double a_sq = 0.0;
  double b = 0.0;
  for (const Component& c : po.components) {
    a_sq += c.kernel.a_sq;
    b += c.kernel.b;
  }
  CHECK(agg.a_sq == doctest::Approx(a_sq / po.size()));
  CHECK(agg.b == doctest::Approx(b / po.size()));
}

TEST_CASE("config aggregates the smoothness constants") {
  Problem toy = toy_quadratic_problem();
  MDConfig cfg = make_md_config(toy, false);
  CHECK(cfg.aggregate_smoothness == doctest::Approx(1.0));
  CHECK_FALSE(cfg.stochastic);
  CHECK_THROWS_AS(make_md_config(toy, true, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_md_config(toy, true, -1.0), std::invalid_argument);
}

TEST_CASE("euclidean full step is a plain gradient step") {
  Problem toy = toy_quadratic_problem();
  MDConfig cfg = make_md_config(toy, false);
  // L_f = 1, so the step lands on the minimizer from any start.
  CHECK(md_step(Vec::Zero(1), cfg, toy, 1)[0] == doctest::Approx(1.0));
  CHECK(md_step(Vec::Constant(1, -3.0), cfg, toy, 1)[0] == doctest::Approx(1.0));
  // Stationary points are fixed.
  CHECK(md_step(Vec::Ones(1), cfg, toy, 5)[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(md_step(Vec::Zero(1), cfg, toy, 0), std::invalid_argument);
  CHECK_THROWS_AS(md_step(Vec::Zero(1), cfg, toy, 1, 7), std::invalid_argument);
}

TEST_CASE("stochastic stepsize decays as alpha over L k") {
  Problem toy = toy_quadratic_problem();
  MDConfig cfg = make_md_config(toy, true, 1.0, 0);
  // Sampled component 1 (center 2): w = x - gamma_k (x - 2), gamma_k = 1/k.
  for (int k = 1; k <= 6; ++k) {
    double expected = 0.0 + (2.0 - 0.0) / k;
    CHECK(md_step(Vec::Zero(1), cfg, toy, k, 1)[0] == doctest::Approx(expected).epsilon(1e-14));
  }
  MDConfig half = make_md_config(toy, true, 0.5, 0);
  CHECK(md_step(Vec::Zero(1), half, toy, 1, 1)[0] == doctest::Approx(1.0));
}

TEST_CASE("quartic step agrees with the prox-gradient oracle") {
  Problem p = small_squared_problem(4, 2);
  MDConfig cfg = make_md_config(p, false);
  Rng rng(41);
  for (int rep = 0; rep < 25; ++rep) {
    Vec x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.normal();
    Vec w = md_step(x, cfg, p, 1 + rep);
    double gamma = 1.0 / cfg.aggregate_smoothness;
    Vec g = Vec::Zero(4);
    for (const Component& c : p.components) g += c.gradient(x);
    g /= p.size();
    Vec s = cfg.aggregate_kernel.gradient(x) / gamma - g;
    Vec ref = oracles::innerprox_quartic_l1(s, p.regularizer.lambda, Vec::Constant(1, gamma));
    CHECK((w - ref).norm() <= 1e-6 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("full md cost is monotone under the 1/L stepsize") {
  Problem p = small_squared_problem();
  RunConfig config;
  config.n = 16;
  config.d = 3;
  config.seed = 5;
  PhaseRetrievalInstance inst = build_instance(config);
  Vec x0 = initial_point(config, inst);

  MDConfig cfg = make_md_config(p, false);
  RunOptions options;
  options.stop.max_epochs = 30.0;
  options.with_lyapunov = false;
  RunResult res = md_run(p, cfg, x0, options);
  REQUIRE(res.trace.size() > 5);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    double prev = res.trace[i - 1].cost;
    CHECK(res.trace[i].cost <= prev + 1e-9 * std::max(1.0, std::abs(prev)));
  }
  CHECK_FALSE(res.trace.back().lyapunov.has_value());
  CHECK(res.iterations == 30);  // one iteration per epoch
}

TEST_CASE("stochastic md counts epochs in 1/N steps") {
  Problem toy = toy_quadratic_problem();
  MDConfig cfg = make_md_config(toy, true, 1.0, 3);
  RunOptions options;
  options.stop.max_epochs = 2.0;
  RunResult res = md_run(toy, cfg, Vec::Zero(1), options);
  CHECK(res.iterations == 4);  // N = 2 component draws per epoch
  CHECK(res.epochs == doctest::Approx(2.0));
  CHECK(res.grad_evals == 4);
  REQUIRE(res.trace.size() >= 3);
  CHECK(res.trace.front().iter == 0);
}

TEST_CASE("poisson iterates stay strictly positive") {
  Problem p = small_poisson_problem();
  Vec x0 = Vec::Ones(8);
  for (bool stochastic : {false, true}) {
    MDConfig cfg = make_md_config(p, stochastic, 1.0, 7);
    RunOptions options;
    options.stop.max_epochs = 5.0;
    bool all_positive = true;
    options.iterate_observer = [&](const Vec& x) {
      all_positive = all_positive && (x.minCoeff() > 0.0);
    };
    RunResult res = md_run(p, cfg, x0, options);
    CHECK(all_positive);
    CHECK(res.z.minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(md_run(p, make_md_config(p, false), Vec::Zero(8)), std::domain_error);
}

TEST_CASE("vanishing alpha freezes the stochastic iterates") {
  Problem p = small_squared_problem();
  Vec x0 = Vec::Constant(16, 0.2);
  MDConfig cfg = make_md_config(p, true, 1e-8, 11);
  RunOptions options;
  options.stop.max_epochs = 2.0;
  double max_move = 0.0;
  options.iterate_observer = [&](const Vec& x) {
    max_move = std::max(max_move, (x - x0).cwiseAbs().maxCoeff());
  };
  md_run(p, cfg, x0, options);
  CHECK(max_move <= 1e-4);
}

TEST_CASE("zero epoch budget returns the start point") {
  Problem toy = toy_quadratic_problem();
  MDConfig cfg = make_md_config(toy, false);
  RunOptions options;
  options.stop.max_epochs = 0.0;
  RunResult res = md_run(toy, cfg, Vec::Zero(1), options);
  CHECK(res.trace.empty());
  CHECK(res.z[0] == 0.0);
  CHECK(res.iterations == 0);
}

TEST_CASE("residual stopping fires once the tolerance is met") {
  Problem toy = toy_quadratic_problem();
  MDConfig cfg = make_md_config(toy, false);
  RunOptions options;
  options.stop.max_epochs = 100.0;
  options.stop.residual_tol = 1e-8;
  RunResult res = md_run(toy, cfg, Vec::Zero(1), options);
  CHECK(res.final_residual <= 1e-8);
  CHECK(res.epochs < 100.0);
}

}  // TEST_SUITE
