#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <limits>

#include "bfinito/experiment.hpp"

namespace py = pybind11;
using namespace bfinito;

namespace {

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
  RunConfig cfg;
  for (auto item : kwargs) {
    std::string key = py::str(item.first);
    std::replace(key.begin(), key.end(), '_', '-');
    apply_config_entry(cfg, key, py::str(item.second));
  }
  return cfg;
}

py::dict trace_dict(const Trace& trace) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto n = static_cast<Eigen::Index>(trace.size());
  Vec iters(n), epochs(n), cost_col(n), lyap(n), resid(n), time_s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TraceRecord& r = trace[static_cast<std::size_t>(i)];
    iters[i] = static_cast<double>(r.iter);
    epochs[i] = r.epochs;
    cost_col[i] = r.cost;
    lyap[i] = r.lyapunov.value_or(nan);
    resid[i] = r.residual.value_or(nan);
    time_s[i] = r.wall_seconds;
  }
  py::dict d;
  d["iter"] = iters;
  d["epochs"] = epochs;
  d["cost"] = cost_col;
  d["lyapunov"] = lyap;
  d["residual"] = resid;
  d["time_s"] = time_s;
  return d;
}

py::dict result_dict(const ExperimentResult& res) {
  py::dict d;
  d["label"] = res.label;
  d["z"] = res.run.z;
  d["epochs"] = res.run.epochs;
  d["iterations"] = res.run.iterations;
  d["grad_evals"] = res.run.grad_evals;
  d["final_cost"] = res.run.final_cost;
  d["final_residual"] = res.run.final_residual;
  d["trace"] = trace_dict(res.run.trace);
  return d;
}

}  // namespace

PYBIND11_MODULE(_bfinito, m) {
  m.doc() = "Bregman Finito/MISO solvers, kernels and experiment harness";

  py::class_<Kernel>(m, "Kernel")
      .def_property_readonly("dimension", [](const Kernel& k) { return k.dimension; })
      .def("value", [](const Kernel& k, const Vec& x) { return k.value(x); })
      .def("gradient", [](const Kernel& k, const Vec& x) { return k.gradient(x); })
      .def("in_domain", [](const Kernel& k, const Vec& x) { return k.in_domain(x); })
      .def("in_interior", [](const Kernel& k, const Vec& x) { return k.in_interior(x); });

  m.def("euclidean_kernel", &make_euclidean_kernel, py::arg("dimension"));
  m.def("quartic_kernel", &make_quartic_kernel, py::arg("dimension"));
  m.def("poisson_kernel", &make_poisson_kernel, py::arg("a"), py::arg("b"));
  m.def("bregman", [](const Kernel& kernel, const Vec& x, const Vec& y) {
    return bregman(kernel, x, y);
  });

  m.def("soft_threshold", &soft_threshold, py::arg("v"), py::arg("threshold"));
  m.def("project_l0_ball", &project_l0_ball, py::arg("v"), py::arg("kappa"));
  m.def("cardano_positive_root", &cardano_positive_root, py::arg("p"), py::arg("q"));
  m.def("t_solve_quartic_l1", &t_solve_quartic_l1, py::arg("s"), py::arg("lambda_"),
        py::arg("gammas"));
  m.def("t_solve_quartic_l0", &t_solve_quartic_l0, py::arg("s"), py::arg("kappa"),
        py::arg("gammas"));
  m.def("t_solve_poisson_l1", &t_solve_poisson_l1_coeffs, py::arg("s"), py::arg("lambda_"),
        py::arg("c_a"), py::arg("c_b"));

  py::class_<PhaseRetrievalInstance>(m, "Instance")
      .def_readonly("A", &PhaseRetrievalInstance::A)
      .def_readonly("b", &PhaseRetrievalInstance::b)
      .def_readonly("x_true", &PhaseRetrievalInstance::x_true)
      .def_property_readonly("family",
                             [](const PhaseRetrievalInstance& inst) {
                               return inst.family == PhaseRetrievalInstance::Family::squared
                                          ? "squared"
                                          : "poisson";
                             })
      .def_property_readonly("corrupted",
                             [](const PhaseRetrievalInstance& inst) {
                               std::vector<bool> mask;
                               mask.reserve(inst.corruption_mask.size());
                               for (std::uint8_t m : inst.corruption_mask) mask.push_back(m != 0);
                               return mask;
                             })
      .def_property_readonly("n", &PhaseRetrievalInstance::n)
      .def_property_readonly("count", &PhaseRetrievalInstance::count)
      .def("save", [](const PhaseRetrievalInstance& inst, const std::string& path) {
        save_instance(inst, path);
      });

  m.def("hadamard", &hadamard, py::arg("n"));
  m.def("make_squared_instance", &make_squared_instance, py::arg("n"), py::arg("d"),
        py::arg("x_true"), py::arg("p_corrupt"), py::arg("seed"));
  m.def("make_poisson_instance", &make_poisson_instance, py::arg("n"), py::arg("N"),
        py::arg("seed"));
  m.def("spectral_init", &spectral_init, py::arg("instance"), py::arg("power_iterations"),
        py::arg("seed"));
  m.def("load_instance", &load_instance, py::arg("path"));
  m.def("generate_instance",
        [](const py::kwargs& kwargs) { return build_instance(config_from_kwargs(kwargs)); });

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("size", &Problem::size)
      .def_property_readonly("dimension", [](const Problem& p) { return p.dimension; })
      .def_property_readonly("gammas", [](const Problem& p) { return p.gammas; })
      .def_property_readonly("gamma_bar", &Problem::gamma_bar)
      .def("t_solve", &Problem::t_solve, py::arg("s"));

  m.def("toy_problem", &toy_quadratic_problem);
  m.def("build_problem", [](const py::kwargs& kwargs) {
    RunConfig cfg = config_from_kwargs(kwargs);
    if (cfg.problem == "toy-quadratic") return toy_quadratic_problem();
    PhaseRetrievalInstance inst = build_instance(cfg);
    return build_problem(cfg, inst);
  });
  m.def("problem_from_instance", [](const PhaseRetrievalInstance& inst, const py::kwargs& kwargs) {
    return build_problem(config_from_kwargs(kwargs), inst);
  });
  m.def("initial_point", [](const PhaseRetrievalInstance& inst, const py::kwargs& kwargs) {
    return initial_point(config_from_kwargs(kwargs), inst);
  });

  m.def("cost", &cost, py::arg("problem"), py::arg("z"));
  m.def("lyapunov", &lyapunov, py::arg("problem"), py::arg("z"), py::arg("anchors"));
  m.def("op_residual", &op_residual, py::arg("problem"), py::arg("z"));
  m.def("strconvex_rate_bound", &strconvex_rate_bound, py::arg("mu_phi"), py::arg("gammas"),
        py::arg("kernel_lipschitz"), py::arg("weak_convexity"), py::arg("probabilities"));

  m.def("run", [](const py::kwargs& kwargs) {
    return result_dict(run_experiment(config_from_kwargs(kwargs)));
  });
  m.def("run_on_problem", [](const Problem& problem, const Vec& x0, const py::kwargs& kwargs) {
    return result_dict(run_algo(config_from_kwargs(kwargs), problem, x0));
  });
}
