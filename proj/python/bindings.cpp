#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "zeno/cli.hpp"
#include "zeno/scenario.hpp"
#include "zeno/stroboscopic.hpp"
#include "zeno/zeno_dynamics.hpp"

namespace py = pybind11;
using namespace zeno;

namespace {

py::dict trajectory_dict(const TrajectoryRecord& rec) {
    Eigen::MatrixXcd states(static_cast<Eigen::Index>(rec.size()), rec.states.empty() ? 0 : rec.states[0].dim());
    for (std::size_t k = 0; k < rec.size(); ++k) {
        states.row(static_cast<Eigen::Index>(k)) = rec.states[k].amplitudes().transpose();
    }
    py::dict d;
    d["engine"] = rec.engine;
    d["times"] = rec.times;
    d["states"] = states;
    d["confinement_residual"] = rec.confinement_residual;
    d["norm_residual"] = rec.norm_residual;
    d["max_hermiticity_residual"] = rec.max_hermiticity_residual;
    return d;
}

py::dict strobe_dict(const StroboscopicRun& run) {
    Eigen::MatrixXcd states(static_cast<Eigen::Index>(run.conditional_states.size()),
                            run.conditional_states.empty() ? 0 : run.conditional_states[0].dim());
    for (std::size_t k = 0; k < run.conditional_states.size(); ++k) {
        states.row(static_cast<Eigen::Index>(k)) = run.conditional_states[k].amplitudes().transpose();
    }
    py::dict d;
    d["n"] = run.n;
    d["survival_probability"] = run.survival_probability;
    d["log_survival"] = run.log_survival;
    d["times"] = run.times;
    d["step_probabilities"] = run.step_probabilities;
    d["states"] = states;
    d["outcomes"] = run.outcomes;
    d["all_ones"] = run.all_ones();
    return d;
}

int steps_or_default(const Scenario& s, std::optional<int> n_steps) { return n_steps.value_or(s.n_steps); }

}  // namespace

PYBIND11_MODULE(_zeno, m) {
    m.doc() = "Zeno dynamics under continuously measured, time-dependent projectors";

    auto error = py::register_exception<Error>(m, "ZenoError", PyExc_RuntimeError);
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ImpossibleOutcome>(m, "ImpossibleOutcome", error.ptr());
    py::register_exception<HermiticityError>(m, "HermiticityError", error.ptr());
    py::register_exception<ScenarioError>(m, "ScenarioError", validation.ptr());

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("id", &Scenario::id)
        .def_readonly("dim", &Scenario::dim)
        .def_readonly("horizon", &Scenario::horizon)
        .def_readonly("n_steps", &Scenario::n_steps)
        .def_property_readonly("initial_state", [](const Scenario& s) { return s.initial_state.amplitudes(); })
        .def_property_readonly("base_projector", [](const Scenario& s) { return s.base_projector.op(); })
        .def_property_readonly("n_list", [](const Scenario& s) { return s.stroboscopic.n_list; })
        .def_property_readonly("seeds", [](const Scenario& s) { return s.stroboscopic.seeds; })
        .def("hamiltonian", [](const Scenario& s, double t) { return s.hamiltonian.evaluate(t); }, py::arg("t"))
        .def("projector", [](const Scenario& s, double t) { return s.projector_path().projector_at(t).op(); },
             py::arg("t"))
        .def("effective_hamiltonian",
             [](const Scenario& s, double t) { return effective_hamiltonian(s.hamiltonian, s.projector_path(), t).k; },
             py::arg("t"))
        .def("to_json", [](const Scenario& s) { return scenario_to_json(s).dump(); })
        .def("__repr__", [](const Scenario& s) {
            return "<Scenario id='" + s.id + "' dim=" + std::to_string(s.dim) + ">";
        });

    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(nlohmann::json::parse(text, nullptr, true, true)); },
          py::arg("text"), "Parse a scenario from a JSON string.");

    m.def("integrate",
          [](const Scenario& s, const std::string& engine, std::optional<int> n_steps) {
              const int n = steps_or_default(s, n_steps);
              const ProjectorPath ppath = s.projector_path();
              TrajectoryRecord rec;
              {
                  py::gil_scoped_release release;
                  if (engine == "effective") {
                      rec = integrate_general(s.hamiltonian, ppath, s.initial_state, s.horizon, n);
                  } else if (engine == "frame") {
                      rec = integrate_rotating_frame(s.hamiltonian, ppath, s.initial_state, s.horizon, n);
                  } else if (engine == "constant") {
                      rec = integrate_constant(s.hamiltonian, s.base_projector, s.initial_state, s.horizon, n);
                  } else {
                      throw ValidationError("unknown engine '" + engine + "' (expected effective, frame or constant)");
                  }
              }
              return trajectory_dict(rec);
          },
          py::arg("scenario"), py::arg("engine") = "effective", py::arg("n_steps") = py::none());

    m.def("run_conditional",
          [](const Scenario& s, int n, int micro_substeps) {
              return strobe_dict(run_conditional(s.hamiltonian, s.projector_path(), s.initial_state, s.horizon, n,
                                                 micro_substeps));
          },
          py::arg("scenario"), py::arg("n"), py::arg("micro_substeps") = kDefaultMicroSubsteps);

    m.def("run_sampled",
          [](const Scenario& s, int n, std::uint64_t seed, int micro_substeps) {
              return strobe_dict(run_sampled(s.hamiltonian, s.projector_path(), s.initial_state, s.horizon, n, seed,
                                             micro_substeps));
          },
          py::arg("scenario"), py::arg("n"), py::arg("seed"), py::arg("micro_substeps") = kDefaultMicroSubsteps);

    m.def("convergence_sweep",
          [](const Scenario& s, std::optional<std::vector<int>> n_list, int micro_substeps) {
              SweepOptions options;
              options.micro_substeps = micro_substeps;
              py::list rows;
              for (const auto& row : convergence_sweep(s.hamiltonian, s.projector_path(), s.initial_state, s.horizon,
                                                       n_list.value_or(s.stroboscopic.n_list), options)) {
                  py::dict d;
                  d["n"] = row.n;
                  d["survival"] = row.survival;
                  d["one_minus_survival"] = row.one_minus_survival;
                  d["state_error"] = row.state_error;
                  rows.append(d);
              }
              return rows;
          },
          py::arg("scenario"), py::arg("n_list") = py::none(), py::arg("micro_substeps") = kDefaultMicroSubsteps);

    m.def("fit_order", &fit_order, py::arg("n"), py::arg("values"),
          "Least-squares slope of log(value) against log(1/n); None if fewer than two positive values.");

    m.def("factorization_defects",
          [](const Operator& h, const Operator& e, const Amplitudes& psi, const std::vector<double>& dts) {
              std::vector<double> out;
              for (const auto& row : short_time_factorization_check(h, Projector(e), StateVector(psi), dts)) {
                  out.push_back(row.defect);
              }
              return out;
          },
          py::arg("h"), py::arg("e"), py::arg("psi"), py::arg("dt_list"));

    m.def("expm_skew_hermitian", &expm_skew_hermitian, py::arg("h"), py::arg("dt"), "exp(-i h dt) for Hermitian h.");

    m.def("verify",
          [](const std::filesystem::path& path) {
              std::ostringstream out;
              std::ostringstream err;
              const int code = cli::cmd_verify(path, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("path"), "Run the invariant suite; returns (exit_code, stdout, stderr).");
}
