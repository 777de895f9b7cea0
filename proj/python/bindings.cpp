#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbsim/config.hpp"
#include "sbsim/diagnostics.hpp"
#include "sbsim/error.hpp"
#include "sbsim/io.hpp"
#include "sbsim/ldp.hpp"
#include "sbsim/mollifier.hpp"
#include "sbsim/solver.hpp"
#include "sbsim/spectral.hpp"
#include "sbsim/transport.hpp"

namespace py = pybind11;
using namespace sbsim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> field_shape(const Grid& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dimension()), g.resolution());
}

Grid grid_of(const Array& a, int leading) {
  const int d = static_cast<int>(a.ndim()) - leading;
  if (d != 2 && d != 3) throw DimensionError("expected a 2D or 3D sample array");
  const auto n = a.shape(leading);
  for (int ax = leading; ax < a.ndim(); ++ax) {
    if (a.shape(ax) != n) throw ValidationError("sample arrays must have equal extent along every axis");
  }
  if (leading == 1 && a.shape(0) != d) throw ValidationError("velocity array needs one component per axis");
  return Grid(d, static_cast<int>(n));
}

ScalarField to_scalar(const Array& a) {
  const Grid g = grid_of(a, 0);
  return ScalarField::from_physical(g, std::vector<double>(a.data(), a.data() + g.size()));
}

VectorField to_vector(const Array& a) {
  const Grid g = grid_of(a, 1);
  std::vector<ScalarField> comps;
  for (int c = 0; c < g.dimension(); ++c) {
    const double* p = a.data() + static_cast<std::size_t>(c) * g.size();
    comps.push_back(ScalarField::from_physical(g, std::vector<double>(p, p + g.size())));
  }
  return VectorField(std::move(comps));
}

Array from_scalar(const ScalarField& f) {
  Array out(field_shape(f.grid()));
  auto s = f.physical();
  std::copy(s.begin(), s.end(), out.mutable_data());
  return out;
}

Array from_vector(const VectorField& v) {
  auto shape = field_shape(v.grid());
  shape.insert(shape.begin(), v.dimension());
  Array out(shape);
  double* p = out.mutable_data();
  for (int c = 0; c < v.dimension(); ++c) {
    auto s = v[c].physical();
    p = std::copy(s.begin(), s.end(), p);
  }
  return out;
}

py::dict state_dict(const State& s) {
  py::dict d;
  d["t"] = s.t;
  d["u"] = from_vector(s.u);
  d["theta"] = from_scalar(s.theta);
  return d;
}

State to_state(const Array& u, const Array& theta, double t) { return make_state(to_vector(u), to_scalar(theta), t); }

py::dict record_dict(const TrajectoryRecord& rec) {
  py::dict d;
  const auto& cols = timeseries_columns();
  std::vector<std::vector<double>> data(cols.size());
  for (const auto& r : rec.rows) {
    const double vals[] = {r.t,          r.l2_u,          r.hs_u,       r.hs1_u, r.hs_theta, r.linf_grad_u,
                           r.linf_grad_theta, r.linf_theta, r.l2_w,    r.l4_grad_w, r.phi_value, r.energy_residual,
                           r.stop_flag ? 1.0 : 0.0};
    for (std::size_t i = 0; i < cols.size(); ++i) data[i].push_back(vals[i]);
  }
  py::dict series;
  for (std::size_t i = 0; i < cols.size(); ++i) series[py::str(cols[i])] = py::array(py::cast(data[i]));
  d["timeseries"] = series;
  d["stop_reason"] = rec.stop_reason;
  d["stop_time"] = rec.stop_time ? py::cast(*rec.stop_time) : py::none();
  d["blew_up"] = rec.blew_up;
  d["blowup_diagnostic"] = rec.blowup_diagnostic;
  d["final"] = rec.final_state ? py::object(state_dict(*rec.final_state)) : py::none();
  return d;
}

RunConfig with_seed(RunConfig rc, std::optional<std::uint64_t> seed) {
  if (seed) rc.seed = *seed;
  return rc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudo-spectral stochastic Boussinesq simulator";
  m.attr("__version__") = SBSIM_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", validation.ptr());
  py::register_exception<BlowUpError>(m, "BlowUpError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int>(), py::arg("dimension"), py::arg("resolution"))
      .def_property_readonly("dimension", &Grid::dimension)
      .def_property_readonly("resolution", &Grid::resolution)
      .def_property_readonly("spacing", &Grid::spacing)
      .def("coordinates", [](const Grid& g) {
        std::vector<Array> axes;
        for (int a = 0; a < g.dimension(); ++a) {
          Array x(field_shape(g));
          for (std::size_t i = 0; i < g.size(); ++i) x.mutable_data()[i] = g.coordinate(i, a);
          axes.push_back(std::move(x));
        }
        return axes;
      });

  // field operations on sample arrays: scalars (n, n[, n]), vectors (d, n, n[, n])
  m.def("leray_project", [](const Array& u) { return from_vector(leray_project(to_vector(u))); }, py::arg("u"));
  m.def("divergence", [](const Array& u) { return from_scalar(divergence(to_vector(u))); }, py::arg("u"));
  m.def("curl_2d", [](const Array& u) { return from_scalar(curl_2d(to_vector(u))); }, py::arg("u"));
  m.def("biot_savart", [](const Array& w) { return from_vector(biot_savart(to_scalar(w))); }, py::arg("w"));
  m.def(
      "sobolev_norm",
      [](const Array& f, int s, bool vector) {
        return vector ? sobolev_norm(to_vector(f), s) : sobolev_norm(to_scalar(f), s);
      },
      py::arg("field"), py::arg("s"), py::arg("vector") = false);
  m.def("lp_norm", [](const Array& f, double p) { return lp_norm(to_scalar(f), p); }, py::arg("field"), py::arg("p"));
  m.def("gradient_sup", [](const Array& f) { return grad_sup(to_scalar(f)); }, py::arg("theta"));
  m.def("mollify", [](const Array& f, double eps) { return from_scalar(mollify(to_scalar(f), MollifierSpec(eps))); },
        py::arg("field"), py::arg("epsilon"));
  m.def("smoothing_gain_bound", &smoothing_gain_bound, py::arg("epsilon"));
  m.def("cutoff", &cutoff, py::arg("x"), py::arg("R"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("dimension", [](const RunConfig& c) { return c.solver.grid.dimension(); })
      .def_property_readonly("resolution", [](const RunConfig& c) { return c.solver.grid.resolution(); })
      .def_property_readonly("modes", [](const RunConfig& c) { return c.solver.spec.size(); })
      .def_property(
          "dt", [](const RunConfig& c) { return c.solver.dt; }, [](RunConfig& c, double v) { c.solver.dt = v; })
      .def_property(
          "t_end", [](const RunConfig& c) { return c.solver.t_end; },
          [](RunConfig& c, double v) { c.solver.t_end = v; })
      .def_property(
          "epsilon", [](const RunConfig& c) { return c.solver.epsilon; },
          [](RunConfig& c, double v) { c.solver.epsilon = v; })
      .def_property(
          "cutoff_R", [](const RunConfig& c) { return c.solver.cutoff_R; },
          [](RunConfig& c, double v) { c.solver.cutoff_R = v; })
      .def_readwrite("seed", &RunConfig::seed)
      .def_property_readonly("source_text", [](const RunConfig& c) { return c.source_text; })
      .def("validate", [](const RunConfig& c) { c.solver.validate(); });

  m.def("parse_config", &parse_config, py::arg("path"));
  m.def("parse_config_string", &parse_config_string, py::arg("text"), py::arg("base_dir") = ".");
  m.def("initial_state", [](const RunConfig& c) { return state_dict(build_initial_state(c)); }, py::arg("config"));

  m.def(
      "simulate",
      [](const RunConfig& c, std::optional<std::uint64_t> seed) {
        const RunConfig rc = with_seed(c, seed);
        const State s0 = build_initial_state(rc);
        const RandomStream stream(rc.seed, 0);
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          rec = run(rc.solver, s0, &stream);
        }
        return record_dict(rec);
      },
      py::arg("config"), py::arg("seed") = py::none());

  m.def(
      "skeleton",
      [](const RunConfig& c, std::optional<std::string> control_csv) {
        const State s0 = build_initial_state(c);
        Control h = control_csv ? parse_control_text(*control_csv, c.solver.spec.size(), c.solver.t_end)
                                : c.solver.control.value_or(Control::zero(c.solver.spec.size(), c.solver.t_end));
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          rec = solve_skeleton(c.solver, s0, h);
        }
        return record_dict(rec);
      },
      py::arg("config"), py::arg("control_csv") = py::none());

  m.def(
      "ensemble",
      [](const RunConfig& c, std::size_t n_paths, std::optional<std::uint64_t> seed) {
        const RunConfig rc = with_seed(c, seed);
        const State s0 = build_initial_state(rc);
        EnsembleSummary sum;
        {
          py::gil_scoped_release release;
          sum = run_ensemble(rc.solver, s0, n_paths, rc.seed);
        }
        py::dict out;
        out["n_paths"] = sum.n_paths;
        out["blown_up"] = sum.blown_up;
        py::dict fs;
        for (std::size_t i = 0; i < sum.functionals.size(); ++i) {
          const auto& f = sum.functionals[i];
          py::dict e;
          e["mean"] = f.mean;
          e["variance"] = f.variance;
          e["max"] = f.max;
          e["values"] = py::array(py::cast(sum.values[i]));
          fs[py::str(f.name)] = e;
        }
        out["functionals"] = fs;
        return out;
      },
      py::arg("config"), py::arg("n_paths"), py::arg("seed") = py::none());

  m.def(
      "write_snapshot",
      [](const std::string& path, const Array& u, const Array& theta, double t) {
        write_snapshot(to_state(u, theta, t), path);
      },
      py::arg("path"), py::arg("u"), py::arg("theta"), py::arg("t") = 0.0);
  m.def("read_snapshot", [](const std::string& path) { return state_dict(read_snapshot(path)); }, py::arg("path"));

  py::class_<LinearModeOracle>(m, "LinearModeOracle")
      .def(py::init([](double kappa, double b, double T) { return LinearModeOracle{kappa, b, T}; }),
           py::arg("kappa") = 1.0, py::arg("b") = 1.0, py::arg("T") = 1.0)
      .def("variance", &LinearModeOracle::variance)
      .def("minimal_cost", &LinearModeOracle::minimal_cost, py::arg("a"))
      .def("finite_eps_rate", &LinearModeOracle::finite_eps_rate, py::arg("a"), py::arg("epsilon"));

  m.def(
      "control_cost",
      [](const std::string& control_csv, const RunConfig& c) {
        return control_cost(parse_control_text(control_csv, c.solver.spec.size(), c.solver.t_end), c.solver.spec);
      },
      py::arg("control_csv"), py::arg("config"));

  m.def(
      "rare_event",
      [](const RunConfig& c, double epsilon, std::size_t n_paths, std::optional<std::uint64_t> seed) {
        const State s0 = build_initial_state(c);
        const RareEvent ev = build_event(c);
        McEstimate e;
        {
          py::gil_scoped_release release;
          e = mc_rare_event(c.solver, s0, ev, epsilon, n_paths, seed.value_or(c.seed));
        }
        py::dict out;
        out["p_hat"] = e.p_hat;
        out["ci_low"] = e.ci_low;
        out["ci_high"] = e.ci_high;
        out["hits"] = e.hits;
        out["n_paths"] = e.n_paths;
        return out;
      },
      py::arg("config"), py::arg("epsilon"), py::arg("n_paths"), py::arg("seed") = py::none());

  m.def(
      "minimize_cost",
      [](const RunConfig& c) {
        const State s0 = build_initial_state(c);
        const RareEvent ev = build_event(c);
        const ControlFamily fam = build_family(c);
        CostResult r;
        {
          py::gil_scoped_release release;
          r = minimize_cost(ev, fam, c.solver, s0);
        }
        py::dict out;
        out["feasible"] = r.feasible;
        out["cost"] = r.cost;
        out["params"] = r.params;
        out["skeleton_solves"] = r.skeleton_solves;
        out["message"] = r.message;
        return out;
      },
      py::arg("config"));

  m.def(
      "varadhan_table",
      [](const RunConfig& c, std::optional<std::size_t> n_paths) {
        const State s0 = build_initial_state(c);
        const RareEvent ev = build_event(c);
        const ControlFamily fam = build_family(c);
        VaradhanTable t;
        {
          py::gil_scoped_release release;
          t = varadhan_gap(c.solver, s0, ev, c.ldp.epsilons, n_paths.value_or(c.ldp.paths), fam, c.seed);
        }
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["epsilon"] = r.epsilon;
          d["n_paths"] = r.n_paths;
          d["p_hat"] = r.p_hat;
          d["ci_low"] = r.ci_low;
          d["ci_high"] = r.ci_high;
          d["neg_eps_log_p"] = r.neg_eps_log_p;
          d["best_cost"] = r.best_cost;
          rows.append(d);
        }
        return py::make_tuple(rows, t.monotone);
      },
      py::arg("config"), py::arg("n_paths") = py::none());

  m.def(
      "small_noise_distance",
      [](const RunConfig& c, double epsilon, std::size_t n_paths, std::optional<std::uint64_t> seed) {
        const State s0 = build_initial_state(c);
        SmallNoiseEstimate e;
        {
          py::gil_scoped_release release;
          e = small_noise_distance(c.solver, s0, epsilon, n_paths, seed.value_or(c.seed));
        }
        return py::make_tuple(e.mean, e.standard_error);
      },
      py::arg("config"), py::arg("epsilon"), py::arg("n_paths"), py::arg("seed") = py::none());
  m.def("loglog_slope", &loglog_slope, py::arg("x"), py::arg("y"));

  m.def(
      "normal",
      [](std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint32_t mode) {
        return RandomStream(seed, path).normal(step, mode);
      },
      py::arg("seed"), py::arg("path"), py::arg("step"), py::arg("mode"));
}
