// pybind11 bindings for the chemolab core: grids and radial quadrature, the
// IMEX integrator, energy/probe diagnostics, the mild-solution oracle, the
// dense blow-up family, and the Gronwall machinery.

#include <memory>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chemolab/blowup.hpp"
#include "chemolab/config.hpp"
#include "chemolab/energy.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/experiments.hpp"
#include "chemolab/family.hpp"
#include "chemolab/integrator.hpp"
#include "chemolab/operators.hpp"
#include "chemolab/semigroup.hpp"

namespace py = pybind11;
using namespace chemo;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const DoubleArray& a) {
    const auto buf = a.request();
    if (buf.ndim != 1)
        throw ConfigError("expected a 1-d array");
    const double* data = static_cast<const double*>(buf.ptr);
    return Field(data, data + buf.shape[0]);
}

py::array_t<double> to_array(std::span<const double> f) {
    py::array_t<double> out(
        py::array::ShapeContainer{static_cast<py::ssize_t>(f.size())});
    std::copy(f.begin(), f.end(), out.mutable_data());
    return out;
}

py::array_t<double> to_array(const Field& f) {
    return to_array(std::span<const double>(f));
}

GridPtr shared_grid(const RadialGrid& grid) {
    return std::make_shared<RadialGrid>(grid);
}

FieldState make_state(const RadialGrid& grid, DoubleArray u, DoubleArray v,
                      DoubleArray w, double t) {
    FieldState s;
    s.t = t;
    s.u = to_field(u);
    s.v = to_field(v);
    s.w = to_field(w);
    if (s.u.size() != grid.size() || s.v.size() != grid.size() ||
        s.w.size() != grid.size())
        throw ConfigError("field length does not match the grid");
    s.grid = shared_grid(grid);
    return s;
}

py::dict series_dict(const TimeSeries& series) {
    const std::size_t n = series.records.size();
    auto column = [&](auto getter) {
        py::array_t<double> out(
            py::array::ShapeContainer{static_cast<py::ssize_t>(n)});
        double* p = out.mutable_data();
        for (std::size_t i = 0; i < n; ++i)
            p[i] = getter(series.records[i]);
        return out;
    };
    py::dict d;
    d["t"] = column([](const StepRecord& r) { return r.t; });
    d["dt"] = column([](const StepRecord& r) { return r.dt; });
    d["sup_u"] = column([](const StepRecord& r) { return r.sup_u; });
    d["sup_v"] = column([](const StepRecord& r) { return r.sup_v; });
    d["sup_w"] = column([](const StepRecord& r) { return r.sup_w; });
    d["mass_u"] = column([](const StepRecord& r) { return r.mass_u; });
    d["mass_v"] = column([](const StepRecord& r) { return r.mass_v; });
    d["l1_w"] = column([](const StepRecord& r) { return r.l1_w; });
    d["l1_grad_w"] = column([](const StepRecord& r) { return r.l1_grad_w; });
    return d;
}

} // namespace

PYBIND11_MODULE(_chemolab, m) {
    m.doc() = "Radial two-species chemotaxis blow-up laboratory";


    py::register_exception<ConfigError>(m, "ChemolabConfigError",
                                        PyExc_ValueError);
    py::register_exception<EvaluationError>(m, "ChemolabEvaluationError",
                                            PyExc_RuntimeError);

    py::class_<RadialGrid, std::shared_ptr<RadialGrid>>(m, "RadialGrid")
        .def_property_readonly("nodes",
                               [](const RadialGrid& g) { return to_array(g.nodes()); })
        .def_property_readonly(
            "quad_weights",
            [](const RadialGrid& g) { return to_array(g.quad_weights()); })
        .def_property_readonly("dim", &RadialGrid::dim)
        .def_property_readonly("r_max", &RadialGrid::r_max)
        .def_property_readonly("min_spacing", &RadialGrid::min_spacing)
        .def("__len__", &RadialGrid::size);

    m.def(
        "build_grid",
        [](double r_max, int cells, int dim, const std::string& layout,
           double ratio, double first_cell) {
            if (layout == "uniform")
                return std::make_shared<RadialGrid>(
                    RadialGrid::uniform(r_max, cells, dim));
            if (layout != "geometric")
                throw ConfigError("layout must be 'uniform' or 'geometric'");
            if (first_cell > 0.0)
                return std::make_shared<RadialGrid>(
                    RadialGrid::geometric_first_cell(r_max, cells, dim, first_cell));
            return std::make_shared<RadialGrid>(
                RadialGrid::geometric(r_max, cells, dim, ratio));
        },
        py::arg("r_max"), py::arg("cells"), py::arg("dim") = 3,
        py::arg("layout") = "uniform", py::arg("ratio") = 0.99,
        py::arg("first_cell") = 0.0);

    m.def("unit_sphere_area", &unit_sphere_area, py::arg("dim"));
    m.def(
        "integrate_radial",
        [](DoubleArray f, const RadialGrid& g) {
            return integrate_radial(to_field(f), g);
        },
        py::arg("f"), py::arg("grid"));
    m.def(
        "lp_norm",
        [](DoubleArray f, double p, const RadialGrid& g) {
            return lp_norm(to_field(f), p, g);
        },
        py::arg("f"), py::arg("p"), py::arg("grid"));

    m.def(
        "radial_gradient",
        [](DoubleArray f, const RadialGrid& g) {
            return to_array(radial_gradient(to_field(f), g));
        },
        py::arg("f"), py::arg("grid"));
    m.def(
        "radial_laplacian",
        [](DoubleArray f, const RadialGrid& g) {
            return to_array(radial_laplacian(to_field(f), g));
        },
        py::arg("f"), py::arg("grid"));
    m.def(
        "chemotaxis_divergence",
        [](DoubleArray u, DoubleArray w, const RadialGrid& g, bool upwind) {
            return to_array(chemotaxis_divergence(to_field(u), to_field(w), g,
                                                  upwind));
        },
        py::arg("u"), py::arg("w"), py::arg("grid"), py::arg("upwind") = false);
    m.def(
        "build_cutoff",
        [](double R, const RadialGrid& g) {
            return to_array(build_cutoff(R, g).values);
        },
        py::arg("R"), py::arg("grid"));

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double chi, double xi, double lambda, double alpha,
                         double beta, int dim) {
                 ModelParams p{chi, xi, lambda, alpha, beta, dim};
                 p.validate();
                 return p;
             }),
             py::arg("chi") = 1.0, py::arg("xi") = 1.0, py::arg("lambda_") = 1.0,
             py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("dim") = 3)
        .def_readwrite("chi", &ModelParams::chi)
        .def_readwrite("xi", &ModelParams::xi)
        .def_readwrite("lambda_", &ModelParams::lambda)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("dim", &ModelParams::dim);

    py::class_<StepControl>(m, "StepControl")
        .def(py::init<>())
        .def_readwrite("dt_init", &StepControl::dt_init)
        .def_readwrite("dt_min", &StepControl::dt_min)
        .def_readwrite("dt_max", &StepControl::dt_max)
        .def_readwrite("cfl_fraction", &StepControl::cfl_fraction)
        .def_readwrite("safety", &StepControl::safety);

    py::class_<InitialDataSummary>(m, "InitialDataSummary")
        .def_readonly("mass_u", &InitialDataSummary::mass_u)
        .def_readonly("mass_v", &InitialDataSummary::mass_v)
        .def_readonly("mass_w", &InitialDataSummary::mass_w)
        .def_readonly("grad_w_mass", &InitialDataSummary::grad_w_mass)
        .def_readonly("K", &InitialDataSummary::K)
        .def_readonly("K_plus_one", &InitialDataSummary::K_plus_one);

    m.def(
        "summarize_initial",
        [](const RadialGrid& grid, DoubleArray u, DoubleArray v, DoubleArray w) {
            return summarize_initial(make_state(grid, u, v, w, 0.0));
        },
        py::arg("grid"), py::arg("u"), py::arg("v"), py::arg("w"));

    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("t", &EnergyReport::t)
        .def_readonly("dirichlet", &EnergyReport::dirichlet)
        .def_readonly("l2w", &EnergyReport::l2w)
        .def_readonly("coupling", &EnergyReport::coupling)
        .def_readonly("entropy_u", &EnergyReport::entropy_u)
        .def_readonly("entropy_v", &EnergyReport::entropy_v)
        .def_readonly("F", &EnergyReport::F)
        .def_readonly("norm_f", &EnergyReport::norm_f)
        .def_readonly("norm_g1", &EnergyReport::norm_g1)
        .def_readonly("norm_g2", &EnergyReport::norm_g2)
        .def_readonly("D", &EnergyReport::D);

    m.def(
        "energy",
        [](const RadialGrid& grid, DoubleArray u, DoubleArray v, DoubleArray w,
           const ModelParams& params, double t) {
            return energy(make_state(grid, u, v, w, t), params);
        },
        py::arg("grid"), py::arg("u"), py::arg("v"), py::arg("w"),
        py::arg("params") = ModelParams{}, py::arg("t") = 0.0);

    m.def(
        "step",
        [](const RadialGrid& grid, DoubleArray u, DoubleArray v, DoubleArray w,
           const ModelParams& params, double dt, double t, bool upwind) {
            const FieldState next =
                step(make_state(grid, u, v, w, t), params, dt, upwind);
            return py::make_tuple(to_array(next.u), to_array(next.v),
                                  to_array(next.w), next.t);
        },
        py::arg("grid"), py::arg("u"), py::arg("v"), py::arg("w"),
        py::arg("params") = ModelParams{}, py::arg("dt") = 1e-4,
        py::arg("t") = 0.0, py::arg("upwind") = false);

    m.def(
        "simulate",
        [](const RadialGrid& grid, DoubleArray u, DoubleArray v, DoubleArray w,
           const ModelParams& params, double t_end, const StepControl& control,
           double cap_factor, long observe_every, bool upwind) {
            RunOptions opt;
            opt.cap_factor = cap_factor;
            opt.observe_every = observe_every;
            opt.upwind = upwind;
            RunResult run = run_until(make_state(grid, u, v, w, 0.0), params,
                                      t_end, control, opt);
            py::dict d;
            d["termination"] = to_string(run.reason.kind);
            d["t"] = run.reason.t;
            d["detail"] = run.reason.detail;
            d["steps"] = run.steps;
            d["peak_sup_u"] = run.peak_sup_u;
            d["peak_sup_v"] = run.peak_sup_v;
            d["dt_min_reached"] = run.dt_min_reached;
            d["series"] = series_dict(run.series);
            d["u"] = to_array(run.final_state.u);
            d["v"] = to_array(run.final_state.v);
            d["w"] = to_array(run.final_state.w);
            return d;
        },
        py::arg("grid"), py::arg("u"), py::arg("v"), py::arg("w"),
        py::arg("params") = ModelParams{}, py::arg("t_end") = 1.0,
        py::arg("control") = StepControl{}, py::arg("cap_factor") = 1e3,
        py::arg("observe_every") = 20, py::arg("upwind") = false);

    m.def(
        "heat_semigroup",
        [](const RadialGrid& grid, DoubleArray f, double t, double damping,
           long substeps) {
            return to_array(heat_semigroup(to_field(f), t, grid, damping,
                                           substeps));
        },
        py::arg("grid"), py::arg("f"), py::arg("t"), py::arg("damping") = 0.0,
        py::arg("substeps") = 0);

    m.def(
        "picard_iterate",
        [](const RadialGrid& grid, DoubleArray u0, DoubleArray v0, DoubleArray w0,
           double T, int n_iters, const ModelParams& params, long panels) {
            const PicardResult r = picard_iterate(to_field(u0), to_field(v0),
                                                  to_field(w0), T, n_iters,
                                                  params, grid, panels);
            py::dict d;
            d["u"] = to_array(r.u);
            d["v"] = to_array(r.v);
            d["w"] = to_array(r.w);
            d["residuals"] = r.residuals;
            return d;
        },
        py::arg("grid"), py::arg("u0"), py::arg("v0"), py::arg("w0"),
        py::arg("T") = 0.005, py::arg("n_iters") = 6,
        py::arg("params") = ModelParams{}, py::arg("panels") = 32);

    m.def("gamma_integral", [](double lam) { return gamma_integral(lam); },
          py::arg("lam"));

    m.def("phi", &phi, py::arg("eps"), py::arg("dim") = 3);
    m.def("phi_log", &phi_log, py::arg("log_eps"), py::arg("dim") = 3);
    m.def(
        "select_eta",
        [](double r, double target, int dim) {
            const EtaSelection sel = select_eta(r, target, dim);
            return py::make_tuple(sel.eta, sel.log_eta, sel.phi_value);
        },
        py::arg("r"), py::arg("target"), py::arg("dim") = 3);
    m.def("theorem_threshold", &theorem_threshold, py::arg("K"), py::arg("theta"),
          py::arg("C_fit") = 1.0);
    m.def("default_kappa", &default_kappa, py::arg("dim"), py::arg("p"));

    py::class_<DenseFamilySpec>(m, "DenseFamilySpec")
        .def_readonly("j", &DenseFamilySpec::j)
        .def_readonly("r_j", &DenseFamilySpec::r_j)
        .def_readonly("log_eta", &DenseFamilySpec::log_eta)
        .def_readonly("kappa", &DenseFamilySpec::kappa)
        .def_readonly("p", &DenseFamilySpec::p)
        .def_readonly("a_j", &DenseFamilySpec::a_j)
        .def_readonly("b_j", &DenseFamilySpec::b_j)
        .def_readonly("c_j", &DenseFamilySpec::c_j)
        .def_readonly("phi_value", &DenseFamilySpec::phi_value)
        .def_property_readonly("eta", &DenseFamilySpec::eta);

    m.def(
        "make_family_spec",
        [](double amp_u, double amp_v, double amp_w, int j, int dim, double kappa,
           double p, double r_j, double target) {
            return make_family_spec(BaseProfiles{amp_u, amp_v, amp_w}, j, dim,
                                    kappa, p, r_j, target);
        },
        py::arg("amp_u"), py::arg("amp_v"), py::arg("amp_w"), py::arg("j"),
        py::arg("dim") = 3, py::arg("kappa") = 0.25, py::arg("p") = 1.0,
        py::arg("r_j") = 0.5, py::arg("target") = 1.0);
    m.def(
        "make_family_spec_fixed_eps",
        [](double amp_u, double amp_v, double amp_w, int j, int dim, double kappa,
           double p, double r_j, double eps_bar) {
            return make_family_spec_fixed_eps(BaseProfiles{amp_u, amp_v, amp_w},
                                              j, dim, kappa, p, r_j, eps_bar);
        },
        py::arg("amp_u"), py::arg("amp_v"), py::arg("amp_w"), py::arg("j"),
        py::arg("dim") = 3, py::arg("kappa") = 0.25, py::arg("p") = 1.0,
        py::arg("r_j") = 0.5, py::arg("eps_bar") = 1e-2);
    m.def(
        "dense_family",
        [](const DenseFamilySpec& spec, const RadialGrid& grid) {
            const FamilyFields f = dense_family(spec, grid);
            return py::make_tuple(to_array(f.u), to_array(f.v), to_array(f.w));
        },
        py::arg("spec"), py::arg("grid"));
    m.def(
        "family_norms",
        [](const DenseFamilySpec& spec, double r_max) {
            const FamilyNorms n = family_norms(spec, r_max);
            py::dict d;
            d["mass_u"] = n.mass_u;
            d["mass_v"] = n.mass_v;
            d["mass_w"] = n.mass_w;
            d["grad_w_mass"] = n.grad_w_mass;
            d["K"] = n.K;
            d["K_plus_one"] = n.K_plus_one;
            d["lp_distance_u"] = n.lp_distance_u;
            d["h1_distance_w"] = n.h1_distance_w;
            d["w11_distance_w"] = n.w11_distance_w;
            return d;
        },
        py::arg("spec"), py::arg("r_max") = 20.0);
    m.def(
        "family_energy",
        [](const DenseFamilySpec& spec, const ModelParams& params, double r_max) {
            const FamilyEnergy e = family_energy(spec, params, r_max);
            py::dict d;
            d["dirichlet"] = e.dirichlet;
            d["l2w"] = e.l2w;
            d["coupling"] = e.coupling;
            d["entropy_u"] = e.entropy_u;
            d["entropy_v"] = e.entropy_v;
            d["F"] = e.F;
            d["bounded_terms"] = e.bounded_terms;
            d["coupling_lower_bound"] = e.coupling_lower_bound;
            return d;
        },
        py::arg("spec"), py::arg("params") = ModelParams{},
        py::arg("r_max") = 20.0);

    py::class_<GronwallProblem>(m, "GronwallProblem")
        .def(py::init([](double a, double b, double kappa) {
                 return GronwallProblem{a, b, kappa};
             }),
             py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("kappa") = 2.0)
        .def_readwrite("a", &GronwallProblem::gron_a)
        .def_readwrite("b", &GronwallProblem::gron_b)
        .def_readwrite("kappa", &GronwallProblem::gron_kappa);

    m.def("gronwall_bound",
          [](double a, double b, double kappa) {
              return gronwall_bound({a, b, kappa});
          },
          py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("kappa") = 2.0);
    m.def("gronwall_ode_check",
          [](double a, double b, double kappa) {
              return gronwall_ode_check({a, b, kappa});
          },
          py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("kappa") = 2.0);

    m.def(
        "run_experiment",
        [](const std::string& kind, const std::string& out_dir,
           const std::string& config_path, int resolution) {
            RunConfig config = config_path.empty()
                                   ? default_config(experiment_kind_from_string(kind))
                                   : parse_config_file(config_path);
            config.experiment.kind = experiment_kind_from_string(kind);
            if (resolution > 0)
                config.grid.nodes = resolution;
            const ExperimentResult res = run_experiment(config, out_dir);
            return res.exit_code;
        },
        py::arg("kind"), py::arg("out_dir"), py::arg("config_path") = "",
        py::arg("resolution") = 0);
}
