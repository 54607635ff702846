// Python bindings for the cns core: fields and transforms, the solver, the
// Littlewood-Paley projections, concentration diagnostics, Carleman weights
// and reports, and the experiment runner. Reports cross the boundary as
// plain dicts (JSON-shaped).

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cns/experiment.hpp"
#include "cns/snapshot_io.hpp"
#include "cns/spacetime_field.hpp"

namespace py = pybind11;
using namespace cns;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return py::none();
        case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& v : j) out.append(json_to_py(v));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

py::array_t<std::complex<double>> coeffs_array(const SpectralField& f) {
    const int n = f.grid.n;
    py::array_t<std::complex<double>> out({f.components, n, n, n});
    std::copy(f.coeffs.begin(), f.coeffs.end(), out.mutable_data());
    return out;
}

py::array_t<double> values_array(const RealField& f) {
    const int n = f.grid.n;
    py::array_t<double> out({f.components, n, n, n});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_cns, m) {
    m.doc() = "pseudo-spectral Navier-Stokes simulator and verification toolkit";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SolverHaltError>(m, "SolverHaltError", PyExc_RuntimeError);

    py::class_<Grid3>(m, "Grid3")
        .def(py::init<int, double>(), py::arg("n"), py::arg("L"))
        .def_readonly("n", &Grid3::n)
        .def_readonly("L", &Grid3::L)
        .def_property_readonly("nyquist", &Grid3::nyquist)
        .def("__repr__",
             [](const Grid3& g) { return "Grid3(n=" + std::to_string(g.n) + ", L=" + std::to_string(g.L) + ")"; });

    py::class_<SpectralField>(m, "SpectralField")
        .def(py::init<const Grid3&, int>(), py::arg("grid"), py::arg("components"))
        .def_readonly("grid", &SpectralField::grid)
        .def_readonly("components", &SpectralField::components)
        .def("coeffs", &coeffs_array, "complex coefficients, shape (components, n, n, n)")
        .def("set_coeffs",
             [](SpectralField& f, py::array_t<std::complex<double>, py::array::c_style> arr) {
                 require(arr.size() == static_cast<py::ssize_t>(f.coeffs.size()),
                         "set_coeffs: shape mismatch");
                 std::copy(arr.data(), arr.data() + arr.size(), f.coeffs.begin());
             })
        .def("__mul__", [](const SpectralField& f, double s) { return f * s; })
        .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
        .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; });

    py::class_<RealField>(m, "RealField")
        .def(py::init<const Grid3&, int>(), py::arg("grid"), py::arg("components"))
        .def_readonly("grid", &RealField::grid)
        .def_readonly("components", &RealField::components)
        .def("values", &values_array, "real samples, shape (components, n, n, n)")
        .def("set_values", [](RealField& f, py::array_t<double, py::array::c_style> arr) {
            require(arr.size() == static_cast<py::ssize_t>(f.values.size()), "set_values: shape mismatch");
            std::copy(arr.data(), arr.data() + arr.size(), f.values.begin());
        });

    // spectral core
    m.def("forward_transform", &spectral::forward_transform);
    m.def("inverse_transform", &spectral::inverse_transform, py::arg("field"), py::arg("hermitian_tol") = 1e-10);
    m.def("leray_project", &spectral::leray_project);
    m.def("heat_propagate", &spectral::heat_propagate);
    m.def("curl", &spectral::curl);
    m.def("divergence", &spectral::divergence);
    m.def("derivative", &spectral::derivative);
    m.def("inverse_laplacian", &spectral::inverse_laplacian);
    m.def("lp_norm", &spectral::lp_norm);
    m.def("l2_norm", &spectral::l2_norm);
    m.def("eval_at", [](const SpectralField& f, const std::array<double, 3>& x) {
        const Vec3 v = spectral::eval_at(f, to_vec3(x));
        return std::array<double, 3>{v[0], v[1], v[2]};
    });
    m.def("relative_divergence", &spectral::relative_divergence);
    m.def("write_snapshot", &write_snapshot);
    m.def("read_snapshot", [](const std::string& path) {
        const Snapshot snap = read_snapshot(path);
        return py::make_tuple(snap.field, snap.time);
    });

    // Littlewood-Paley
    py::class_<lp::BumpProfile>(m, "BumpProfile")
        .def(py::init<>())
        .def("__call__", &lp::BumpProfile::operator());
    py::class_<lp::LPProjector>(m, "LPProjector")
        .def(py::init<const Grid3&, lp::BumpProfile>(), py::arg("grid"), py::arg("profile") = lp::BumpProfile())
        .def("project_leq", &lp::LPProjector::project_leq)
        .def("project_band", &lp::LPProjector::project_band)
        .def("project_tilde", &lp::LPProjector::project_tilde)
        .def("project_gt", &lp::LPProjector::project_gt);
    m.def("dyadic_ladder", &lp::dyadic_ladder);
    m.def("bernstein_report",
          [](const lp::LPProjector& proj, const SpectralField& f, double N, int j, double p, double q,
             double heat_time) { return json_to_py(lp::bernstein_report(proj, f, N, j, p, q, heat_time).to_json()); },
          py::arg("projector"), py::arg("field"), py::arg("N"), py::arg("j"), py::arg("p"), py::arg("q"),
          py::arg("heat_time") = 0.0);

    // solver
    py::class_<solver::SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("grid", &solver::SolverConfig::grid)
        .def_readwrite("dt", &solver::SolverConfig::dt)
        .def_readwrite("t_end", &solver::SolverConfig::t_end)
        .def_readwrite("dealias_fraction", &solver::SolverConfig::dealias_fraction)
        .def_readwrite("snapshot_stride", &solver::SolverConfig::snapshot_stride)
        .def_readwrite("start_time", &solver::SolverConfig::start_time);

    py::class_<solver::SnapshotDiagnostics>(m, "SnapshotDiagnostics")
        .def_readonly("energy", &solver::SnapshotDiagnostics::energy)
        .def_readonly("enstrophy", &solver::SnapshotDiagnostics::enstrophy)
        .def_readonly("l3_norm", &solver::SnapshotDiagnostics::l3_norm)
        .def_readonly("linf_norm", &solver::SnapshotDiagnostics::linf_norm)
        .def_readonly("dissipation_accum", &solver::SnapshotDiagnostics::dissipation_accum)
        .def_readonly("total_speed_accum", &solver::SnapshotDiagnostics::total_speed_accum);

    py::class_<solver::TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("times", &solver::TrajectoryRecord::times)
        .def_readonly("snapshots", &solver::TrajectoryRecord::snapshots)
        .def_readonly("diagnostics", &solver::TrajectoryRecord::diagnostics)
        .def_property_readonly("halted", [](const solver::TrajectoryRecord& t) { return t.halt.has_value(); })
        .def("size", &solver::TrajectoryRecord::size);

    m.def("taylor_green", &solver::taylor_green, py::arg("grid"), py::arg("amplitude") = 1.0);
    m.def("shear_flow", &solver::shear_flow, py::arg("grid"), py::arg("amplitude") = 1.0);
    m.def("random_divfree_band", &solver::random_divfree_band, py::arg("grid"), py::arg("seed"), py::arg("k_min"),
          py::arg("k_max"), py::arg("amplitude"), py::arg("envelope_sigma") = 0.0);
    m.def("nonlinear_term", &solver::nonlinear_term, py::arg("field"), py::arg("dealias_fraction") = 2.0 / 3.0);
    m.def("run", &solver::run);
    m.def("pressure_field", &solver::pressure_field, py::arg("field"), py::arg("dealias_fraction") = 2.0 / 3.0);
    m.def("rescale_solution", &solver::rescale_solution);
    m.def("residual_check", [](const solver::TrajectoryRecord& traj) {
        const auto rep = solver::residual_check(traj);
        py::dict out;
        out["times"] = rep.times;
        out["residuals"] = rep.residuals;
        out["max_residual"] = rep.max_residual;
        return out;
    });
    m.def("energy_inequality_violation", &solver::energy_inequality_violation);

    py::class_<solver::DuhamelSplit>(m, "DuhamelSplit")
        .def_readonly("t_ref", &solver::DuhamelSplit::t_ref)
        .def_readonly("sup_unl_l2", &solver::DuhamelSplit::sup_unl_l2)
        .def_readonly("dissipation_unl", &solver::DuhamelSplit::dissipation_unl)
        .def("linear_at", &solver::DuhamelSplit::linear_at)
        .def("nonlinear_at", &solver::DuhamelSplit::nonlinear_at);
    m.def("duhamel_split", &solver::duhamel_split);

    // concentration
    py::class_<concentration::SurrogateConstants>(m, "SurrogateConstants")
        .def(py::init<double, double>(), py::arg("A"), py::arg("c0"))
        .def_readonly("A", &concentration::SurrogateConstants::A)
        .def_readonly("c0", &concentration::SurrogateConstants::c0)
        .def("A_j", &concentration::SurrogateConstants::A_j);

    py::class_<concentration::ConcentrationEvent>(m, "ConcentrationEvent")
        .def(py::init([](double t, const std::array<double, 3>& x, double N, double value) {
                 return concentration::ConcentrationEvent{t, to_vec3(x), N, value};
             }),
             py::arg("t"), py::arg("x"), py::arg("N"), py::arg("value") = 0.0)
        .def_readonly("t", &concentration::ConcentrationEvent::t)
        .def_readonly("N", &concentration::ConcentrationEvent::N)
        .def_readonly("value", &concentration::ConcentrationEvent::value)
        .def_property_readonly("x", [](const concentration::ConcentrationEvent& e) {
            return std::array<double, 3>{e.x[0], e.x[1], e.x[2]};
        });

    m.def("concentration_value", [](const solver::TrajectoryRecord& traj, double t, const std::array<double, 3>& x,
                                    double N) { return concentration::concentration_value(traj, t, to_vec3(x), N); });
    m.def("scan_concentrations", &concentration::scan_concentrations);
    m.def("back_propagate_chain",
          [](const solver::TrajectoryRecord& traj, const concentration::ConcentrationEvent& seed,
             const concentration::SurrogateConstants& consts) {
              const auto windows = concentration::ChainWindows::from_constants(consts);
              return json_to_py(concentration::back_propagate_chain(traj, seed, consts, windows).to_json());
          });
    m.def("total_speed", [](const solver::TrajectoryRecord& traj, double a, double b) {
        const auto ts = concentration::total_speed(traj, a, b);
        return py::make_tuple(ts.integral, ts.ratio);
    });
    m.def("find_epoch", [](const solver::TrajectoryRecord& traj, double a, double b, int subdivisions) {
        return json_to_py(concentration::find_epoch(traj, a, b, subdivisions).to_json());
    });
    m.def("find_annulus", [](const solver::TrajectoryRecord& traj, const std::array<double, 3>& x0, double T_prime,
                             double R0, double kappa, int n_scales) {
        return json_to_py(concentration::find_annulus(traj, to_vec3(x0), T_prime, R0, kappa, n_scales).to_json());
    });
    m.def("pointwise_derivative_report", [](const solver::TrajectoryRecord& traj, double t, double N) {
        return json_to_py(concentration::pointwise_derivative_report(traj, t, N).to_json());
    });

    // Carleman weights and reports
    py::class_<carleman::CarlemanWeight>(m, "CarlemanWeight")
        .def("g", [](const carleman::CarlemanWeight& w, double t, const std::array<double, 3>& x) {
            return w.g(t, to_vec3(x));
        })
        .def("F", [](const carleman::CarlemanWeight& w, double t, const std::array<double, 3>& x) {
            return w.F(t, to_vec3(x));
        })
        .def("LF", [](const carleman::CarlemanWeight& w, double t, const std::array<double, 3>& x) {
            return w.LF(t, to_vec3(x));
        })
        .def_property_readonly("params", [](const carleman::CarlemanWeight& w) { return json_to_py(w.params); });

    m.def("weight_first", [](double C0, double T, double T0, double r_minus, double r_plus, bool paper_alpha) {
        carleman::WeightFirstParams p;
        p.C0 = C0;
        p.T = T;
        p.T0 = T0;
        p.r_minus = r_minus;
        p.r_plus = r_plus;
        p.variant = paper_alpha ? carleman::AlphaVariant::PaperT2 : carleman::AlphaVariant::LinearT;
        return carleman::weight_first(p);
    }, py::arg("C0"), py::arg("T"), py::arg("T0"), py::arg("r_minus"), py::arg("r_plus"),
       py::arg("paper_alpha") = true);
    m.def("weight_second", [](double alpha, double T, double T0, double t1, double r) {
        carleman::WeightSecondParams p;
        p.alpha = alpha;
        p.T = T;
        p.T0 = T0;
        p.t1 = t1;
        p.r = r;
        return carleman::weight_second(p);
    }, py::arg("alpha"), py::arg("T"), py::arg("T0"), py::arg("t1"), py::arg("r"));
    m.def("weight_consistency_check", [](const carleman::CarlemanWeight& w, int n_points, std::uint64_t seed) {
        const auto c = carleman::weight_consistency_check(w, n_points, seed);
        py::dict out;
        out["max_rel_err_F"] = c.max_rel_err_F;
        out["max_rel_err_LF"] = c.max_rel_err_LF;
        out["samples"] = c.samples;
        out["f_sign_ok"] = c.f_sign_ok;
        return out;
    });

    // enstrophy ledgers
    py::class_<carleman::MovingCutoff>(m, "MovingCutoff")
        .def(py::init([](const std::array<double, 3>& center, double R_minus0, double R_plus0, double A6, double C0) {
                 carleman::MovingCutoff c;
                 c.center = to_vec3(center);
                 c.R_minus0 = R_minus0;
                 c.R_plus0 = R_plus0;
                 c.A6 = A6;
                 c.C0 = C0;
                 return c;
             }),
             py::arg("center"), py::arg("R_minus0"), py::arg("R_plus0"), py::arg("A6"), py::arg("C0"));

    auto ledger_dict = [](const carleman::EnstrophyLedger& ledger) {
        py::dict out;
        out["times"] = ledger.times;
        out["E"] = ledger.E;
        py::list terms;
        for (const auto& t : ledger.terms) terms.append(std::vector<double>(t.begin(), t.end()));
        out["terms"] = terms;
        out["fd_dEdt"] = ledger.fd_dEdt;
        out["defect"] = ledger.defect;
        out["n_terms"] = ledger.n_terms;
        out["meta"] = json_to_py(ledger.meta);
        out["csv"] = carleman::ledger_csv(ledger);
        return out;
    };
    m.def("global_enstrophy_ledger",
          [ledger_dict](const solver::DuhamelSplit& split, const solver::TrajectoryRecord& traj, double a, double b) {
              return ledger_dict(carleman::global_enstrophy_ledger(split, traj, a, b));
          });
    m.def("local_enstrophy_ledger",
          [ledger_dict](const solver::DuhamelSplit& split, const solver::TrajectoryRecord& traj,
                        const carleman::MovingCutoff& cutoff, double a, double b) {
              return ledger_dict(carleman::local_enstrophy_ledger(split, traj, cutoff, a, b));
          });

    // experiments and the pipeline
    m.def("run_experiment", [](const std::map<std::string, std::string>& config, const std::string& out_dir,
                               bool global_ledger, bool local_ledger) {
        experiment::ExperimentSpec spec;
        apply_overrides(spec.config, config);
        spec.out_dir = out_dir;
        spec.global_ledger = global_ledger;
        spec.local_ledger = local_ledger;
        if (local_ledger) {
            const double L = spec.config.solver.grid.L;
            spec.cutoff.center = {L / 2.0, L / 2.0, L / 2.0};
            spec.cutoff.R_minus0 = L / 10.0;
            spec.cutoff.R_plus0 = 0.45 * L;
            spec.cutoff.A6 = L / 20.0;
            spec.cutoff.C0 = 2.0;
        }
        const auto result = experiment::run_experiment(spec);
        py::dict out;
        out["halted"] = result.halted;
        out["manifest"] = json_to_py(result.manifest.to_json());
        return out;
    }, py::arg("config"), py::arg("out_dir"), py::arg("global_ledger") = false, py::arg("local_ledger") = false);
    m.def("load_trajectory", &experiment::load_trajectory);
    m.def("pipeline_main_estimate",
          [](const solver::TrajectoryRecord& traj, const concentration::ConcentrationEvent& seed,
             const concentration::SurrogateConstants& consts) {
              return json_to_py(experiment::pipeline_main_estimate(traj, seed, consts).to_json());
          });
}
