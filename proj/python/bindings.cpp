#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neel/dynamics.hpp"
#include "neel/energy.hpp"
#include "neel/io.hpp"
#include "neel/linops.hpp"
#include "neel/profiles.hpp"
#include "neel/region.hpp"
#include "neel/spectra.hpp"

namespace py = pybind11;
using namespace neel;

namespace {

py::array_t<double> to_array(const Vec& v) { return py::array_t<double>(v.size(), v.data()); }

Mode parse_mode(const std::string& s) {
  if (s == "nonlocal") return Mode::nonlocal;
  if (s == "local") return Mode::local;
  throw std::invalid_argument("mode must be 'nonlocal' or 'local'");
}

OpKind parse_op(const std::string& s) {
  if (s == "L") return OpKind::L;
  if (s == "Lc") return OpKind::Lc;
  if (s == "A") return OpKind::A;
  if (s == "Ac") return OpKind::Ac;
  throw std::invalid_argument("op must be one of L, Lc, A, Ac");
}

py::dict spectrum(const Profile& p, const std::string& op, double nu) {
  DiscretizedOperator d;
  switch (parse_op(op)) {
    case OpKind::L: d = build_L(p); break;
    case OpKind::Lc: d = build_Lc(p); break;
    case OpKind::A: d = build_block(p, false, nu); break;
    default: d = build_block(p, true, nu); break;
  }
  SpectrumReport r = eig_report(d, p);
  py::dict out;
  out["eigenvalues"] = py::array_t<cplx>(r.eigenvalues.size(), r.eigenvalues.data());
  out["lambda0"] = r.lambda0;
  out["gap"] = r.gap;
  out["Lambda0"] = r.Lambda0;
  out["max_re_rest"] = r.max_re_rest();
  out["count_inside_0.25"] = r.count_inside(0.25);
  out["periodization"] = r.periodization;
  return out;
}

py::dict check_dict(const LemmaCheck& c) {
  py::dict d;
  d["samples"] = c.samples;
  d["violations"] = c.violations;
  d["min_margin"] = c.min_margin;
  d["holds"] = c.holds();
  return d;
}

}  // namespace

PYBIND11_MODULE(_neelwall, m) {
  m.doc() = "Moving Neel wall profiles, spectra and dynamics";

  py::class_<Profile>(m, "Profile")
      .def_property_readonly("L", [](const Profile& p) { return p.theta.grid.L; })
      .def_property_readonly("n", [](const Profile& p) { return p.theta.grid.n; })
      .def_property_readonly("x", [](const Profile& p) { return to_array(p.theta.grid.xs()); })
      .def_property_readonly("theta", [](const Profile& p) { return to_array(p.theta.theta()); })
      .def_property_readonly("remainder", [](const Profile& p) { return to_array(p.theta.values); })
      .def_readonly("H", &Profile::H)
      .def_readonly("c", &Profile::c)
      .def_readonly("nu", &Profile::nu)
      .def_readonly("residual", &Profile::residual)
      .def_readonly("iterations", &Profile::iterations)
      .def("energy", [](const Profile& p) { return energy(p.theta, p.mode).total; })
      .def("mass", [](const Profile& p) { return wall_mass(p); })
      .def("wall_position", [](const Profile& p) { return wall_position(p.theta); });

  m.def(
      "solve_static",
      [](double L, int n, double tol, const std::string& mode) { return solve_static(Grid(L, n), tol, parse_mode(mode)); },
      py::arg("L") = 40.0, py::arg("n") = 2048, py::arg("tol") = 1e-10, py::arg("mode") = "nonlocal");
  m.def(
      "solve_traveling",
      [](const Profile& stat, double H, double nu, double tol) {
        TravelingOptions opt;
        opt.tol = tol;
        opt.mode = stat.mode;
        return solve_traveling(stat.theta.grid, H, nu, stat, stat, opt);
      },
      py::arg("static_wall"), py::arg("H"), py::arg("nu") = 1.0, py::arg("tol") = 1e-11);
  m.def(
      "mobility",
      [](const Profile& stat, double nu, const std::vector<double>& H) {
        MobilityResult r = mobility(stat.theta.grid, nu, H, &stat, stat.mode);
        py::dict d;
        d["M"] = r.M;
        d["slope"] = r.slope;
        d["beta_measured"] = r.beta_measured;
        d["beta_predicted"] = r.beta_predicted;
        d["H"] = r.H;
        d["c"] = r.c;
        d["failures"] = r.failures;
        return d;
      },
      py::arg("static_wall"), py::arg("nu"), py::arg("H"));
  m.def(
      "energy",
      [](double L, py::array_t<double, py::array::c_style | py::array::forcecast> remainder, const std::string& mode) {
        Vec v(remainder.data(), remainder.data() + remainder.size());
        Grid g(L, static_cast<int>(v.size()));
        Field th(g, std::move(v), Background::wall);
        EnergyBreakdown e = energy(th, parse_mode(mode));
        return py::dict(py::arg("exchange") = e.exchange, py::arg("stray") = e.stray,
                        py::arg("anisotropy") = e.anisotropy, py::arg("total") = e.total);
      },
      py::arg("L"), py::arg("remainder"), py::arg("mode") = "nonlocal");
  m.def("spectrum", &spectrum, py::arg("profile"), py::arg("op") = "L", py::arg("nu") = 1.0);
  m.def("pencil_roots", &pencil_roots, py::arg("Lambda"), py::arg("nu"));
  m.def(
      "damped_mode",
      [](double Lambda, double nu, double dt, double t_end) {
        ModeResult r = damped_mode(Lambda, nu, dt, t_end, Integrator::semi_implicit);
        return py::make_tuple(r.u, r.v, r.u_exact, r.v_exact);
      },
      py::arg("Lambda"), py::arg("nu"), py::arg("dt"), py::arg("t_end"));
  m.def(
      "orbital",
      [](const Profile& ref, double amplitude, const std::string& shape, double dt, double t_end) {
        SimConfig cfg;
        cfg.H = ref.H;
        cfg.c = ref.c;
        cfg.nu = ref.nu;
        cfg.dt = dt;
        cfg.t_end = t_end;
        Shape s = shape == "odd_sech" ? Shape::odd_sech : shape == "noise" ? Shape::noise : Shape::sech;
        if (shape != "sech" && shape != "odd_sech" && shape != "noise") throw std::invalid_argument("unknown shape");
        OrbitalResult o = orbital_experiment(ref, {s, amplitude, 1}, cfg);
        py::dict d;
        d["omega"] = o.fit.omega;
        d["r2"] = o.fit.r2;
        d["speed"] = o.speed;
        d["final_position"] = o.final_position;
        d["predicted_shift"] = o.predicted_shift;
        d["stable"] = o.stable;
        d["t"] = to_array(o.trace.t);
        d["residual_H1"] = to_array(o.trace.residual_H1);
        return d;
      },
      py::arg("reference"), py::arg("amplitude") = 0.05, py::arg("shape") = "sech", py::arg("dt") = 1e-3,
      py::arg("t_end") = 40.0);
  m.def("S_func", &S_func, py::arg("phi"), py::arg("lam"), py::arg("nu"));
  m.def(
      "appendix_check",
      [](double nu, double delta, double Lambda0, double beta, long samples, long m_samples, unsigned long long seed) {
        AppendixReport r = appendix_check(RegionParams(nu, delta, Lambda0, beta), samples, m_samples, seed);
        py::dict d;
        for (const LemmaCheck& c : r.checks) d[py::str(c.name)] = check_dict(c);
        d["M_sup"] = r.scan.sup;
        d["M_sup_4x"] = r.scan4.sup;
        d["sup_change"] = r.sup_change;
        d["form_error"] = r.form_error;
        return d;
      },
      py::arg("nu") = 1.0, py::arg("delta") = 0.25, py::arg("Lambda0") = 1.0, py::arg("beta") = 0.75,
      py::arg("samples") = 100000, py::arg("m_samples") = 1000000, py::arg("seed") = 7);
  m.def("store_profile", &store_profile, py::arg("path"), py::arg("profile"));
  m.def("load_profile", py::overload_cast<const std::string&>(&load_profile), py::arg("path"));

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
}
