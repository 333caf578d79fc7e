//========================================================================================
// kerrshell: Python bindings for the orbit, zero-velocity-curve, geodesic and matter
// layers
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kerrshell/geodesic_flow.hpp"
#include "kerrshell/io.hpp"
#include "kerrshell/orbit_families.hpp"
#include "kerrshell/vlasov_matter.hpp"
#include "kerrshell/zvc_analysis.hpp"

namespace py = pybind11;
using namespace kerrshell;

namespace {

Branch parse_branch(const std::string& s) {
  if (s == "direct") return Branch::Direct;
  if (s == "retrograde") return Branch::Retrograde;
  throw Error(ErrorCode::InvalidInput, "branch must be 'direct' or 'retrograde'");
}

}  // namespace

PYBIND11_MODULE(_kerrshell, m) {
  m.doc() = "Kerr geodesics, zero-velocity curves and Vlasov shell matter (M = 1 units)";
  m.attr("__version__") = io::kVersion;

  static py::exception<Error> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) PyErr_SetString(PyExc_ValueError, e.what());
      else numerical_error(e.what());
    }
  });

  py::class_<KerrParams>(m, "KerrParams")
      .def(py::init(&KerrParams::make), py::arg("M") = 1.0, py::arg("a") = 0.0)
      .def_readonly("M", &KerrParams::M)
      .def_readonly("a", &KerrParams::a)
      .def_property_readonly("r_plus", &KerrParams::r_plus)
      .def("__repr__", [](const KerrParams& p) {
        return "KerrParams(M=" + io::format_double(p.M) + ", a=" + io::format_double(p.a) + ")";
      });

  py::class_<ConservedSet>(m, "ConservedSet")
      .def(py::init([](double eps, double ell, double q) { return ConservedSet{eps, ell, q}; }), py::arg("eps"),
           py::arg("ell"), py::arg("q") = 0.0)
      .def_readwrite("eps", &ConservedSet::eps)
      .def_readwrite("ell", &ConservedSet::ell)
      .def_readwrite("q", &ConservedSet::q);

  m.def(
      "special_orbits",
      [](const KerrParams& p, const std::string& branch) {
        Branch b = parse_branch(branch);
        KerrParams u = p.unit();
        IscoData is = isco(b, u);
        return py::dict(py::arg("r_ph") = photon_radius(b, u), py::arg("r_ms") = is.r_ms,
                        py::arg("r_mb") = marginally_bound_radius(b, u), py::arg("eps_min") = is.eps_min,
                        py::arg("ell_min") = is.ell_min);
      },
      py::arg("params"), py::arg("branch") = "direct", "Photon, ISCO and marginally bound radii with the ISCO energy and angular momentum.");

  m.def(
      "radial_roots",
      [](const ConservedSet& cs, const KerrParams& p) {
        RootSet rs = radial_roots(cs, p.unit());
        py::list roots;
        for (const auto& r : rs.roots) roots.append(py::make_tuple(r.r, r.multiplicity));
        return py::dict(py::arg("roots") = roots, py::arg("table") = rs.rcase.table, py::arg("column") = rs.rcase.column,
                        py::arg("expected_count") = rs.rcase.expected_count, py::arg("label") = rs.rcase.label);
      },
      py::arg("cs"), py::arg("params"), "Roots of R in (r_H, inf) with their root-table case.");

  m.def(
      "classify_orbit",
      [](const ConservedSet& cs, double r0, double theta0, int sign, const KerrParams& p) {
        return std::string(orbit_class_name(classify_orbit(cs, {r0, theta0}, sign, p.unit())));
      },
      py::arg("cs"), py::arg("r0"), py::arg("theta0"), py::arg("sign"), py::arg("params"));

  m.def(
      "trace_zvc",
      [](double eps, double ell, const KerrParams& p) {
        ZeroVelocityCurve zc = trace_zvc(eps, ell, p.unit());
        py::list comps;
        for (const auto& c : zc.components) {
          py::list pts;
          for (const auto& w : c.points) pts.append(py::make_tuple(w.rho, w.z));
          comps.append(py::dict(py::arg("tag") = component_tag_name(c.tag), py::arg("closed") = c.closed,
                                py::arg("points") = pts));
        }
        return py::dict(py::arg("components") = comps, py::arg("trapped") = zc.trapped(),
                        py::arg("max_residual") = zc.max_residual);
      },
      py::arg("eps"), py::arg("ell"), py::arg("params"), "Kerr zero-velocity curve as (rho, z) polylines.");

  m.def(
      "periods",
      [](const ConservedSet& cs, const KerrParams& p) {
        OrbitPeriods per = periods(cs, p.unit());
        return py::make_tuple(per.T_r, per.T_theta);
      },
      py::arg("cs"), py::arg("params"), "Mino-time radial and polar periods (T_r, T_theta) of a trapped orbit.");

  m.def(
      "integrate",
      [](const ConservedSet& cs, double r0, double theta0, int sign_r, int sign_theta, double span, const KerrParams& p,
         bool mino) {
        KerrParams u = p.unit();
        IntegrateOptions opt;
        opt.time = mino ? TimeParam::Mino : TimeParam::Proper;
        opt.record = false;
        Trajectory t = integrate(make_state(cs, {r0, theta0}, sign_r, sign_theta, u), span, u, opt);
        const PhaseState& f = t.final_state;
        return py::dict(py::arg("termination") = termination_name(t.reason),
                        py::arg("fate") = orbit_class_name(fate(t)), py::arg("r") = f.x1, py::arg("theta") = f.x2,
                        py::arg("tau") = f.tau, py::arg("mino") = f.mino, py::arg("drift_q") = t.drift.q,
                        py::arg("drift_H") = t.drift.H, py::arg("drift_H_rel") = t.drift.H_rel,
                        py::arg("r_min") = t.r_min, py::arg("r_max") = t.r_max);
      },
      py::arg("cs"), py::arg("r0"), py::arg("theta0"), py::arg("sign_r"), py::arg("sign_theta"), py::arg("span"),
      py::arg("params"), py::arg("mino") = false, "Integrate the reduced geodesic flow in the BL chart.");

  m.def(
      "matter_at",
      [](double rho, double z, const KerrParams& p, double eps1, double eps2, double ell1, double ell2, double delta) {
        KerrParams u = p.unit();
        ProfilePhi prof = default_profile({eps1, eps2, ell1, ell2}, delta);
        CutoffPsi psi = make_cutoff(prof, u);
        MatterPoint mp = matter_at(rho, z, u, prof, psi);
        return py::dict(py::arg("T_tt") = mp.T.T_tt, py::arg("T_tphi") = mp.T.T_tphi,
                        py::arg("T_phiphi") = mp.T.T_phiphi, py::arg("T_rhorho") = mp.T.T_rhorho,
                        py::arg("T_zz") = mp.T.T_zz, py::arg("F1") = mp.F.F1, py::arg("F2") = mp.F.F2,
                        py::arg("F3") = mp.F.F3, py::arg("F4") = mp.F.F4);
      },
      py::arg("rho"), py::arg("z"), py::arg("params"), py::arg("eps1"), py::arg("eps2"), py::arg("ell1"),
      py::arg("ell2"), py::arg("delta"), "Stress components and sources of the default profile at one point.");
}
