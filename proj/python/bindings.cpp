#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "slablens/cli.hpp"
#include "slablens/dispersion.hpp"
#include "slablens/energy.hpp"
#include "slablens/field.hpp"
#include "slablens/sources.hpp"

namespace py = pybind11;
using namespace slab;

namespace {

QuadConfig quad(double abs_tol, double rel_tol, int max_panels) { return {abs_tol, rel_tol, max_panels}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Helmholtz slab lens with permittivity -1 - i delta";

  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
  py::register_exception<RootStatusError>(m, "RootStatusError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<Params>(m, "Params")
      .def(py::init<double, double, double>(), py::arg("a"), py::arg("k0"), py::arg("delta"))
      .def_static("from_gamma", &Params::from_gamma, py::arg("gamma"), py::arg("delta"), py::arg("a") = 1.0)
      .def_property_readonly("a", &Params::a)
      .def_property_readonly("k0", &Params::k0)
      .def_property_readonly("delta", &Params::delta)
      .def_property_readonly("gamma", &Params::gamma)
      .def("__repr__", [](const Params& p) {
        std::ostringstream o;
        o << "Params(a=" << p.a() << ", k0=" << p.k0() << ", delta=" << p.delta() << ")";
        return o.str();
      });

  py::class_<SourceSpec>(m, "Source")
      .def_static("dipole", &SourceSpec::dipole, py::arg("x0"), py::arg("dx"), py::arg("dy"), py::arg("y0") = 0.0,
                  py::arg("a") = 1.0)
      .def_static("bump", &SourceSpec::bump, py::arg("d0"), py::arg("d1"), py::arg("C") = 1e4, py::arg("h0") = -1.0,
                  py::arg("h1") = 1.0, py::arg("a") = 1.0)
      .def_static("sinc_bust", &SourceSpec::sinc_bust, py::arg("params"), py::arg("d0"), py::arg("d1"))
      .def_static("bessel_bust", &SourceSpec::bessel_bust, py::arg("params"), py::arg("d0"), py::arg("d1"))
      .def_static("current", &SourceSpec::current, py::arg("params"), py::arg("d0"), py::arg("d1"),
                  py::arg("C") = 1e3)
      .def_property_readonly("name", &SourceSpec::name)
      .def_property_readonly("d0", &SourceSpec::d0)
      .def_property_readonly("d1", &SourceSpec::d1)
      .def("density", [](const SourceSpec& s, double x, double y) { return spatial_density(s, x, y); })
      .def("norm_l2", [](const SourceSpec& s) { return norm_l2(s); })
      .def("__repr__", [](const SourceSpec& s) { return "Source(" + s.name() + ")"; });

  m.def("gamma_star", [] {
    const GammaStarResult& r = gamma_star();
    py::dict d;
    d["gamma_star"] = r.gamma_star;
    d["lo"] = r.lo;
    d["hi"] = r.hi;
    d["inner_max_s"] = r.inner_max_s;
    return d;
  });
  m.def(
      "find_roots",
      [](double gamma) {
        const RootPair r = find_roots(gamma);
        return py::make_tuple(r.p1, r.p2, std::string(root_status_name(r.status)));
      },
      py::arg("gamma"), "(p1, p2, status) of the real roots of g0 above 1");
  m.def("g_delta", py::overload_cast<double, double, double>(&g_delta), py::arg("p"), py::arg("gamma"),
        py::arg("delta"));
  m.def("g_zero", &g_zero, py::arg("p"), py::arg("gamma"));
  m.def("lambda_gamma", &lambda_gamma, py::arg("params"));

  m.def(
      "v_hat", [](double x, double p, const SourceSpec& s, const Params& P) { return v_hat(x, p, s, P).value(); },
      py::arg("x"), py::arg("p"), py::arg("source"), py::arg("params"));
  m.def(
      "reconstruct",
      [](double x, double y, const SourceSpec& s, const Params& P, double abs_tol, double rel_tol, int max_panels) {
        return reconstruct(x, y, s, P, quad(abs_tol, rel_tol, max_panels));
      },
      py::arg("x"), py::arg("y"), py::arg("source"), py::arg("params"), py::arg("abs_tol") = 1e-12,
      py::arg("rel_tol") = 1e-9, py::arg("max_panels") = 6000);
  m.def(
      "field_map",
      [](double x0, double x1, int nx, double y0, double y1, int ny, const SourceSpec& s, const Params& P,
         int threads) {
        FieldGrid f;
        {
          py::gil_scoped_release release;
          f = field_map(GridSpec{x0, x1, nx, y0, y1, ny}, s, P, {}, threads);
        }
        py::array_t<std::complex<double>> out({nx, ny});
        std::copy(f.values.begin(), f.values.end(), out.mutable_data());
        return out;
      },
      py::arg("x0"), py::arg("x1"), py::arg("nx"), py::arg("y0"), py::arg("y1"), py::arg("ny"), py::arg("source"),
      py::arg("params"), py::arg("threads") = 0, "V on an nx by ny grid, indexed [i, j] = (x_i, y_j)");

  m.def(
      "energy",
      [](const SourceSpec& s, const Params& P, double xi) {
        const EnergyBreakdown e = energy(s, P, xi);
        py::dict d;
        d["total"] = e.total;
        d["small_p"] = e.small_p;
        d["large_p"] = e.large_p;
        d["peaks"] = e.peak_contributions;
        d["err_est"] = e.quad_error_estimate;
        return d;
      },
      py::arg("source"), py::arg("params"), py::arg("xi"));
  m.def("L_integrand", &L_integrand, py::arg("p"), py::arg("source"), py::arg("params"), py::arg("xi"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::main_entry(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in process; returns (exit code, stdout, stderr).");
}
