#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "freelyap/cli.hpp"
#include "freelyap/errors.hpp"
#include "freelyap/io.hpp"
#include "freelyap/lyapunov.hpp"
#include "freelyap/transforms.hpp"

namespace py = pybind11;
using namespace freelyap;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Free Lyapunov exponents of products of free random operators";
  m.attr("__version__") = std::string(io::tool_version());

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InvalidMeasure>(m, "InvalidMeasure", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

  py::class_<SpectralMeasure>(m, "SpectralMeasure")
      .def_property_readonly("label", &SpectralMeasure::label)
      .def_property_readonly("rank", &SpectralMeasure::off_kernel_mass)
      .def_property_readonly("mass_at_zero", &SpectralMeasure::mass_at_zero)
      .def_property_readonly("invertible", &SpectralMeasure::invertible)
      .def_property_readonly("support", [](const SpectralMeasure& mu) {
        return py::make_tuple(mu.support_min(), mu.support_max());
      })
      .def("cdf", &SpectralMeasure::cdf)
      .def("quantile", &SpectralMeasure::quantile)
      .def("moment", [](const SpectralMeasure& mu, int k) { return moment(mu, k); })
      .def("to_json", [](const SpectralMeasure& mu) { return io::measure_to_json(mu).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::measure_from_json(io::json::parse(s)); })
      .def("__repr__", [](const SpectralMeasure& mu) {
        std::ostringstream os;
        os << "<SpectralMeasure '" << mu.label() << "' rank=" << mu.off_kernel_mass() << ">";
        return os.str();
      });

  m.def("mp_measure", [](double lambda) { return mp_measure(lambda); }, py::arg("lam"));
  m.def("compressed_mp_measure", [](double t, double lambda) { return compressed_mp_measure(t, lambda); },
        py::arg("t"), py::arg("lam"));
  m.def("point_mass", &point_mass, py::arg("x"));
  m.def(
      "discrete_measure",
      [](const std::vector<std::pair<double, double>>& atoms) {
        std::vector<Atom> a;
        for (const auto& [x, w] : atoms) a.push_back({x, w});
        return discrete_measure(a);
      },
      py::arg("atoms"));

  m.def("cauchy", [](const SpectralMeasure& mu, double z) { return cauchy(mu, z).value; });
  m.def("psi", [](const SpectralMeasure& mu, double z) { return psi(mu, z).value; });
  m.def("psi_inverse", [](const SpectralMeasure& mu, double w) { return psi_inverse(mu, w).value; });
  m.def("s_transform", [](const SpectralMeasure& mu, double w) { return s_transform(mu, w).value; });

  m.def("marginal_exponent", py::overload_cast<const SpectralMeasure&, double>(&marginal_exponent));
  m.def("integrated_exponent", [](const SpectralMeasure& mu, double t) { return integrated_exponent(mu, t).value; });
  m.def("distribution_at", &distribution_at);
  m.def("largest_exponent", [](const SpectralMeasure& mu) { return largest_exponent(mu).value; });
  m.def("newman_solve", &newman_solve);
  m.def(
      "log_det",
      [](const SpectralMeasure& mu, const std::string& method) {
        if (method != "definition" && method != "s_integral")
          throw DomainError("method must be definition or s_integral");
        return fk_determinant(mu, method == "definition" ? DeterminantMethod::definition
                                                         : DeterminantMethod::s_integral)
            .log_det;
      },
      py::arg("mu"), py::arg("method") = "definition");
  m.def(
      "profile",
      [](const SpectralMeasure& mu, int points) {
        const auto grid = default_t_grid(mu.off_kernel_mass(), points);
        const LyapunovProfile p = lyapunov_profile(mu, grid);
        return py::make_tuple(p.t_grid, p.F_values, p.f_values);
      },
      py::arg("mu"), py::arg("points") = 199);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
