#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mqc/dynamics.hpp"
#include "mqc/errors.hpp"
#include "mqc/metrology.hpp"
#include "mqc/runner/config.hpp"
#include "mqc/runner/pipelines.hpp"

namespace py = pybind11;
using namespace mqc;

namespace {

using BasisHolder = std::shared_ptr<SymmetricBasis>;

BasisHolder hold(const BasisPtr& b) { return std::const_pointer_cast<SymmetricBasis>(b); }

std::map<int, double> to_dict(const CoherenceSpectrum& s) { return s.intensities; }

CoherenceSpectrum from_dict(const std::map<int, double>& d, int n_spins = 0) {
  CoherenceSpectrum s;
  s.n_spins = n_spins;
  s.intensities = d;
  return s;
}

EvolutionConfig evolution(double coupling, double cycle_time, int loops_prepare, int loops_reverse,
                          double jitter, std::optional<double> c, const std::string& plan,
                          double dephasing, const std::string& integrator, double tolerance,
                          int threads) {
  EvolutionConfig e;
  e.coupling = coupling;
  e.cycle_time = cycle_time;
  e.loops_prepare = loops_prepare;
  e.loops_reverse = loops_reverse;
  e.jitter = jitter;
  if (c) e.c = *c;
  e.plan = parse_run_plan(plan);
  e.dephasing = dephasing;
  e.integrator = parse_propagation_method(integrator);
  e.tolerance = tolerance;
  e.threads = threads;
  e.validate();
  return e;
}

#define EVOLUTION_ARGS                                                                          \
  py::arg("coupling") = 1.0, py::arg("cycle_time") = 1.0, py::arg("loops_prepare") = 0,         \
      py::arg("loops_reverse") = 0, py::arg("jitter") = 0.0, py::arg("c") = py::none(),        \
      py::arg("plan") = "echo-matched", py::arg("dephasing") = 0.0,                             \
      py::arg("integrator") = "rk4", py::arg("tolerance") = 1e-10, py::arg("threads") = 1

ClusterSpec cluster_spec(int n_spins, int co_max, const std::string& weight,
                         std::optional<double> width, double mixing) {
  ClusterSpec c{n_spins, co_max, parse_weight_mode(weight), width, mixing};
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Permutation-symmetric multiple-quantum coherence simulator";
  m.attr("__version__") = MQC_VERSION;

  auto base = py::register_exception<Error>(m, "MqcError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", base.ptr());
  py::register_exception<LabelError>(m, "LabelError", base.ptr());
  py::register_exception<IncompatibleError>(m, "IncompatibleError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<SpecError>(m, "SpecError", base.ptr());
  py::register_exception<GridError>(m, "GridError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<NoSensitivityError>(m, "NoSensitivityError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<SymmetricBasis, BasisHolder>(m, "SymmetricBasis")
      .def_property_readonly("n_spins", &SymmetricBasis::n_spins)
      .def("__len__", &SymmetricBasis::size)
      .def_property_readonly("labels",
                             [](const SymmetricBasis& b) {
                               std::vector<std::tuple<int, int, int>> out;
                               for (const auto& l : b.labels()) out.emplace_back(l.m, l.n, l.h);
                               return out;
                             })
      .def("index",
           [](const SymmetricBasis& b, std::tuple<int, int, int> l) {
             return b.index({std::get<0>(l), std::get<1>(l), std::get<2>(l)});
           })
      .def("norm", &SymmetricBasis::norm)
      .def("structure_constants",
           [](const SymmetricBasis& b, std::tuple<int, int, int> x, std::tuple<int, int, int> y) {
             return b.structure_constants({std::get<0>(x), std::get<1>(x), std::get<2>(x)},
                                          {std::get<0>(y), std::get<1>(y), std::get<2>(y)});
           })
      .def("__repr__", [](const SymmetricBasis& b) {
        return "<SymmetricBasis n_spins=" + std::to_string(b.n_spins()) + " size=" +
               std::to_string(b.size()) + ">";
      });

  m.def("enumerate_basis", [](int n) { return hold(enumerate_basis(n)); }, py::arg("n_spins"));
  m.def("expected_basis_size", &expected_basis_size);

  py::class_<SymOperator>(m, "SymOperator")
      .def(py::init([](const BasisHolder& b, std::optional<Eigen::VectorXcd> c) {
             return c ? SymOperator(b, *c) : SymOperator(b);
           }),
           py::arg("basis"), py::arg("coeffs") = py::none())
      .def_property_readonly("basis", [](const SymOperator& x) { return hold(x.basis_ptr()); })
      .def_property_readonly("n_spins", &SymOperator::n_spins)
      .def_property(
          "coeffs", [](const SymOperator& x) { return Eigen::VectorXcd(x.coeffs()); },
          [](SymOperator& x, const Eigen::VectorXcd& c) {
            if (c.size() != x.coeffs().size()) throw IncompatibleError("coefficient count mismatch");
            x.coeffs() = c;
          })
      .def("trace", &SymOperator::trace)
      .def("adjoint", &SymOperator::adjoint)
      .def("hs_norm", &SymOperator::hs_norm)
      .def("is_hermitian", &SymOperator::is_hermitian, py::arg("tol") = 1e-10)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def("__mul__", [](const SymOperator& a, cplx s) { return a * s; })
      .def("__rmul__", [](const SymOperator& a, cplx s) { return s * a; })
      .def("__matmul__", [](const SymOperator& a, const SymOperator& b) { return multiply(a, b); });

  m.def("multiply", &multiply);
  m.def("hs_inner", &hs_inner);
  m.def("collective_x", [](const BasisHolder& b) { return collective_x(b); });
  m.def("collective_y", [](const BasisHolder& b) { return collective_y(b); });
  m.def("collective_z", [](const BasisHolder& b) { return collective_z(b); });

  m.def("thermal_state", [](const BasisHolder& b) { return thermal_state(b); });
  m.def("ghz_state", [](const BasisHolder& b) { return ghz_state(b); });
  m.def("maximally_mixed", [](const BasisHolder& b) { return maximally_mixed(b); });
  m.def(
      "build_cluster",
      [](const BasisHolder& b, int co_max, const std::string& weight, std::optional<double> width,
         double mixing) { return build_cluster(cluster_spec(b->n_spins(), co_max, weight, width, mixing), b); },
      py::arg("basis"), py::arg("co_max"), py::arg("weight") = "equal", py::arg("gaussian_width") = py::none(),
      py::arg("mixing") = 1.0);
  m.def("positivity_bound", &positivity_bound);
  m.def("coherence_spectrum", [](const SymOperator& rho) { return to_dict(coherence_spectrum(rho)); });

  m.def("dq_hamiltonian", [](const BasisHolder& b, double d) { return dq_hamiltonian(b, d); },
        py::arg("basis"), py::arg("d"));
  m.def("v_operator", [](const BasisHolder& b, double dp) { return v_operator(b, dp); }, py::arg("basis"),
        py::arg("d_prime"));
  m.def("rotate_z", &rotate_z, py::arg("rho"), py::arg("phi"));
  m.def("dephase", &dephase, py::arg("rho"), py::arg("p"));
  m.def("default_dissipator_constant", &default_dissipator_constant);
  m.def(
      "propagate",
      [](const SymOperator& rho, const SymOperator& h, const SymOperator& v, double kappa, double t,
         long steps, const std::string& method, double tolerance) {
        PropagationOptions o;
        o.method = parse_propagation_method(method);
        o.tolerance = tolerance;
        const auto r = propagate(rho, h, v, kappa, t, steps, o);
        return py::make_tuple(r.state, r.warnings);
      },
      py::arg("rho"), py::arg("h"), py::arg("v"), py::arg("kappa"), py::arg("t"), py::arg("steps") = 16,
      py::arg("method") = "rk4", py::arg("tolerance") = 1e-10,
      "Returns (state, warnings).");

  m.def(
      "prepare_state",
      [](const SymOperator& seed, double coupling, double cycle_time, int l1, int l2, double jitter,
         std::optional<double> c, const std::string& plan, double p, const std::string& integ, double tol,
         int threads) {
        return prepare_state(seed, evolution(coupling, cycle_time, l1, l2, jitter, c, plan, p, integ, tol, threads));
      },
      py::arg("seed"), EVOLUTION_ARGS);
  m.def(
      "phase_scan",
      [](const SymOperator& seed, std::vector<double> phi, std::optional<SymOperator> observable,
         double coupling, double cycle_time, int l1, int l2, double jitter, std::optional<double> c,
         const std::string& plan, double p, const std::string& integ, double tol, int threads) {
        const auto cfg = evolution(coupling, cycle_time, l1, l2, jitter, c, plan, p, integ, tol, threads);
        const ScanResult s = phase_scan(seed, cfg, phi, observable);
        return py::make_tuple(s.phi, s.signal, s.warnings);
      },
      py::arg("seed"), py::arg("phi"), py::arg("observable") = py::none(), EVOLUTION_ARGS,
      "Returns (phi, signal, warnings).");
  m.def("phase_grid", &phase_grid, py::arg("points"));
  m.def(
      "spectrum_from_scan",
      [](std::vector<double> phi, std::vector<double> signal, int n_spins, bool suppress_zero,
         std::optional<int> max_order) {
        ScanResult s;
        s.n_spins = n_spins;
        s.phi = std::move(phi);
        s.signal = std::move(signal);
        return to_dict(spectrum_from_scan(s, suppress_zero, max_order));
      },
      py::arg("phi"), py::arg("signal"), py::arg("n_spins") = 0, py::arg("suppress_zero") = false,
      py::arg("max_order") = py::none());

  m.def(
      "distortion_variance",
      [](const std::map<int, double>& s0, const std::map<int, double>& sd, int m_c) {
        return distortion_variance(from_dict(s0), from_dict(sd), m_c).value;
      },
      py::arg("s0"), py::arg("s_delta"), py::arg("m_c"));
  m.def("cluster_size_from_fwhh", &cluster_size_from_fwhh);
  m.def(
      "gaussian_fit",
      [](const std::map<int, double>& s, bool exclude_zero, double floor) {
        const ClusterFit f = gaussian_fit(from_dict(s), exclude_zero, floor);
        py::dict d;
        d["fwhh"] = f.fwhh;
        d["amplitude"] = f.amplitude;
        d["n_cl"] = f.n_cl;
        d["residual"] = f.residual;
        d["points"] = f.points;
        return d;
      },
      py::arg("spectrum"), py::arg("exclude_zero") = false, py::arg("noise_floor") = 1e-12);
  m.def(
      "qfi",
      [](const SymOperator& rho, const SymOperator& g, double rtol) {
        QfiOptions o;
        o.rtol = rtol;
        return qfi(rho, g, o).value;
      },
      py::arg("rho"), py::arg("generator"), py::arg("rtol") = 1e-10);
  m.def("cfi", &cfi, py::arg("family"), py::arg("alpha"), py::arg("d_alpha"), py::arg("floor") = 1e-12);
  m.def(
      "qfi_vs_max_order",
      [](int n, std::vector<int> mc, std::vector<double> p, const std::string& mode,
         std::optional<double> width, double mixing, int threads) {
        QfiSweepOptions o;
        o.gaussian_width = width;
        o.mixing = mixing;
        o.threads = threads;
        std::vector<std::tuple<int, double, double>> out;
        for (const auto& r : qfi_vs_max_order(n, mc, p, parse_weight_mode(mode), o)) {
          out.emplace_back(r.m_c, r.p, r.qfi);
        }
        return out;
      },
      py::arg("n_spins"), py::arg("m_c"), py::arg("p"), py::arg("mode") = "equal",
      py::arg("gaussian_width") = py::none(), py::arg("mixing") = 1.0, py::arg("threads") = 1,
      "Rows (m_c, p, qfi) with m_c outer.");
  m.def(
      "jitter_sweep",
      [](const SymOperator& seed, std::vector<double> deltas, std::vector<int> mc, int points,
         bool suppress_zero, double coupling, double cycle_time, int l1, int l2, double jitter,
         std::optional<double> c, const std::string& plan, double p, const std::string& integ, double tol,
         int threads) {
        JitterSweepSpec s;
        s.evolution = evolution(coupling, cycle_time, l1, l2, jitter, c, plan, p, integ, tol, threads);
        s.deltas = std::move(deltas);
        s.m_c = std::move(mc);
        s.phase_points = points;
        s.suppress_zero = suppress_zero;
        std::vector<std::tuple<double, int, double>> out;
        for (const auto& r : jitter_sweep(seed, s).rows) out.emplace_back(r.delta, r.m_c, r.value);
        return out;
      },
      py::arg("seed"), py::arg("deltas"), py::arg("m_c"), py::arg("phase_points") = 181,
      py::arg("suppress_zero") = true, EVOLUTION_ARGS, "Rows (delta, m_c, D) with delta outer.");
  m.def("linear_r_squared", &linear_r_squared);

  m.def(
      "run_config",
      [](const std::string& text, const std::filesystem::path& out, std::optional<int> threads) {
        auto cfg = runner::parse_config(text, "config");
        if (threads) cfg.threads = *threads;
        const auto r = runner::run(cfg, out);
        return py::make_tuple(cfg.run_id(), r.files);
      },
      py::arg("config"), py::arg("out_dir"), py::arg("threads") = py::none(),
      "Runs a JSON config document; returns (run_id, files).");
  m.def("validate_config", [](const std::string& text) {
    const auto cfg = runner::parse_config(text, "config");
    return cfg.run_id();
  });
}
