#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "eitlab/atom_model.hpp"
#include "eitlab/constants.hpp"
#include "eitlab/doppler.hpp"
#include "eitlab/errors.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/io/commands.hpp"
#include "eitlab/io/config.hpp"
#include "eitlab/io/csv.hpp"
#include "eitlab/lineshape.hpp"
#include "eitlab/propagation.hpp"
#include "eitlab/series.hpp"

namespace py = pybind11;
using namespace eit;

namespace {

void bind_errors(py::module_& m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ValidityError>(m, "ValidityError", config.ptr());
    py::register_exception<RangeError>(m, "RangeError", config.ptr());
    auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<NoDip>(m, "NoDip", data.ptr());
    py::register_exception<Ambiguous>(m, "Ambiguous", data.ptr());
    py::register_exception<DegenerateData>(m, "DegenerateData", data.ptr());
    auto num = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<PoleError>(m, "PoleError", num.ptr());
    py::register_exception<SingularLiouvillian>(m, "SingularLiouvillian", num.ptr());
    py::register_exception<QuadratureFailure>(m, "QuadratureFailure", num.ptr());
    py::register_exception<NoConvergence>(m, "NoConvergence", num.ptr());
    py::register_exception<RankDeficient>(m, "RankDeficient", num.ptr());
}

void bind_model(py::module_& m) {
    py::class_<LambdaSystem>(m, "LambdaSystem")
        .def(py::init<>())
        .def(py::init([](double gamma, double gamma_bc, double omega_c, double delta2, double gamma_pe,
                         double omega_b, double delta_pump) {
                 LambdaSystem s;
                 s.gamma_b_decay = s.gamma_c_decay = 0.5 * gamma;
                 s.gamma_bc = gamma_bc;
                 s.omega_c = omega_c;
                 s.delta2 = delta2;
                 s.gamma_pe = gamma_pe;
                 s.omega_b = omega_b;
                 s.delta_pump = delta_pump;
                 return s;
             }),
             py::kw_only(), py::arg("gamma"), py::arg("gamma_bc") = 0.0, py::arg("omega_c") = 0.0,
             py::arg("delta2") = 0.0, py::arg("gamma_pe") = 0.0, py::arg("omega_b") = 0.0,
             py::arg("delta_pump") = 0.0)
        .def_readwrite("omega_b", &LambdaSystem::omega_b)
        .def_readwrite("omega_c", &LambdaSystem::omega_c)
        .def_readwrite("delta_pump", &LambdaSystem::delta_pump)
        .def_readwrite("delta2", &LambdaSystem::delta2)
        .def_readwrite("gamma_b_decay", &LambdaSystem::gamma_b_decay)
        .def_readwrite("gamma_c_decay", &LambdaSystem::gamma_c_decay)
        .def_readwrite("gamma_bc", &LambdaSystem::gamma_bc)
        .def_readwrite("gamma_pe", &LambdaSystem::gamma_pe)
        .def_readwrite("allow_strong_signal", &LambdaSystem::allow_strong_signal)
        .def("gamma", &LambdaSystem::gamma)
        .def("validate", &LambdaSystem::validate);

    m.def("coherence_per_signal", &coherence_per_signal, py::arg("sys"));
    m.def("linear_coherence", &linear_coherence, py::arg("sys"));
    m.def("bloch_linear_response", &bloch_linear_response, py::arg("sys"));
    m.def(
        "bloch_coherence",
        [](const LambdaSystem& s) { return bloch_steady_state(s)(Level::a, Level::b); },
        py::arg("sys"), "rho_ab of the full steady state");
    m.def(
        "bloch_populations",
        [](const LambdaSystem& s) {
            const auto rho = bloch_steady_state(s);
            return py::make_tuple(rho.population(Level::a), rho.population(Level::b), rho.population(Level::c));
        },
        py::arg("sys"));
    m.def(
        "extrapolate_weak_signal",
        [](const LambdaSystem& s, double rel_tol) { return extrapolate_weak_signal(s, rel_tol).coherence_per_signal; },
        py::arg("sys"), py::arg("rel_tol") = 1e-9);
}

void bind_doppler(py::module_& m) {
    py::enum_<ProfileShape>(m, "ProfileShape")
        .value("Gaussian", ProfileShape::Gaussian)
        .value("LorentzianApprox", ProfileShape::LorentzianApprox);

    py::class_<DopplerProfile>(m, "DopplerProfile")
        .def(py::init([](double w_d, ProfileShape shape) {
                 DopplerProfile p;
                 p.w_d = w_d;
                 p.shape = shape;
                 return p;
             }),
             py::arg("w_d"), py::arg("shape") = ProfileShape::LorentzianApprox)
        .def_static("thermal", &DopplerProfile::thermal, py::arg("temperature"),
                    py::arg("wavelength") = constants::rb87_d1_wavelength,
                    py::arg("atom_mass") = constants::rb87_mass, py::arg("shape") = ProfileShape::Gaussian)
        .def_readwrite("w_d", &DopplerProfile::w_d)
        .def_readwrite("shape", &DopplerProfile::shape);

    py::class_<MediumConfig>(m, "MediumConfig")
        .def(py::init([](double number_density, double dipole_moment, double cell_length) {
                 MediumConfig c;
                 c.number_density = number_density;
                 c.dipole_moment = dipole_moment;
                 c.cell_length = cell_length;
                 return c;
             }),
             py::arg("number_density"), py::arg("dipole_moment") = constants::rb87_d1_effective_dipole,
             py::arg("cell_length") = 0.05)
        .def_readwrite("number_density", &MediumConfig::number_density)
        .def_readwrite("dipole_moment", &MediumConfig::dipole_moment)
        .def_readwrite("cell_length", &MediumConfig::cell_length)
        .def_readwrite("beam_diameter", &MediumConfig::beam_diameter)
        .def_readwrite("signal_wavelength", &MediumConfig::signal_wavelength);

    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init<>())
        .def_readwrite("rel_tol", &QuadratureConfig::rel_tol)
        .def_readwrite("abs_tol", &QuadratureConfig::abs_tol)
        .def_readwrite("max_subdivisions", &QuadratureConfig::max_subdivisions)
        .def_readwrite("truncation_half_widths", &QuadratureConfig::truncation_half_widths);

    m.def("doppler_width", &doppler_width, py::arg("temperature"),
          py::arg("wavelength") = constants::rb87_d1_wavelength, py::arg("atom_mass") = constants::rb87_mass);
    m.def("average_susceptibility_closed", &average_susceptibility_closed, py::arg("sys"), py::arg("medium"),
          py::arg("w_d"), py::arg("drop_two_photon_term") = false);
    m.def("average_susceptibility_numeric", &average_susceptibility_numeric, py::arg("sys"), py::arg("medium"),
          py::arg("profile"), py::arg("quad") = QuadratureConfig{}, py::arg("pump_offset") = 0.0);
}

void bind_lineshape(py::module_& m) {
    py::enum_<ScanKind>(m, "ScanKind")
        .value("Absorption", ScanKind::Absorption)
        .value("Transmission", ScanKind::Transmission);

    py::class_<ResonanceScan>(m, "ResonanceScan")
        .def(py::init<>())
        .def_readwrite("delta2", &ResonanceScan::delta2)
        .def_readwrite("absorption", &ResonanceScan::absorption)
        .def_readwrite("transmission", &ResonanceScan::transmission)
        .def_readwrite("kind", &ResonanceScan::kind)
        .def("values", &ResonanceScan::values)
        .def("__len__", &ResonanceScan::size);

    py::class_<ScanGrid>(m, "ScanGrid")
        .def(py::init<>())
        .def_readwrite("points", &ScanGrid::points)
        .def_readwrite("half_span_fwhm", &ScanGrid::half_span_fwhm)
        .def_readwrite("half_span", &ScanGrid::half_span)
        .def("make", &ScanGrid::make, py::arg("fwhm_estimate"));

    m.def("fwhm_dephasing", &fwhm_dephasing, py::arg("gamma_bc"), py::arg("omega_c"), py::arg("w_d"),
          py::arg("gamma"));
    m.def("fwhm_popexchange_asymptote", &fwhm_popexchange_asymptote, py::arg("gamma_pe"), py::arg("omega_c"),
          py::arg("w_d"), py::arg("gamma"));
    m.def("intercept_ratio", &intercept_ratio, py::arg("w_d"), py::arg("gamma"));
    m.def("absorption_coefficient", &absorption_coefficient, py::arg("delta2"), py::arg("sys"),
          py::arg("medium"), py::arg("w_d"));
    m.def("symmetric_grid", &symmetric_grid, py::arg("half_span"), py::arg("points"));
    m.def(
        "dephasing_scan",
        [](const LambdaSystem& s, const MediumConfig& med, double w_d, const std::vector<double>& grid) {
            return dephasing_scan(s, med, w_d, grid);
        },
        py::arg("sys"), py::arg("medium"), py::arg("w_d"), py::arg("grid"));
    m.def(
        "popexchange_scan_numeric",
        [](const LambdaSystem& s, const MediumConfig& med, const DopplerProfile& p,
           const std::vector<double>& grid, const QuadratureConfig& q) {
            py::gil_scoped_release release;
            return popexchange_scan_numeric(s, med, p, grid, q);
        },
        py::arg("sys"), py::arg("medium"), py::arg("profile"), py::arg("grid"), py::arg("quad") = QuadratureConfig{});
    m.def("fwhm_numeric", &fwhm_numeric, py::arg("scan"));
}

void bind_propagation(py::module_& m) {
    m.def(
        "rb_number_density", [](double t) { return rb_number_density(t); }, py::arg("temperature"));
    m.def("rabi_from_power", &rabi_from_power, py::arg("power"), py::arg("beam_diameter") = 0.010,
          py::arg("dipole_moment") = constants::rb87_d1_effective_dipole);
    m.def("power_from_rabi", &power_from_rabi, py::arg("omega"), py::arg("beam_diameter") = 0.010,
          py::arg("dipole_moment") = constants::rb87_d1_effective_dipole);
}

void bind_fitting(py::module_& m) {
    py::class_<FitParameter>(m, "FitParameter")
        .def_readonly("name", &FitParameter::name)
        .def_readonly("value", &FitParameter::value)
        .def_readonly("sigma", &FitParameter::sigma)
        .def("__repr__", [](const FitParameter& p) {
            return "FitParameter(" + p.name + "=" + io::format_number(p.value) + " +/- " +
                   io::format_number(p.sigma) + ")";
        });

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("model", &FitResult::model)
        .def_readonly("parameters", &FitResult::parameters)
        .def_readonly("derived", &FitResult::derived)
        .def_readonly("rss", &FitResult::rss)
        .def_readonly("dof", &FitResult::dof)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("iterations", &FitResult::iterations)
        .def("value", &FitResult::value, py::arg("name"))
        .def("sigma", &FitResult::sigma, py::arg("name"));

    py::class_<LinewidthSeries>(m, "LinewidthSeries")
        .def(py::init([](const std::vector<double>& powers, const std::vector<double>& fwhms) {
                 if (powers.size() != fwhms.size()) throw DataError("powers and fwhms differ in length");
                 LinewidthSeries s;
                 for (std::size_t i = 0; i < powers.size(); ++i) s.samples.push_back({powers[i], 0.0, fwhms[i], {}});
                 return s;
             }),
             py::arg("powers"), py::arg("fwhms"))
        .def("powers", &LinewidthSeries::powers)
        .def("fwhms", &LinewidthSeries::fwhms)
        .def("__len__", &LinewidthSeries::size);

    m.def("fit_linear", &fit_linear, py::arg("series"));
    m.def(
        "fit_lorentzian", [](const ResonanceScan& s) { return fit_lorentzian(s); }, py::arg("scan"));
}

void bind_io(py::module_& m) {
    py::class_<io::RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def("to_yaml", &io::RunConfig::to_yaml)
        .def("w_d", &io::RunConfig::w_d)
        .def("gamma", &io::RunConfig::gamma)
        .def("lambda_system", &io::RunConfig::lambda_system)
        .def_property_readonly("seed", [](const io::RunConfig& c) { return c.seed; });
    m.def("parse_config", &io::parse_config, py::arg("text"), py::arg("source_name") = "<config>");
    m.def("load_config", &io::load_config, py::arg("path"));

    m.def(
        "run_command",
        [](const std::string& command, std::optional<std::filesystem::path> config,
           std::optional<std::filesystem::path> input, std::filesystem::path out,
           std::optional<std::uint64_t> seed, std::optional<std::string> model, std::optional<double> noise) {
            io::CommandOptions o{command, config, input, out, seed, model, noise};
            io::CommandResult r;
            {
                py::gil_scoped_release release;
                r = io::run_command(o);
            }
            return py::make_tuple(r.outputs, r.manifest, r.report);
        },
        py::arg("command"), py::kw_only(), py::arg("config") = py::none(), py::arg("input") = py::none(),
        py::arg("out") = std::filesystem::path("."), py::arg("seed") = py::none(), py::arg("model") = py::none(),
        py::arg("noise") = py::none(),
        "Runs one CLI subcommand; returns (outputs, manifest, report).");
}

}  // namespace

PYBIND11_MODULE(_eitlab, m) {
    m.doc() = "EIT linewidth toolkit (C++ core)";
    m.attr("__version__") = io::kToolVersion;
    bind_errors(m);
    bind_model(m);
    bind_doppler(m);
    bind_lineshape(m);
    bind_propagation(m);
    bind_fitting(m);
    bind_io(m);
}
