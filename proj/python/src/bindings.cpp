// Copyright 2026 The qdsps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings for the qdsps core library.

#include <sstream>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qdsps/config.hpp"
#include "qdsps/efficiency.hpp"
#include "qdsps/errors.hpp"
#include "qdsps/experiment.hpp"
#include "qdsps/lindblad.hpp"
#include "qdsps/model_params.hpp"
#include "qdsps/photon_stats.hpp"
#include "qdsps/polarization.hpp"
#include "qdsps/pulse.hpp"

namespace py = pybind11;
using namespace qdsps;

namespace {

py::array_t<double> to_array(std::span<const double> values) {
    py::array_t<double> out(static_cast<py::ssize_t>(values.size()));
    std::copy(values.begin(), values.end(), out.mutable_data());
    return out;
}

// Column name -> numpy array (numeric) or list of str.
py::dict sweep_to_dict(const SweepResult& result) {
    py::dict out;
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
        const bool text = !result.rows.empty() && std::holds_alternative<std::string>(result.rows.front()[c]);
        if (text) {
            out[py::str(result.columns[c])] = result.text_column(result.columns[c]);
        } else {
            out[py::str(result.columns[c])] = to_array(result.column(result.columns[c]));
        }
    }
    return out;
}

py::dict trajectory_to_dict(const StateTrajectory& trajectory) {
    std::vector<double> coh_re, coh_im;
    for (const auto& rho : trajectory.rho) {
        coh_re.push_back(rho(x_level, ground_level).real());
        coh_im.push_back(rho(x_level, ground_level).imag());
    }
    py::dict out;
    out["time_ps"] = to_array(trajectory.times);
    out["p_e"] = to_array(trajectory.populations);
    out["re_coh"] = to_array(coh_re);
    out["im_coh"] = to_array(coh_im);
    out["steps"] = trajectory.stats.steps;
    out["rejected"] = trajectory.stats.rejected;
    return out;
}

py::dict calibration_to_dict(const CalibrationRecord& record) {
    py::dict out;
    out["alpha_ps2"] = record.bath.alpha;
    out["target"] = record.target;
    out["ratio"] = record.achieved.ratio;
    out["plateau"] = record.achieved.plateau;
    out["plateau_area_pi"] = record.achieved.plateau_area / constants::pi;
    out["resonant_max"] = record.achieved.resonant_max;
    out["resonant_area_pi"] = record.achieved.resonant_area / constants::pi;
    out["scan"] = record.scan;
    return out;
}

}  // namespace

PYBIND11_MODULE(_qdsps, m) {
    m.doc() = "Quantum-dot single-photon source simulator";

    // Exceptions: the hierarchy mirrors the C++ one.
    auto domain_error = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<TruncationError>(m, "TruncationError", domain_error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    auto numerical_error = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<IntegrationError>(m, "IntegrationError", numerical_error.ptr());
    py::register_exception<UndefinedResultError>(m, "UndefinedResultError", numerical_error.ptr());
    py::register_exception<FitError>(m, "FitError", numerical_error.ptr());
    py::register_exception<CalibrationError>(m, "CalibrationError", numerical_error.ptr());

    // ---- units
    m.def("wavelength_detuning_to_energy", &wavelength_detuning_to_energy, py::arg("delta_lambda_nm"),
          py::arg("lambda0_nm") = constants::default_wavelength_nm);
    m.def("energy_to_wavelength_detuning", &energy_to_wavelength_detuning, py::arg("energy_meV"),
          py::arg("lambda0_nm") = constants::default_wavelength_nm);
    m.def("gamma_from_linewidth", &gamma_from_linewidth, py::arg("bandwidth_nm"),
          py::arg("lambda0_nm") = constants::default_wavelength_nm);
    m.def("detuning_rate_from_wavelength", &detuning_rate_from_wavelength, py::arg("delta_lambda_nm"),
          py::arg("lambda0_nm") = constants::default_wavelength_nm);
    m.def("meV_to_rate", [](double v) { return meV_to_rate(v); });
    m.def("rate_to_meV", [](double v) { return rate_to_meV(v); });
    m.def("ueV_to_rate", [](double v) { return ueV_to_rate(v); });
    m.def("dephasing_for_indistinguishability", &dephasing_for_indistinguishability, py::arg("gamma"),
          py::arg("target"));

    // ---- parameters
    py::enum_<SampleProfile>(m, "SampleProfile").value("A", SampleProfile::A).value("B", SampleProfile::B);

    py::class_<QDParams>(m, "QDParams")
        .def(py::init<>())
        .def_static("from_profile", &QDParams::from_profile)
        .def_readwrite("transition_wavelength_nm", &QDParams::transition_wavelength_nm)
        .def_readwrite("fss_ueV", &QDParams::fss_ueV)
        .def_readwrite("gamma", &QDParams::gamma)
        .def_readwrite("pure_dephasing", &QDParams::pure_dephasing)
        .def_readwrite("dipole_angle_offset", &QDParams::dipole_angle_offset)
        .def("validate", &QDParams::validate)
        .def("lifetime", &QDParams::lifetime);

    py::class_<CavityParams>(m, "CavityParams")
        .def(py::init<>())
        .def_static("from_profile", &CavityParams::from_profile)
        .def_readwrite("kappa_ueV", &CavityParams::kappa_ueV)
        .def_readwrite("mode_splitting_ueV", &CavityParams::mode_splitting_ueV)
        .def_readwrite("eta_ext", &CavityParams::eta_ext);

    py::class_<PhononBathParams>(m, "PhononBathParams")
        .def(py::init<>())
        .def_readwrite("alpha", &PhononBathParams::alpha)
        .def_readwrite("omega_b", &PhononBathParams::omega_b)
        .def_readwrite("temperature_K", &PhononBathParams::temperature_K)
        .def("spectral_density", &PhononBathParams::spectral_density)
        .def("bose", &PhononBathParams::bose);

    py::class_<LaserParams>(m, "LaserParams")
        .def(py::init<>())
        .def_readwrite("detuning_nm", &LaserParams::detuning_nm)
        .def_readwrite("fwhm_ps", &LaserParams::fwhm_ps)
        .def_readwrite("repetition_MHz", &LaserParams::repetition_MHz)
        .def_readwrite("area_pi", &LaserParams::area_pi)
        .def_readwrite("polarization_angle", &LaserParams::polarization_angle);

    // ---- pulses
    py::class_<PulseEnvelope>(m, "PulseEnvelope")
        .def_property_readonly("times", [](const PulseEnvelope& p) { return to_array(p.times()); })
        .def_property_readonly("amplitude", [](const PulseEnvelope& p) { return to_array(p.amplitude()); })
        .def_property_readonly("detuning", &PulseEnvelope::detuning)
        .def_property_readonly("fwhm", &PulseEnvelope::fwhm)
        .def("at", &PulseEnvelope::at)
        .def("area", &PulseEnvelope::area)
        .def("peak", &PulseEnvelope::peak);
    m.def("make_gaussian_pulse", &make_gaussian_pulse, py::arg("fwhm"), py::arg("area"), py::arg("detuning"),
          py::arg("grid_span"), py::arg("dt") = default_pulse_dt);
    m.def("make_tophat_spectrum_pulse", &make_tophat_spectrum_pulse, py::arg("spectral_fwhm"), py::arg("area"),
          py::arg("detuning"), py::arg("grid_span"), py::arg("rolloff") = 0.05,
          py::arg("dt") = default_pulse_dt);
    m.def("tophat_spectral_fwhm_for_duration", &tophat_spectral_fwhm_for_duration);
    m.def("measure_fwhm", [](const std::vector<double>& t, const std::vector<double>& a) {
        return measure_fwhm(t, a);
    });
    m.def("cavity_transmission", &cavity_transmission, py::arg("detuning"), py::arg("kappa"));
    m.def("intracavity_area", &intracavity_area, py::arg("input_power"), py::arg("detuning"), py::arg("kappa"),
          py::arg("calibration") = constants::pi);
    m.def("input_power_for_area", &input_power_for_area, py::arg("area"), py::arg("detuning"),
          py::arg("kappa"), py::arg("calibration") = constants::pi);

    // ---- configuration
    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def_static("from_profile", &Config::from_profile)
        .def_readwrite("qd", &Config::qd)
        .def_readwrite("cavity", &Config::cavity)
        .def_readwrite("bath", &Config::bath)
        .def_readwrite("laser", &Config::laser)
        .def("validate", &Config::validate)
        .def("set", [](Config& c, const std::string& name, double v) { set_parameter(c, name, v); })
        .def("get", [](const Config& c, const std::string& name) { return get_parameter(c, name); })
        .def("hash", [](const Config& c) { return config_hash(c); })
        .def("canonical_text", [](const Config& c) { return canonical_text(c); });
    m.def("load_config", &load_config, py::arg("path"));
    m.def(
        "parse_config",
        [](const std::string& text, const std::filesystem::path& base_dir) {
            std::istringstream in(text);
            return parse_config(in, base_dir);
        },
        py::arg("text"), py::arg("base_dir") = std::filesystem::path{});
    m.def("parameter_names", &parameter_names);

    // ---- dynamics
    m.def(
        "simulate",
        [](const Config& config, double area_pi) {
            const SourceModel model = make_source_model(config);
            const DriveHamiltonian drive = make_drive(model, laser_scheme(config), area_pi * constants::pi);
            EvolveOptions options = model.evolve;
            options.t_end = drive.envelope.end() + model.tail_lifetimes / model.qd.gamma;
            StateTrajectory trajectory;
            {
                py::gil_scoped_release release;
                trajectory = evolve(drive, model.qd, model.bath, ground_state(model.levels), options);
            }
            py::dict out = trajectory_to_dict(trajectory);
            out["photons"] = emission_probability(trajectory, model.qd.gamma).photons;
            return out;
        },
        py::arg("config"), py::arg("area_pi"),
        "Trajectory of the configured source driven at area_pi * pi.");
    m.def(
        "emission",
        [](const Config& config, double area_pi, std::optional<double> detuning_nm) {
            const SourceModel model = make_source_model(config);
            const ExcitationScheme scheme =
                detuning_nm ? scheme_for_detuning(config, *detuning_nm) : laser_scheme(config);
            py::gil_scoped_release release;
            return emission_after_pulse(model, scheme, area_pi * constants::pi);
        },
        py::arg("config"), py::arg("area_pi"), py::arg("detuning_nm") = py::none(),
        "Emitted photon number per pulse.");
    m.def(
        "figures_of_merit",
        [](const Config& config, double area_pi, unsigned jobs) {
            const SourceModel model = make_source_model(config);
            const SolverContext context = make_context(model, laser_scheme(config), area_pi * constants::pi,
                                                       correlation_options(config, jobs));
            SourceFigures figures;
            {
                py::gil_scoped_release release;
                figures = qdsps::figures_of_merit(context);
            }
            py::dict out;
            out["photons"] = figures.photons;
            out["g2"] = figures.purity.g2_zero;
            out["purity"] = figures.purity.purity;
            out["m_s"] = figures.indistinguishability.m_s;
            out["v_hom"] = figures.indistinguishability.v_hom;
            return out;
        },
        py::arg("config"), py::arg("area_pi"), py::arg("jobs") = 1);
    m.def("ms_from_hom", &ms_from_hom, py::arg("v_hom"), py::arg("g2"));
    m.def("hom_from_ms", &hom_from_ms, py::arg("m_s"), py::arg("g2"));

    // ---- polarization
    m.def("beat_parameter", &beat_parameter, py::arg("fss_ueV"), py::arg("t1_ps"));
    m.def("cross_polarized_intensity", &cross_polarized_intensity, py::arg("theta"), py::arg("fss_ueV"),
          py::arg("t1_ps"));
    m.def("degree_of_linear_polarization", &degree_of_linear_polarization, py::arg("i_par"),
          py::arg("i_perp"));
    m.def("dlp_with_misalignment", &dlp_with_misalignment, py::arg("misalign"), py::arg("fss_ueV"),
          py::arg("t1_ps"));
    m.def("misalignment_for_dlp", &misalignment_for_dlp, py::arg("dlp"), py::arg("fss_ueV"),
          py::arg("t1_ps"));
    m.def(
        "polar_scan",
        [](std::size_t points, double fss, double t1, double offset) {
            const PolarScan scan = qdsps::polar_scan(points, fss, t1, offset);
            py::dict out;
            out["angle"] = to_array(scan.angles);
            out["i_perp"] = to_array(scan.intensity_perp);
            out["i_par"] = to_array(scan.intensity_par);
            return out;
        },
        py::arg("points"), py::arg("fss_ueV"), py::arg("t1_ps"), py::arg("dipole_offset") = 0.0);

    // ---- efficiency
    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("uncertainty", &Estimate::uncertainty);
    py::class_<EfficiencyChain>(m, "EfficiencyChain")
        .def(py::init<>())
        .def(
            "add",
            [](EfficiencyChain& c, std::string name, double t, double u) -> EfficiencyChain& {
                return c.add(std::move(name), t, u);
            },
            py::arg("name"), py::arg("transmission"), py::arg("uncertainty") = 0.0,
            py::return_value_policy::reference_internal)
        .def("__len__", [](const EfficiencyChain& c) { return c.elements.size(); });
    m.def("chain_efficiency", &chain_efficiency);
    py::class_<DetectorModel>(m, "DetectorModel")
        .def(py::init([](double eta0, double dead_time_ns) { return DetectorModel{eta0, dead_time_ns}; }),
             py::arg("eta0"), py::arg("dead_time_ns"))
        .def_readwrite("eta0", &DetectorModel::eta0)
        .def_readwrite("dead_time_ns", &DetectorModel::dead_time_ns);
    m.def("detector_efficiency", &detector_efficiency, py::arg("model"), py::arg("rate_MHz"));
    m.def(
        "fit_detector",
        [](const std::vector<std::pair<double, double>>& points) {
            std::vector<DetectorPoint> pts;
            for (const auto& [rate, eff] : points) pts.push_back({rate, eff});
            return qdsps::fit_detector(pts).model;
        },
        py::arg("points"), "Fits eta0 and the dead time to (rate_MHz, efficiency) pairs.");
    m.def(
        "brightness_from_counts",
        [](double r_det, double r_laser, double eta) {
            const BrightnessEstimate b = qdsps::brightness_from_counts(r_det, r_laser, eta);
            return py::make_tuple(b.value, b.inconsistent);
        },
        py::arg("r_det_MHz"), py::arg("r_laser_MHz"), py::arg("eta_setup"));
    m.def("expected_brightness", &expected_brightness, py::arg("eta_ext"), py::arg("p_qd"));

    // ---- experiments
    m.def(
        "run_excitation_curves",
        [](const Config& config, unsigned jobs) {
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = qdsps::run_excitation_curves(config, jobs);
            }
            return sweep_to_dict(r);
        },
        py::arg("config"), py::arg("jobs") = 1);
    m.def(
        "run_power_scan",
        [](const Config& config, unsigned jobs) {
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = qdsps::run_power_scan(config, jobs);
            }
            return sweep_to_dict(r);
        },
        py::arg("config"), py::arg("jobs") = 1);
    m.def(
        "run_fom_map",
        [](const Config& config, unsigned jobs) {
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = qdsps::run_fom_map(config.map, config, jobs);
            }
            return sweep_to_dict(r);
        },
        py::arg("config"), py::arg("jobs") = 1);
    m.def(
        "calibrate_bath",
        [](const Config& config, std::optional<double> target) {
            CalibrationRecord record;
            {
                py::gil_scoped_release release;
                record = qdsps::calibrate_bath(target.value_or(config.calibration.target_ratio), config);
            }
            return calibration_to_dict(record);
        },
        py::arg("config"), py::arg("target") = py::none());
}
