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


#include "qdsps/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"

namespace qdsps {

namespace {

struct Parameter {
    const char* name;
    const char* label;
    std::function<void(Config&, double)> set;
    std::function<double(const Config&)> get;
};

std::size_t to_count(double v, const char* name) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
        throw ConfigError(std::string(name) + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

#define QDSPS_PARAM(NAME, LABEL, MEMBER)                                  \
    Parameter {                                                           \
        NAME, LABEL, [](Config& c, double v) { c.MEMBER = v; },           \
            [](const Config& c) { return static_cast<double>(c.MEMBER); } \
    }
#define QDSPS_COUNT(NAME, LABEL, MEMBER)                                            \
    Parameter {                                                                     \
        NAME, LABEL, [](Config& c, double v) { c.MEMBER = to_count(v, NAME); },     \
            [](const Config& c) { return static_cast<double>(c.MEMBER); }           \
    }

const std::vector<Parameter>& registry() {
    static const std::vector<Parameter> params = {
        QDSPS_PARAM("qd.transition_wavelength", "lambda0_nm", qd.transition_wavelength_nm),
        QDSPS_PARAM("qd.fss", "fss_ueV", qd.fss_ueV),
        QDSPS_PARAM("qd.radiative_rate_gamma", "gamma_per_ps", qd.gamma),
        QDSPS_PARAM("qd.pure_dephasing_rate", "gamma_d_per_ps", qd.pure_dephasing),
        QDSPS_PARAM("qd.dipole_angle_offset", "dipole_offset_rad", qd.dipole_angle_offset),
        QDSPS_PARAM("cavity.linewidth_kappa", "kappa_ueV", cavity.kappa_ueV),
        QDSPS_PARAM("cavity.mode_splitting", "mode_splitting_ueV", cavity.mode_splitting_ueV),
        QDSPS_PARAM("cavity.extraction_efficiency_eta_ext", "eta_ext", cavity.eta_ext),
        QDSPS_PARAM("phonon.coupling_alpha", "alpha_ps2", bath.alpha),
        QDSPS_PARAM("phonon.cutoff_omega_b", "omega_b_per_ps", bath.omega_b),
        QDSPS_PARAM("phonon.temperature", "temperature_K", bath.temperature_K),
        QDSPS_PARAM("laser.detuning_delta_lambda", "delta_lambda_nm", laser.detuning_nm),
        QDSPS_PARAM("laser.pulse_fwhm_tau", "tau_ps", laser.fwhm_ps),
        QDSPS_PARAM("laser.repetition_rate", "repetition_MHz", laser.repetition_MHz),
        QDSPS_PARAM("laser.pulse_area_theta", "area_pi", laser.area_pi),
        QDSPS_PARAM("laser.polarization_angle", "polarization_rad", laser.polarization_angle),
        QDSPS_PARAM("pulse.dt", "pulse_dt_ps", pulse.dt),
        QDSPS_PARAM("pulse.span_fwhm", "pulse_span_fwhm", pulse.span_fwhm),
        QDSPS_PARAM("pulse.tophat_rolloff", "tophat_rolloff", pulse.tophat_rolloff),
        QDSPS_PARAM("pulse.tophat_span_lobes", "tophat_span_lobes", pulse.tophat_span_lobes),
        Parameter{"numerics.levels", "levels",
                  [](Config& c, double v) {
                      if (v != 2.0 && v != 3.0) throw ConfigError("numerics.levels must be 2 or 3");
                      c.numerics.levels = static_cast<int>(v);
                  },
                  [](const Config& c) { return static_cast<double>(c.numerics.levels); }},
        QDSPS_PARAM("numerics.abs_tol", "abs_tol", numerics.abs_tol),
        QDSPS_PARAM("numerics.tail_lifetimes", "tail_lifetimes", numerics.tail_lifetimes),
        QDSPS_PARAM("numerics.tau_window_lifetimes", "tau_window_lifetimes", numerics.tau_window_lifetimes),
        QDSPS_PARAM("numerics.fine_step", "fine_step_ps", numerics.fine_step),
        QDSPS_PARAM("numerics.coarse_step", "coarse_step_ps", numerics.coarse_step),
        QDSPS_PARAM("numerics.etalon_bandwidth", "etalon_nm", numerics.etalon_bandwidth_nm),
        QDSPS_PARAM("curves.area_max", "curves_area_max_pi", curves.area_max_pi),
        QDSPS_COUNT("curves.points", "curves_points", curves.points),
        QDSPS_PARAM("powerscan.p_max_ratio", "p_max_ratio", powerscan.p_max_ratio),
        QDSPS_COUNT("powerscan.points", "powerscan_points", powerscan.points),
        QDSPS_PARAM("map.area_min", "map_area_min_pi", map.area_min_pi),
        QDSPS_PARAM("map.area_max", "map_area_max_pi", map.area_max_pi),
        QDSPS_PARAM("map.search_rel_tol", "map_search_rel_tol", map.search_rel_tol),
        QDSPS_PARAM("calibration.target_ratio", "target_ratio", calibration.target_ratio),
        QDSPS_PARAM("calibration.alpha_start", "alpha_start", calibration.alpha_start),
        QDSPS_PARAM("calibration.alpha_max", "alpha_max", calibration.alpha_max),
        QDSPS_PARAM("budget.detected_rate", "detected_rate_MHz", budget.detected_rate_MHz),
        QDSPS_PARAM("budget.detector_uncertainty", "detector_uncertainty", budget.detector_uncertainty),
        QDSPS_COUNT("polar.points", "polar_points", polar.points),
    };
    return params;
}

#undef QDSPS_PARAM
#undef QDSPS_COUNT

const Parameter* find_parameter(const std::string& name) {
    for (const auto& p : registry()) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
        throw ConfigError(key + ": not a number: '" + text + "'");
    }
    return value;
}

std::vector<std::string> split_words(const std::string& text) {
    std::string spaced = text;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream in(spaced);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> values;
    for (const auto& w : split_words(text)) values.push_back(parse_number(w, key));
    if (values.empty()) throw ConfigError(key + ": empty list");
    return values;
}

SweepAxis parse_axis(const std::string& text, const std::string& key) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError(key + ": expected 'parameter: v1 v2 ...'");
    SweepAxis axis{trim(text.substr(0, colon)), parse_list(text.substr(colon + 1), key)};
    if (!is_parameter(axis.parameter)) throw ConfigError(key + ": unknown parameter '" + axis.parameter + "'");
    return axis;
}

bool numbered_key(const std::string& key, const std::string& prefix, int& index) {
    if (key.rfind(prefix, 0) != 0 || key.size() == prefix.size()) return false;
    const std::string digits = key.substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) return false;
    if (digits.size() > 3) return false;
    index = std::stoi(digits);
    return index > 0;
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out += ' ';
        out += format_number(values[k], 17);
    }
    return out;
}

}  // namespace

void SweepSpec::validate() const {
    if (axes.empty()) throw ConfigError("map: at least one axis is required");
    for (const auto& axis : axes) {
        if (!is_parameter(axis.parameter)) throw ConfigError("map: unknown parameter '" + axis.parameter + "'");
        if (axis.values.empty()) throw ConfigError("map: axis '" + axis.parameter + "' has no values");
    }
    for (const auto& [name, value] : fixed) {
        if (!is_parameter(name)) throw ConfigError("map.fixed: unknown parameter '" + name + "'");
    }
    if (metrics.empty()) throw ConfigError("map.metrics: at least one metric is required");
    for (const auto& m : metrics) {
        if (m != "occupation" && m != "g2" && m != "ms" && m != "bfl") {
            throw ConfigError("map.metrics: unknown metric '" + m + "' (occupation, g2, ms, bfl)");
        }
    }
    if (!(area_min_pi > 0.0 && area_max_pi > area_min_pi)) throw ConfigError("map: need 0 < area_min < area_max");
    if (!(search_rel_tol > 0.0 && search_rel_tol < 0.5)) throw ConfigError("map.search_rel_tol must lie in (0, 0.5)");
}

Config Config::from_profile(SampleProfile profile) {
    Config config;
    config.qd = QDParams::from_profile(profile);
    config.cavity = CavityParams::from_profile(profile);
    config.bath.temperature_K = profile == SampleProfile::A ? 8.0 : 7.0;
    return config;
}

void Config::validate() const {
    try {
        qd.validate();
        cavity.validate();
        bath.validate();
        laser.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!(pulse.dt > 0.0)) throw ConfigError("pulse.dt must be positive");
    if (!(pulse.span_fwhm >= 6.0)) throw ConfigError("pulse.span_fwhm must be at least 6");
    if (!(numerics.abs_tol > 0.0)) throw ConfigError("numerics.abs_tol must be positive");
    if (!(numerics.tail_lifetimes > 0.0) || !(numerics.tau_window_lifetimes > 0.0)) {
        throw ConfigError("numerics: windows must be positive");
    }
    if (!(numerics.etalon_bandwidth_nm >= 0.0)) throw ConfigError("numerics.etalon_bandwidth must be >= 0");
    if (curves.points < 2 || !(curves.area_max_pi > 0.0)) throw ConfigError("curves: need >= 2 points and area_max > 0");
    if (powerscan.points < 2 || !(powerscan.p_max_ratio > 0.0)) {
        throw ConfigError("powerscan: need >= 2 points and p_max_ratio > 0");
    }
    if (!(calibration.target_ratio > 0.0 && calibration.target_ratio < 1.0)) {
        throw ConfigError("calibration.target_ratio must lie in (0, 1)");
    }
    if (!(calibration.alpha_start > 0.0 && calibration.alpha_max > calibration.alpha_start)) {
        throw ConfigError("calibration: need 0 < alpha_start < alpha_max");
    }
    if (polar.points == 0) throw ConfigError("polar.points must be positive");
    map.validate();
}

Config parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const std::vector<std::string> sections = {"qd",     "cavity", "phonon",      "laser",  "pulse",
                                                      "numerics", "curves", "powerscan", "map",    "calibration",
                                                      "budget", "polar"};
    for (const auto& [section, body] : tree) {
        if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
            throw ConfigError("config: unknown section [" + section + "]");
        }
        if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    }

    Config config;
    if (const auto profile = tree.get_optional<std::string>("qd.profile")) {
        const std::string p = trim(*profile);
        if (p == "A" || p == "a") {
            config = Config::from_profile(SampleProfile::A);
        } else if (p == "B" || p == "b") {
            config = Config::from_profile(SampleProfile::B);
        } else {
            throw ConfigError("qd.profile must be A or B");
        }
    }

    std::optional<double> bandwidth;
    std::optional<double> indistinguishability;
    bool gamma_given = false;
    bool dephasing_given = false;
    bool axes_given = false;
    std::map<int, SweepAxis> axes;
    std::map<int, ChainElement> elements;

    for (const auto& [section, body] : tree) {
        for (const auto& [key, node] : body) {
            const std::string name = section + "." + key;
            const std::string value = node.data();
            int index = 0;
            if (const Parameter* p = find_parameter(name)) {
                p->set(config, parse_number(value, name));
                gamma_given |= name == "qd.radiative_rate_gamma";
                dephasing_given |= name == "qd.pure_dephasing_rate";
            } else if (name == "qd.profile") {
                // applied above
            } else if (name == "qd.emission_bandwidth") {
                bandwidth = parse_number(value, name);
            } else if (name == "qd.indistinguishability") {
                indistinguishability = parse_number(value, name);
            } else if (name == "pulse.shape") {
                const std::string shape = trim(value);
                if (shape == "gaussian") {
                    config.pulse.shape = PulseShape::gaussian;
                } else if (shape == "tophat") {
                    config.pulse.shape = PulseShape::tophat;
                } else {
                    throw ConfigError("pulse.shape must be gaussian or tophat");
                }
            } else if (name == "curves.detunings") {
                config.curves.detunings_nm = parse_list(value, name);
            } else if (section == "map" && numbered_key(key, "axis", index)) {
                axes[index] = parse_axis(value, name);
                axes_given = true;
            } else if (name == "map.metrics") {
                config.map.metrics = split_words(value);
            } else if (name == "map.fixed") {
                config.map.fixed.clear();
                for (const auto& word : split_words(value)) {
                    const auto eq = word.find('=');
                    if (eq == std::string::npos) throw ConfigError("map.fixed: expected name=value, got '" + word + "'");
                    const std::string param = word.substr(0, eq);
                    if (!is_parameter(param)) throw ConfigError("map.fixed: unknown parameter '" + param + "'");
                    config.map.fixed.emplace_back(param, parse_number(word.substr(eq + 1), name));
                }
            } else if (name == "budget.detector_points") {
                config.budget.detector_points.clear();
                for (const auto& word : split_words(value)) {
                    const auto colon = word.find(':');
                    if (colon == std::string::npos) {
                        throw ConfigError("budget.detector_points: expected rate:efficiency, got '" + word + "'");
                    }
                    config.budget.detector_points.push_back(
                        {parse_number(word.substr(0, colon), name), parse_number(word.substr(colon + 1), name)});
                }
            } else if (name == "budget.chain_csv") {
                std::filesystem::path path = trim(value);
                if (path.is_relative()) path = base_dir / path;
                std::ifstream file(path);
                if (!file) throw ConfigError("budget.chain_csv: cannot open " + path.string());
                const auto chain = read_chain_csv(file);
                config.budget.chain.elements.insert(config.budget.chain.elements.end(), chain.elements.begin(),
                                                    chain.elements.end());
            } else if (section == "budget" && numbered_key(key, "element", index)) {
                std::vector<std::string> cells;
                std::stringstream row(value);
                for (std::string cell; std::getline(row, cell, ',');) cells.push_back(trim(cell));
                if (cells.size() < 2 || cells.size() > 3) {
                    throw ConfigError(name + ": expected 'name, transmission[, uncertainty]'");
                }
                elements[index] = {cells[0], parse_number(cells[1], name),
                                   cells.size() == 3 ? parse_number(cells[2], name) : 0.0};
            } else {
                throw ConfigError("config: unknown key '" + name + "'");
            }
        }
    }

    if (bandwidth) {
        if (gamma_given) throw ConfigError("qd: give either radiative_rate_gamma or emission_bandwidth, not both");
        try {
            config.qd.gamma = gamma_from_linewidth(*bandwidth, config.qd.transition_wavelength_nm);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    if (indistinguishability) {
        if (dephasing_given) throw ConfigError("qd: give either pure_dephasing_rate or indistinguishability, not both");
        try {
            config.qd.pure_dephasing = dephasing_for_indistinguishability(config.qd.gamma, *indistinguishability);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    if (axes_given) {
        config.map.axes.clear();
        for (auto& [index, axis] : axes) config.map.axes.push_back(std::move(axis));
    }
    for (auto& [index, element] : elements) config.budget.chain.elements.push_back(std::move(element));
    try {
        config.budget.chain.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    config.validate();
    return config;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open config file " + path.string());
    return parse_config(file, path.parent_path());
}

void set_parameter(Config& config, const std::string& name, double value) {
    const Parameter* p = find_parameter(name);
    if (!p) throw ConfigError("unknown parameter '" + name + "'");
    p->set(config, value);
}

double get_parameter(const Config& config, const std::string& name) {
    const Parameter* p = find_parameter(name);
    if (!p) throw ConfigError("unknown parameter '" + name + "'");
    return p->get(config);
}

bool is_parameter(const std::string& name) { return find_parameter(name) != nullptr; }

std::vector<std::string> parameter_names() {
    std::vector<std::string> names;
    for (const auto& p : registry()) names.emplace_back(p.name);
    return names;
}

std::string parameter_label(const std::string& name) {
    const Parameter* p = find_parameter(name);
    if (!p) throw ConfigError("unknown parameter '" + name + "'");
    return p->label;
}

std::string canonical_text(const Config& config) {
    std::ostringstream out;
    for (const auto& p : registry()) out << p.name << '=' << format_number(p.get(config), 17) << '\n';
    out << "pulse.shape=" << (config.pulse.shape == PulseShape::gaussian ? "gaussian" : "tophat") << '\n';
    out << "curves.detunings=" << format_list(config.curves.detunings_nm) << '\n';
    for (std::size_t k = 0; k < config.map.axes.size(); ++k) {
        out << "map.axis" << k + 1 << '=' << config.map.axes[k].parameter << ": "
            << format_list(config.map.axes[k].values) << '\n';
    }
    out << "map.fixed=";
    for (const auto& [name, value] : config.map.fixed) out << name << '=' << format_number(value, 17) << ' ';
    out << "\nmap.metrics=";
    for (const auto& m : config.map.metrics) out << m << ' ';
    out << "\nbudget.detector_points=";
    for (const auto& p : config.budget.detector_points) {
        out << format_number(p.rate_MHz, 17) << ':' << format_number(p.efficiency, 17) << ' ';
    }
    out << '\n';
    for (const auto& e : config.budget.chain.elements) {
        out << "budget.element=" << e.name << ',' << format_number(e.transmission, 17) << ','
            << format_number(e.uncertainty, 17) << '\n';
    }
    return out.str();
}

std::string config_hash(const Config& config) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_text(config)) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string hex(16, '0');
    for (int k = 15; k >= 0; --k) {
        hex[static_cast<std::size_t>(k)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return hex;
}

SourceModel make_source_model(const Config& config) {
    SourceModel model;
    model.qd = config.qd;
    model.bath = config.bath;
    model.pulse = config.pulse;
    model.pulse.fwhm_ps = config.laser.fwhm_ps;
    model.levels = config.numerics.levels;
    model.polarization_angle = config.laser.polarization_angle - config.qd.dipole_angle_offset;
    model.tail_lifetimes = config.numerics.tail_lifetimes;
    model.evolve.control.abs_tol = config.numerics.abs_tol;
    return model;
}

ExcitationScheme scheme_for_detuning(const Config& config, double detuning_nm) {
    if (detuning_nm == 0.0) return ExcitationScheme::resonant();
    return ExcitationScheme::phonon(detuning_rate_from_wavelength(detuning_nm, config.qd.transition_wavelength_nm));
}

ExcitationScheme laser_scheme(const Config& config) { return scheme_for_detuning(config, config.laser.detuning_nm); }

CorrelationOptions correlation_options(const Config& config, unsigned jobs) {
    CorrelationOptions options;
    options.tau_window_lifetimes = config.numerics.tau_window_lifetimes;
    options.fine_step = config.numerics.fine_step;
    options.coarse_step = config.numerics.coarse_step;
    options.control.abs_tol = config.numerics.abs_tol;
    options.jobs = jobs;
    if (config.numerics.etalon_bandwidth_nm > 0.0) {
        options.etalon = SpectralFilter::from_bandwidth(config.numerics.etalon_bandwidth_nm,
                                                        config.qd.transition_wavelength_nm);
    }
    return options;
}

}  // namespace qdsps
