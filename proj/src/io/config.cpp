#include "eitlab/io/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "eitlab/errors.hpp"
#include "eitlab/io/csv.hpp"

namespace eit::io {

namespace {

std::string where(const std::string& source, const YAML::Mark& mark) {
    std::ostringstream os;
    os << source;
    if (!mark.is_null()) os << ":" << mark.line + 1 << ":" << mark.column + 1;
    return os.str();
}

// A mapping node plus the set of keys the schema has consumed so far.
class Section {
public:
    Section(YAML::Node node, std::string path, const std::string& source)
        : node_(std::move(node)), path_(std::move(path)), source_(source) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            fail(node_.Mark(), path_.empty() ? "document" : path_, "expected a mapping");
    }

    std::optional<double> number(const std::string& key) {
        auto n = take(key);
        if (!n) return std::nullopt;
        return to_number(*n, key);
    }

    std::optional<std::int64_t> integer(const std::string& key) {
        auto v = number(key);
        if (!v) return std::nullopt;
        if (*v != std::floor(*v) || std::abs(*v) > 9.007199254740992e15)
            fail(node_[key].Mark(), qualified(key), "expected an integer");
        return static_cast<std::int64_t>(*v);
    }

    std::optional<std::uint64_t> unsigned64(const std::string& key) {
        auto n = take(key);
        if (!n) return std::nullopt;
        const std::string& raw = n->IsScalar() ? n->Scalar() : std::string();
        std::uint64_t v = 0;
        const char* end = raw.data() + raw.size();
        auto [ptr, ec] = std::from_chars(raw.data(), end, v);
        if (raw.empty() || ec != std::errc() || ptr != end)
            fail(n->Mark(), qualified(key), "expected a non-negative 64-bit integer");
        return v;
    }

    std::optional<std::string> text(const std::string& key) {
        auto n = take(key);
        if (!n) return std::nullopt;
        if (!n->IsScalar()) fail(n->Mark(), qualified(key), "expected a scalar");
        return n->Scalar();
    }

    std::optional<bool> flag(const std::string& key) {
        auto n = take(key);
        if (!n) return std::nullopt;
        try {
            return n->as<bool>();
        } catch (const YAML::Exception&) {
            fail(n->Mark(), qualified(key), "expected true or false");
        }
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        auto n = take(key);
        if (!n) return std::nullopt;
        if (!n->IsSequence()) fail(n->Mark(), qualified(key), "expected a list of numbers");
        std::vector<double> out;
        for (const auto& item : *n) out.push_back(to_number(item, key));
        return out;
    }

    std::optional<Section> child(const std::string& key) {
        auto n = take(key);
        if (!n) return std::nullopt;
        return Section(*n, qualified(key), source_);
    }

    // Rejects keys the schema did not consume.
    void finish() const {
        if (!node_ || node_.IsNull()) return;
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (consumed_.count(key)) continue;
            std::string hint = "unknown key";
            for (const auto& known : known_)
                if (known.rfind(key + "_", 0) == 0) hint = "missing unit suffix (expected " + known + ")";
            fail(kv.first.Mark(), qualified(key), hint);
        }
    }

    void expect(std::initializer_list<const char*> keys) {
        for (const char* k : keys) known_.insert(k);
    }

    [[noreturn]] void fail(const YAML::Mark& mark, const std::string& key, const std::string& what) const {
        throw ConfigError(where(source_, mark) + ": " + key + ": " + what);
    }

private:
    std::optional<YAML::Node> take(const std::string& key) {
        known_.insert(key);
        if (!node_ || node_.IsNull()) return std::nullopt;
        YAML::Node n = node_[key];
        if (!n.IsDefined()) return std::nullopt;
        consumed_.insert(key);
        if (n.IsNull()) return std::nullopt;
        return n;
    }

    double to_number(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n.Mark(), qualified(key), "expected a number");
        try {
            const double v = n.as<double>();
            if (!std::isfinite(v)) fail(n.Mark(), qualified(key), "value must be finite");
            return v;
        } catch (const YAML::Exception&) {
            fail(n.Mark(), qualified(key), "expected a number, got '" + n.Scalar() + "'");
        }
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    YAML::Node node_;
    std::string path_;
    const std::string& source_;
    std::set<std::string> consumed_;
    std::set<std::string> known_;
};

VaporPressureCorrelation::Branch branch_from(const std::vector<double>& v, Section& s, const char* key) {
    if (v.size() != 4) s.fail(YAML::Mark::null_mark(), key, "expected four coefficients [A, B, C, D]");
    return {v[0], v[1], v[2], v[3]};
}

void check_fixed(double value, double fixed, const char* key) {
    if (std::abs(value - fixed) > 1e-12 * std::abs(fixed))
        throw ConfigError(std::string("constants.") + key +
                          ": fundamental constants are fixed at their CODATA 2018 values");
}

ProfileShape parse_shape(const std::string& s) {
    if (s == "gaussian") return ProfileShape::Gaussian;
    if (s == "lorentzian") return ProfileShape::LorentzianApprox;
    throw ConfigError("doppler.shape: expected 'gaussian' or 'lorentzian', got '" + s + "'");
}

RunConfig from_node(const YAML::Node& root, const std::string& source) {
    RunConfig cfg;
    Section top(root, "", source);
    // A manifest wraps the config; its other fields are informational.
    if (root.IsMap() && root["config"].IsDefined() && root["tool"].IsDefined()) {
        return from_node(root["config"], source);
    }

    if (auto c = top.child("constants")) {
        auto& k = cfg.constants;
        if (auto v = c->number("hbar_j_s")) check_fixed(k.hbar = *v, constants::hbar, "hbar_j_s");
        if (auto v = c->number("epsilon0_f_per_m")) check_fixed(k.epsilon0 = *v, constants::epsilon0, "epsilon0_f_per_m");
        if (auto v = c->number("speed_of_light_m_per_s"))
            check_fixed(k.speed_of_light = *v, constants::speed_of_light, "speed_of_light_m_per_s");
        if (auto v = c->number("boltzmann_j_per_k")) check_fixed(k.boltzmann = *v, constants::boltzmann, "boltzmann_j_per_k");
        if (auto v = c->number("atom_mass_u")) k.atom_mass_u = *v;
        if (auto v = c->number("dipole_moment_c_m")) k.dipole_moment = *v;
        if (auto v = c->number("wavelength_m")) k.wavelength = *v;
        if (auto v = c->number("gamma_hz")) k.gamma_hz = *v;
        if (auto v = c->number("gamma_b_fraction")) k.gamma_b_fraction = *v;
        c->finish();
    }
    if (auto s = top.child("system")) {
        auto& y = cfg.system;
        if (auto v = s->number("gamma_bc_hz")) y.gamma_bc_hz = *v;
        if (auto v = s->number("gamma_pe_hz")) y.gamma_pe_hz = *v;
        if (auto v = s->number("delta_pump_hz")) y.delta_pump_hz = *v;
        if (auto v = s->number("omega_b_hz")) y.omega_b_hz = *v;
        if (auto v = s->number("omega_c_hz")) y.omega_c_hz = *v;
        if (auto v = s->number("pump_power_w")) y.pump_power = *v;
        if (auto v = s->flag("allow_strong_signal")) y.allow_strong_signal = *v;
        s->finish();
    }
    if (auto d = top.child("doppler")) {
        if (auto v = d->text("shape")) cfg.doppler.shape = parse_shape(*v);
        if (auto v = d->number("temperature_k")) cfg.doppler.temperature = *v;
        d->finish();
    }
    if (auto c = top.child("cell")) {
        auto& k = cfg.cell;
        if (auto v = c->number("temperature_k")) k.temperature = *v;
        if (auto v = c->number("length_m")) k.length = *v;
        if (auto v = c->number("beam_diameter_m")) k.beam_diameter = *v;
        if (auto v = c->text("buffer_gas")) k.buffer_gas = *v;
        if (auto v = c->number("buffer_pressure_torr")) k.buffer_pressure_torr = *v;
        if (auto v = c->number("number_density_per_m3")) k.number_density = *v;
        if (auto v = c->number("pump_cross_section_m2")) k.pump_cross_section = *v;
        if (auto v = c->text("label")) k.label = *v;
        if (auto v = c->text("configuration")) k.configuration = *v;
        if (auto vap = c->child("vapor")) {
            auto& p = k.vapor;
            if (auto v = vap->text("name")) p.name = *v;
            if (auto v = vap->numbers("solid")) p.solid = branch_from(*v, *vap, "cell.vapor.solid");
            if (auto v = vap->numbers("liquid")) p.liquid = branch_from(*v, *vap, "cell.vapor.liquid");
            if (auto v = vap->number("melting_point_k")) p.melting_point = *v;
            if (auto v = vap->number("t_min_k")) p.t_min = *v;
            if (auto v = vap->number("t_max_k")) p.t_max = *v;
            vap->finish();
        }
        c->finish();
    }
    if (auto s = top.child("sweep")) {
        auto& w = cfg.sweep;
        s->expect({"powers_w", "power_start_w", "power_stop_w"});
        if (auto v = s->numbers("powers_w")) w.powers = *v;
        auto start = s->number("power_start_w");
        auto stop = s->number("power_stop_w");
        auto count = s->integer("power_count");
        if (start || stop || count) {
            if (!(start && stop && count)) throw ConfigError(source + ": sweep: power_start_w, power_stop_w and power_count go together");
            if (*count < 2) throw ConfigError(source + ": sweep.power_count: must be >= 2");
            w.powers.clear();
            for (std::int64_t i = 0; i < *count; ++i)
                w.powers.push_back(*start + (*stop - *start) * static_cast<double>(i) / static_cast<double>(*count - 1));
        }
        if (auto v = s->numbers("temperatures_k")) w.temperatures = *v;
        if (auto v = s->integer("delta2_points")) {
            if (*v < 3) throw ConfigError(source + ": sweep.delta2_points: must be >= 3");
            w.points = static_cast<std::size_t>(*v);
        }
        if (auto v = s->number("delta2_half_span_fwhm")) w.half_span_fwhm = *v;
        if (auto v = s->number("delta2_half_span_hz")) w.half_span_hz = *v;
        s->finish();
    }
    if (auto n = top.child("numerics")) {
        auto& u = cfg.numerics;
        if (auto v = n->number("quad_rel_tol")) u.quad.rel_tol = *v;
        if (auto v = n->number("quad_abs_tol")) u.quad.abs_tol = *v;
        if (auto v = n->integer("quad_max_subdivisions")) u.quad.max_subdivisions = static_cast<int>(*v);
        if (auto v = n->number("quad_truncation_half_widths")) u.quad.truncation_half_widths = *v;
        if (auto v = n->integer("fit_max_iterations")) u.lm.max_iterations = static_cast<int>(*v);
        if (auto v = n->number("fit_step_tol")) u.lm.step_tol = *v;
        if (auto v = n->number("fit_jacobian_step")) u.lm.jacobian_step = *v;
        if (auto v = n->integer("n_slices")) cfg.cell.n_slices = static_cast<int>(*v);
        if (auto v = n->integer("exchange_points")) {
            if (*v < 3) throw ConfigError(source + ": numerics.exchange_points: must be >= 3");
            u.exchange_points = static_cast<std::size_t>(*v);
        }
        if (auto v = n->number("exchange_half_span_fwhm")) u.exchange_half_span_fwhm = *v;
        n->finish();
    }
    if (auto v = top.unsigned64("seed")) cfg.seed = *v;
    top.finish();
    cfg.validate();
    return cfg;
}

}  // namespace

RunConfig::RunConfig() {
    for (int i = 0; i < 12; ++i) sweep.powers.push_back(1.0e-4 + 1.0e-4 * i);
    for (int i = 0; i < 5; ++i) sweep.temperatures.push_back(333.15 + 10.0 * i);
}

double RunConfig::w_d() const {
    const double t = doppler.temperature ? *doppler.temperature : cell.temperature;
    return doppler_width(t, constants.wavelength, constants.atom_mass_u * eit::constants::atomic_mass_unit);
}

ScanGrid RunConfig::scan_grid() const {
    ScanGrid g;
    g.points = sweep.points;
    g.half_span_fwhm = sweep.half_span_fwhm;
    if (sweep.half_span_hz) g.half_span = hz_to_rad(*sweep.half_span_hz);
    return g;
}

ScanGrid RunConfig::exchange_grid() const {
    ScanGrid g;
    g.points = numerics.exchange_points;
    g.half_span_fwhm = numerics.exchange_half_span_fwhm;
    return g;
}

DopplerProfile RunConfig::profile() const {
    const double t = doppler.temperature ? *doppler.temperature : cell.temperature;
    return DopplerProfile::thermal(t, constants.wavelength,
                                   constants.atom_mass_u * eit::constants::atomic_mass_unit, doppler.shape);
}

LambdaSystem RunConfig::lambda_system() const {
    LambdaSystem s;
    const double g = gamma();
    s.gamma_b_decay = constants.gamma_b_fraction * g;
    s.gamma_c_decay = g - s.gamma_b_decay;
    s.gamma_bc = hz_to_rad(system.gamma_bc_hz);
    s.gamma_pe = hz_to_rad(system.gamma_pe_hz);
    s.delta_pump = hz_to_rad(system.delta_pump_hz);
    s.omega_b = system.omega_b_hz ? hz_to_rad(*system.omega_b_hz) : 0.0;
    s.omega_c = system.omega_c_hz ? hz_to_rad(*system.omega_c_hz)
                                  : optics().rabi(system.pump_power);
    s.allow_strong_signal = system.allow_strong_signal;
    return s;
}

MediumConfig RunConfig::medium() const {
    MediumConfig m;
    m.number_density = cell.number_density ? *cell.number_density : rb_number_density(cell.temperature, cell.vapor);
    m.dipole_moment = constants.dipole_moment;
    m.cell_length = cell.length;
    m.beam_diameter = cell.beam_diameter;
    m.buffer_gas = cell.buffer_gas;
    m.buffer_pressure_torr = cell.buffer_pressure_torr;
    m.signal_wavelength = constants.wavelength;
    return m;
}

CellModel RunConfig::cell_model() const {
    CellModel c;
    c.medium = medium();
    c.temperature = cell.temperature;
    c.n_slices = cell.n_slices;
    c.vapor = cell.vapor;
    c.density_from_vapor = !cell.number_density.has_value();
    c.pump_cross_section = cell.pump_cross_section;
    return c;
}

PowerSweep RunConfig::optics() const {
    PowerSweep p;
    p.beam_diameter = cell.beam_diameter;
    p.dipole_moment = constants.dipole_moment;
    return p;
}

PowerSweep RunConfig::power_sweep() const {
    PowerSweep p = optics();
    p.powers = sweep.powers;
    return p;
}

void RunConfig::validate() const {
    auto positive = [](double v, const char* key) {
        if (!(v > 0)) throw ConfigError(std::string(key) + ": must be > 0");
    };
    positive(constants.atom_mass_u, "constants.atom_mass_u");
    positive(constants.dipole_moment, "constants.dipole_moment_c_m");
    positive(constants.wavelength, "constants.wavelength_m");
    positive(constants.gamma_hz, "constants.gamma_hz");
    if (!(constants.gamma_b_fraction >= 0 && constants.gamma_b_fraction <= 1))
        throw ConfigError("constants.gamma_b_fraction: must lie in [0, 1]");
    if (system.gamma_bc_hz < 0) throw ConfigError("system.gamma_bc_hz: must be >= 0");
    if (system.gamma_pe_hz < 0) throw ConfigError("system.gamma_pe_hz: must be >= 0");
    if (system.omega_c_hz && *system.omega_c_hz < 0) throw ConfigError("system.omega_c_hz: must be >= 0");
    positive(system.pump_power, "system.pump_power_w");
    positive(cell.temperature, "cell.temperature_k");
    positive(cell.length, "cell.length_m");
    positive(cell.beam_diameter, "cell.beam_diameter_m");
    if (cell.number_density) positive(*cell.number_density, "cell.number_density_per_m3");
    if (cell.pump_cross_section < 0) throw ConfigError("cell.pump_cross_section_m2: must be >= 0");
    if (cell.n_slices < 16) throw ConfigError("numerics.n_slices: must be >= 16");
    if (cell.configuration != "zeeman" && cell.configuration != "hyperfine")
        throw ConfigError("cell.configuration: expected 'zeeman' or 'hyperfine'");
    if (doppler.temperature) positive(*doppler.temperature, "doppler.temperature_k");
    for (std::size_t i = 0; i < sweep.powers.size(); ++i) {
        positive(sweep.powers[i], "sweep.powers_w");
        if (i > 0 && !(sweep.powers[i] > sweep.powers[i - 1]))
            throw ConfigError("sweep.powers_w: must be strictly ascending");
    }
    for (double t : sweep.temperatures) positive(t, "sweep.temperatures_k");
    positive(sweep.half_span_fwhm, "sweep.delta2_half_span_fwhm");
    if (sweep.half_span_hz) positive(*sweep.half_span_hz, "sweep.delta2_half_span_hz");
    positive(numerics.quad.rel_tol, "numerics.quad_rel_tol");
    if (numerics.quad.abs_tol < 0) throw ConfigError("numerics.quad_abs_tol: must be >= 0");
    if (numerics.quad.max_subdivisions < 1) throw ConfigError("numerics.quad_max_subdivisions: must be >= 1");
    positive(numerics.quad.truncation_half_widths, "numerics.quad_truncation_half_widths");
    if (numerics.lm.max_iterations < 1) throw ConfigError("numerics.fit_max_iterations: must be >= 1");
    positive(numerics.lm.step_tol, "numerics.fit_step_tol");
    positive(numerics.lm.jacobian_step, "numerics.fit_jacobian_step");
    positive(numerics.exchange_half_span_fwhm, "numerics.exchange_half_span_fwhm");
    // The vapor correlation's window is checked here so errors surface at load time.
    if (!cell.number_density) {
        try {
            (void)rb_number_density(cell.temperature, cell.vapor);
        } catch (const RangeError& e) {
            throw RangeError(std::string("cell.temperature_k: ") + e.what());
        }
    }
}

std::string RunConfig::to_yaml() const {
    const auto num = [](double v) { return format_number(v); };
    const auto list = [&](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s + "]";
    };
    const auto quoted = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "constants:\n"
       << "  hbar_j_s: " << num(constants.hbar) << "\n"
       << "  epsilon0_f_per_m: " << num(constants.epsilon0) << "\n"
       << "  speed_of_light_m_per_s: " << num(constants.speed_of_light) << "\n"
       << "  boltzmann_j_per_k: " << num(constants.boltzmann) << "\n"
       << "  atom_mass_u: " << num(constants.atom_mass_u) << "\n"
       << "  dipole_moment_c_m: " << num(constants.dipole_moment) << "\n"
       << "  wavelength_m: " << num(constants.wavelength) << "\n"
       << "  gamma_hz: " << num(constants.gamma_hz) << "\n"
       << "  gamma_b_fraction: " << num(constants.gamma_b_fraction) << "\n";
    os << "system:\n"
       << "  gamma_bc_hz: " << num(system.gamma_bc_hz) << "\n"
       << "  gamma_pe_hz: " << num(system.gamma_pe_hz) << "\n"
       << "  delta_pump_hz: " << num(system.delta_pump_hz) << "\n";
    if (system.omega_b_hz) os << "  omega_b_hz: " << num(*system.omega_b_hz) << "\n";
    if (system.omega_c_hz) os << "  omega_c_hz: " << num(*system.omega_c_hz) << "\n";
    os << "  pump_power_w: " << num(system.pump_power) << "\n"
       << "  allow_strong_signal: " << (system.allow_strong_signal ? "true" : "false") << "\n";
    os << "doppler:\n"
       << "  shape: " << (doppler.shape == ProfileShape::Gaussian ? "gaussian" : "lorentzian") << "\n";
    if (doppler.temperature) os << "  temperature_k: " << num(*doppler.temperature) << "\n";
    os << "cell:\n"
       << "  temperature_k: " << num(cell.temperature) << "\n"
       << "  length_m: " << num(cell.length) << "\n"
       << "  beam_diameter_m: " << num(cell.beam_diameter) << "\n"
       << "  buffer_gas: " << quoted(cell.buffer_gas) << "\n"
       << "  buffer_pressure_torr: " << num(cell.buffer_pressure_torr) << "\n";
    if (cell.number_density) os << "  number_density_per_m3: " << num(*cell.number_density) << "\n";
    os << "  pump_cross_section_m2: " << num(cell.pump_cross_section) << "\n"
       << "  label: " << quoted(cell.label) << "\n"
       << "  configuration: " << cell.configuration << "\n"
       << "  vapor:\n"
       << "    name: " << quoted(cell.vapor.name) << "\n"
       << "    solid: " << list({cell.vapor.solid.a, cell.vapor.solid.b, cell.vapor.solid.c, cell.vapor.solid.d}) << "\n"
       << "    liquid: " << list({cell.vapor.liquid.a, cell.vapor.liquid.b, cell.vapor.liquid.c, cell.vapor.liquid.d}) << "\n"
       << "    melting_point_k: " << num(cell.vapor.melting_point) << "\n"
       << "    t_min_k: " << num(cell.vapor.t_min) << "\n"
       << "    t_max_k: " << num(cell.vapor.t_max) << "\n";
    os << "sweep:\n"
       << "  powers_w: " << list(sweep.powers) << "\n"
       << "  temperatures_k: " << list(sweep.temperatures) << "\n"
       << "  delta2_points: " << sweep.points << "\n"
       << "  delta2_half_span_fwhm: " << num(sweep.half_span_fwhm) << "\n";
    if (sweep.half_span_hz) os << "  delta2_half_span_hz: " << num(*sweep.half_span_hz) << "\n";
    os << "numerics:\n"
       << "  quad_rel_tol: " << num(numerics.quad.rel_tol) << "\n"
       << "  quad_abs_tol: " << num(numerics.quad.abs_tol) << "\n"
       << "  quad_max_subdivisions: " << numerics.quad.max_subdivisions << "\n"
       << "  quad_truncation_half_widths: " << num(numerics.quad.truncation_half_widths) << "\n"
       << "  fit_max_iterations: " << numerics.lm.max_iterations << "\n"
       << "  fit_step_tol: " << num(numerics.lm.step_tol) << "\n"
       << "  fit_jacobian_step: " << num(numerics.lm.jacobian_step) << "\n"
       << "  n_slices: " << cell.n_slices << "\n"
       << "  exchange_points: " << numerics.exchange_points << "\n"
       << "  exchange_half_span_fwhm: " << num(numerics.exchange_half_span_fwhm) << "\n";
    os << "seed: " << seed << "\n";
    return os.str();
}

RunConfig parse_config(const std::string& text, const std::string& source_name) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(where(source_name, e.mark) + ": " + e.msg);
    }
    if (root.IsNull()) return RunConfig{};
    return from_node(root, source_name);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

ManifestOptions manifest_options(const std::filesystem::path& path) {
    ManifestOptions out;
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw ConfigError(where(path.string(), e.mark) + ": " + e.msg);
    }
    if (!root.IsMap() || !root["tool"].IsDefined() || !root["config"].IsDefined()) return out;
    if (root["model"].IsDefined() && root["model"].IsScalar()) out.model = root["model"].as<std::string>();
    if (root["noise_pct"].IsDefined() && root["noise_pct"].IsScalar()) out.noise_pct = root["noise_pct"].as<double>();
    if (root["input"].IsDefined() && root["input"].IsScalar()) out.input = root["input"].as<std::string>();
    return out;
}

}  // namespace eit::io
