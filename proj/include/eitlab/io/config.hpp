#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eitlab/atom_model.hpp"
#include "eitlab/doppler.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/lineshape.hpp"
#include "eitlab/propagation.hpp"
#include "eitlab/quadrature.hpp"

namespace eit::io {

/// Resolved run configuration. Values are kept in the units of the file
/// (Hz, W, m, K, u), so an echoed config reproduces a run bit-exactly; the
/// builder methods convert to rad/s. Grammar: docs/config.md.
struct RunConfig {
    struct Constants {
        // Fundamental constants are fixed (CODATA 2018); the file may restate them.
        double hbar = constants::hbar;
        double epsilon0 = constants::epsilon0;
        double speed_of_light = constants::speed_of_light;
        double boltzmann = constants::boltzmann;
        double atom_mass_u = constants::rb87_mass_u;
        double dipole_moment = constants::rb87_d1_effective_dipole;  ///< C m
        double wavelength = constants::rb87_d1_wavelength;  ///< m
        double gamma_hz = constants::rb87_d1_gamma_hz;
        double gamma_b_fraction = 0.5;  ///< Γ_b/Γ
    } constants;

    struct System {
        double gamma_bc_hz = 1.5e3;
        double gamma_pe_hz = 0.0;
        double delta_pump_hz = 0.0;
        std::optional<double> omega_b_hz;  ///< default: weak-probe limit (0)
        std::optional<double> omega_c_hz;  ///< overrides pump_power for single scans
        double pump_power = 1.0e-3;     ///< W
        bool allow_strong_signal = false;
    } system;

    struct Doppler {
        ProfileShape shape = ProfileShape::Gaussian;  ///< used by numeric averages
        std::optional<double> temperature;  ///< K, default: cell temperature
    } doppler;

    struct Cell {
        double temperature = 353.15;
        double length = 0.05;
        double beam_diameter = 0.010;
        std::string buffer_gas = "Ne";
        double buffer_pressure_torr = 1.0;
        std::optional<double> number_density;  ///< overrides the vapor correlation
        double pump_cross_section = 0.0;       ///< m²
        int n_slices = 256;
        std::string label;
        std::string configuration = "zeeman";
        VaporPressureCorrelation vapor;
    } cell;

    struct Sweep {
        std::vector<double> powers;        ///< W
        std::vector<double> temperatures;  ///< K
        std::size_t points = 401;
        double half_span_fwhm = 5.0;
        std::optional<double> half_span_hz;
    } sweep;

    struct Numerics {
        QuadratureConfig quad;
        LMOptions lm;
        std::size_t exchange_points = 201;
        double exchange_half_span_fwhm = 5.0;
    } numerics;

    std::uint64_t seed = 0;

    RunConfig();

    double w_d() const;
    double gamma() const { return hz_to_rad(constants.gamma_hz); }
    ScanGrid scan_grid() const;
    ScanGrid exchange_grid() const;
    DopplerProfile profile() const;
    /// Λ-system with the configured rates and Ω_c from omega_c or pump_power.
    LambdaSystem lambda_system() const;
    CellModel cell_model() const;
    PowerSweep power_sweep() const;
    PowerSweep optics() const;  ///< beam geometry only (no powers)
    MediumConfig medium() const;

    /// Checks cross-field consistency. Throws ConfigError.
    void validate() const;
    /// Canonical YAML rendering (Hz units), as echoed into manifests.
    std::string to_yaml() const;
};

/// Parses a config document. Accepts either a plain config or a run manifest
/// (its `config:` section is used). Unknown keys, missing unit suffixes and
/// malformed values raise ConfigError naming the source, line and key.
RunConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Run options recorded in a manifest (model, noise) if the document is one.
struct ManifestOptions {
    std::optional<std::string> model;
    std::optional<double> noise_pct;
    std::optional<std::string> input;
};
ManifestOptions manifest_options(const std::filesystem::path& path);

}  // namespace eit::io
