#pragma once

#include <span>
#include <string>
#include <vector>

#include "eitlab/atom_model.hpp"
#include "eitlab/doppler.hpp"
#include "eitlab/lineshape.hpp"
#include "eitlab/series.hpp"

namespace eit {

/// Saturated vapor pressure of rubidium, log10(P/torr) = A + B/T + C T + D log10 T,
/// with separate solid and liquid branches (Alcock-type correlation as
/// tabulated in Steck's alkali data notes).
struct VaporPressureCorrelation {
    struct Branch {
        double a, b, c, d;
    };
    std::string name = "rb-alcock-steck";
    Branch solid{-94.04826, -1961.258, -0.03771687, 42.57526};
    Branch liquid{15.88253, -4529.635, 0.00058663, -2.99138};
    double melting_point = 312.46;  ///< K
    double t_min = 273.0;           ///< K, exclusive
    double t_max = 450.0;           ///< K, exclusive

    /// Throws RangeError outside (t_min, t_max).
    double pressure_pa(double temperature) const;
};

/// N = P_sat(T)/(k_B T), atoms/m³. Throws RangeError outside the window.
double rb_number_density(double temperature, const VaporPressureCorrelation& vapor = {});

/// Ω = 𝒟 E/ħ with E = √(2I/(ε₀ c)) and I = P/(π (d/2)²).
double rabi_from_power(double power, double beam_diameter,
                       double dipole_moment = constants::rb87_d1_effective_dipole);

/// Inverse of rabi_from_power.
double power_from_rabi(double omega, double beam_diameter,
                       double dipole_moment = constants::rb87_d1_effective_dipole);

struct CellModel {
    MediumConfig medium;
    double temperature = 353.15;  ///< K
    int n_slices = 256;
    VaporPressureCorrelation vapor;
    /// When set, N comes from the vapor correlation at `temperature`;
    /// otherwise medium.number_density is used as given.
    bool density_from_vapor = true;
    /// Effective off-resonant pump cross-section σ_p, α_p = σ_p N(T). 0 disables.
    double pump_cross_section = 0.0;  ///< m²

    double number_density() const;
    MediumConfig resolved_medium() const;
    /// α_p, 1/m.
    double pump_absorption() const;
    /// Throws ConfigError on n_slices < 16, non-positive length, etc.
    void validate() const;
};

/// Ω_c(z) on the n_slices + 1 trapezoid nodes z_i = i L/n_slices.
struct PumpProfile {
    std::vector<double> z;      ///< m
    std::vector<double> omega;  ///< rad/s
};

/// Beer's-law pump: I(z) = I(0) e^{−α_p z}, Ω_c(z) = Ω_c(0) e^{−α_p z/2}.
PumpProfile pump_profile(const CellModel& cell, double omega_c_in);

/// Signal lineshape after the cell. The optical depth at each δ₂ is the
/// trapezoidal sum of absorption_coefficient over the pump profile;
/// transmission = exp(−OD). The primary column is the path-averaged
/// absorption OD/L, so its FWHM does not depend on the optical depth itself.
/// sys.omega_c is the entrance Rabi frequency.
ResonanceScan thick_cell_scan(const CellModel& cell, const LambdaSystem& sys, double w_d,
                              std::span<const double> grid);

/// FWHM of thick_cell_scan on a grid sized from the dephasing FWHM at the
/// entrance Rabi frequency.
double thick_cell_fwhm(const CellModel& cell, const LambdaSystem& sys, double w_d,
                       const ScanGrid& grid = {});

struct PowerSweep {
    std::vector<double> powers;  ///< W, ascending
    double beam_diameter = 0.010;  ///< m
    double dipole_moment = constants::rb87_d1_effective_dipole;  ///< C m

    double rabi(double power) const { return rabi_from_power(power, beam_diameter, dipole_moment); }
    void validate() const;
};

/// FWHM versus input pump power through the thick cell.
LinewidthSeries thick_cell_series(const CellModel& cell, const LambdaSystem& sys, double w_d,
                                  const PowerSweep& sweep, const ScanGrid& grid = {});

struct TemperatureSlope {
    double temperature = 0.0;  ///< K
    double slope = 0.0;        ///< rad/s per W
    double intercept = 0.0;    ///< rad/s
    double number_density = 0.0;
    double pump_absorption = 0.0;  ///< 1/m
};

/// For each temperature: thick-cell FWHMs over the power grid, then a straight
/// line fit. Only the vapor density changes with T; w_d is held fixed so the
/// unattenuated case is exactly T-independent.
std::vector<TemperatureSlope> slope_vs_temperature(const CellModel& cell, const LambdaSystem& sys,
                                                   double w_d, std::span<const double> temperatures,
                                                   const PowerSweep& sweep,
                                                   const ScanGrid& grid = {});

}  // namespace eit
