#include "eitlab/propagation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "eitlab/errors.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/parallel.hpp"

namespace eit {

double VaporPressureCorrelation::pressure_pa(double temperature) const {
    if (!(temperature > t_min && temperature < t_max)) {
        std::ostringstream os;
        os << "vapor correlation '" << name << "' is valid for " << t_min << " K < T < " << t_max
           << " K, got " << temperature << " K";
        throw RangeError(os.str());
    }
    const Branch& br = temperature < melting_point ? solid : liquid;
    const double log_torr =
        br.a + br.b / temperature + br.c * temperature + br.d * std::log10(temperature);
    return std::pow(10.0, log_torr) * constants::torr;
}

double rb_number_density(double temperature, const VaporPressureCorrelation& vapor) {
    return vapor.pressure_pa(temperature) / (constants::boltzmann * temperature);
}

double rabi_from_power(double power, double beam_diameter, double dipole_moment) {
    if (!(power > 0) || !(beam_diameter > 0) || !(dipole_moment > 0))
        throw ConfigError("rabi_from_power: power, beam diameter and dipole moment must be > 0");
    const double radius = 0.5 * beam_diameter;
    const double intensity = power / (std::numbers::pi * radius * radius);
    const double field = std::sqrt(2.0 * intensity / (constants::epsilon0 * constants::speed_of_light));
    return dipole_moment * field / constants::hbar;
}

double power_from_rabi(double omega, double beam_diameter, double dipole_moment) {
    if (!(omega > 0) || !(beam_diameter > 0) || !(dipole_moment > 0))
        throw ConfigError("power_from_rabi: arguments must be > 0");
    const double field = omega * constants::hbar / dipole_moment;
    const double intensity = 0.5 * constants::epsilon0 * constants::speed_of_light * field * field;
    const double radius = 0.5 * beam_diameter;
    return intensity * std::numbers::pi * radius * radius;
}

double CellModel::number_density() const {
    return density_from_vapor ? rb_number_density(temperature, vapor) : medium.number_density;
}

MediumConfig CellModel::resolved_medium() const {
    MediumConfig m = medium;
    m.number_density = number_density();
    return m;
}

double CellModel::pump_absorption() const {
    return pump_cross_section == 0.0 ? 0.0 : pump_cross_section * number_density();
}

void CellModel::validate() const {
    if (n_slices < 16) throw ConfigError("CellModel: n_slices must be >= 16");
    if (!(medium.cell_length > 0)) throw ConfigError("CellModel: cell_length must be > 0");
    if (!(pump_cross_section >= 0)) throw ConfigError("CellModel: pump cross-section must be >= 0");
    if (!(temperature > 0)) throw ConfigError("CellModel: temperature must be > 0");
    resolved_medium().validate();
}

PumpProfile pump_profile(const CellModel& cell, double omega_c_in) {
    cell.validate();
    if (!(omega_c_in > 0)) throw ConfigError("pump_profile: entrance Rabi frequency must be > 0");
    const double alpha_p = cell.pump_absorption();
    const int n = cell.n_slices;
    const double dz = cell.medium.cell_length / n;
    PumpProfile p;
    p.z.resize(n + 1);
    p.omega.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        p.z[i] = dz * i;
        p.omega[i] = omega_c_in * std::exp(-0.5 * alpha_p * p.z[i]);
    }
    return p;
}

ResonanceScan thick_cell_scan(const CellModel& cell, const LambdaSystem& sys, double w_d,
                              std::span<const double> grid) {
    const PumpProfile pump = pump_profile(cell, sys.omega_c);
    const MediumConfig medium = cell.resolved_medium();
    const double length = medium.cell_length;
    const double dz = length / cell.n_slices;

    // The lineshape parameters depend on z only through Ω_c(z).
    std::vector<LineshapeParams> slices;
    slices.reserve(pump.omega.size());
    LambdaSystem local = sys;
    for (double om : pump.omega) {
        local.omega_c = om;
        slices.push_back(lineshape_params(local, medium, w_d));
    }

    ResonanceScan scan;
    scan.delta2.assign(grid.begin(), grid.end());
    scan.absorption.resize(grid.size());
    scan.transmission.resize(grid.size());
    scan.kind = ScanKind::Absorption;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double od = 0.0;
        for (std::size_t i = 0; i < slices.size(); ++i) {
            const double weight = (i == 0 || i + 1 == slices.size()) ? 0.5 : 1.0;
            od += weight * slices[i].at(grid[k]);
        }
        od *= dz;
        scan.absorption[k] = od / length;
        scan.transmission[k] = std::exp(-od);
    }
    scan.meta.temperature_k = cell.temperature;
    return scan;
}

double thick_cell_fwhm(const CellModel& cell, const LambdaSystem& sys, double w_d,
                       const ScanGrid& grid) {
    const double estimate = fwhm_dephasing(sys.gamma_bc, sys.omega_c, w_d, sys.gamma());
    const auto g = grid.make(estimate);
    return fwhm_numeric(thick_cell_scan(cell, sys, w_d, g));
}

void PowerSweep::validate() const {
    if (powers.empty()) throw ConfigError("PowerSweep: no powers");
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (!(powers[i] > 0)) throw ConfigError("PowerSweep: powers must be > 0");
        if (i > 0 && !(powers[i] > powers[i - 1]))
            throw ConfigError("PowerSweep: powers must be strictly ascending");
    }
    if (!(beam_diameter > 0)) throw ConfigError("PowerSweep: beam diameter must be > 0");
    if (!(dipole_moment > 0)) throw ConfigError("PowerSweep: dipole moment must be > 0");
}

LinewidthSeries thick_cell_series(const CellModel& cell, const LambdaSystem& sys, double w_d,
                                  const PowerSweep& sweep, const ScanGrid& grid) {
    sweep.validate();
    LinewidthSeries series;
    series.samples.resize(sweep.powers.size());
    series.temperature = cell.temperature;
    parallel_for(sweep.powers.size(), [&](std::size_t i) {
        LambdaSystem local = sys;
        local.omega_c = sweep.rabi(sweep.powers[i]);
        auto& s = series.samples[i];
        s.power_w = sweep.powers[i];
        s.omega_c = local.omega_c;
        s.fwhm = thick_cell_fwhm(cell, local, w_d, grid);
    });
    return series;
}

std::vector<TemperatureSlope> slope_vs_temperature(const CellModel& cell, const LambdaSystem& sys,
                                                   double w_d, std::span<const double> temperatures,
                                                   const PowerSweep& sweep, const ScanGrid& grid) {
    if (sweep.powers.size() < 3) throw ConfigError("slope_vs_temperature: need >= 3 powers");
    std::vector<TemperatureSlope> out;
    out.reserve(temperatures.size());
    for (double t : temperatures) {
        CellModel at = cell;
        at.temperature = t;
        const LinewidthSeries series = thick_cell_series(at, sys, w_d, sweep, grid);
        const auto powers = series.powers();
        const auto widths = series.fwhms();
        const LineFit line = fit_line(powers, widths);
        out.push_back({t, line.slope, line.intercept, at.number_density(), at.pump_absorption()});
    }
    return out;
}

}  // namespace eit
