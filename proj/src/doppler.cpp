#include "eitlab/doppler.hpp"

#include <cmath>
#include <numbers>

namespace eit {

DopplerProfile DopplerProfile::thermal(double temperature, double wavelength, double atom_mass,
                                       ProfileShape shape) {
    DopplerProfile p;
    p.w_d = doppler_width(temperature, wavelength, atom_mass);
    p.shape = shape;
    p.temperature = temperature;
    p.atom_mass = atom_mass;
    p.wavelength = wavelength;
    return p;
}

double DopplerProfile::peak_density() const {
    return std::sqrt(constants::ln2) / (w_d * std::sqrt(std::numbers::pi));
}

void DopplerProfile::validate() const {
    if (!(w_d > 0) || !std::isfinite(w_d)) throw ConfigError("DopplerProfile: w_d must be > 0");
}

double MediumConfig::prefactor() const {
    return number_density * dipole_moment * dipole_moment / (constants::hbar * constants::epsilon0);
}

void MediumConfig::validate() const {
    if (!(number_density > 0)) throw ConfigError("MediumConfig: number_density must be > 0");
    if (!(dipole_moment > 0)) throw ConfigError("MediumConfig: dipole_moment must be > 0");
    if (!(cell_length > 0)) throw ConfigError("MediumConfig: cell_length must be > 0");
    if (!(beam_diameter > 0)) throw ConfigError("MediumConfig: beam_diameter must be > 0");
    if (!(signal_wavelength > 0)) throw ConfigError("MediumConfig: signal_wavelength must be > 0");
}

double doppler_width(double temperature, double wavelength, double atom_mass) {
    if (!(temperature > 0) || !(wavelength > 0) || !(atom_mass > 0))
        throw ConfigError("doppler_width: temperature, wavelength and mass must be > 0");
    const double thermal_speed =
        std::sqrt(2.0 * constants::ln2 * constants::boltzmann * temperature / atom_mass);
    return 0.5 * (4.0 * std::numbers::pi / wavelength) * thermal_speed;
}

double profile_density(const DopplerProfile& profile, double delta) {
    const double x = delta / profile.w_d;
    const double peak = profile.peak_density();
    if (profile.shape == ProfileShape::Gaussian) return peak * std::exp(-constants::ln2 * x * x);
    return peak / (1.0 + x * x);
}

cplx average_susceptibility_closed(const LambdaSystem& sys, const MediumConfig& medium, double w_d,
                                   bool drop_two_photon_term) {
    sys.validate();
    const double g = sys.gamma_bc;
    const double d2 = sys.delta2;
    const cplx optical = drop_two_photon_term ? cplx(sys.gamma() + 2.0 * w_d)
                                              : cplx(sys.gamma() + 2.0 * w_d, -2.0 * d2);
    const cplx denom = cplx(g, -d2) * optical + 2.0 * sys.omega_c * sys.omega_c;
    if (std::abs(denom) < 1e-30)
        throw PoleError("average_susceptibility_closed: vanishing denominator");
    const double k = 2.0 * medium.prefactor() * std::sqrt(std::numbers::pi * constants::ln2);
    return k * cplx(d2, g) / denom;
}

std::vector<double> response_breakpoints(const LambdaSystem& sys, double pump_offset) {
    // Pole of 1/(Δ − A), A = δ₂ − Ω_c²/(iγ + δ₂) + iΓ/2; γ includes exchange damping.
    const double g = sys.gamma_bc + sys.gamma_pe;
    const double d2 = sys.delta2;
    const double norm = d2 * d2 + g * g;
    std::vector<double> out{pump_offset};
    if (norm > 0) out.push_back(d2 - sys.omega_c * sys.omega_c * d2 / norm);
    return out;
}

cplx average_susceptibility_numeric(const LambdaSystem& sys, const MediumConfig& medium,
                                    const DopplerProfile& profile, const QuadratureConfig& quad,
                                    double pump_offset) {
    sys.validate();
    require_weak_signal(sys);
    // ρ_ab/Ω_b per class; Ω_b cancels against the 1/Ω_b prefactor.
    LambdaSystem cls = sys;
    auto response = [&](double delta) {
        cls.delta_pump = delta;
        return coherence_per_signal(cls);
    };
    return medium.prefactor() *
           doppler_integral(profile, response, response_breakpoints(sys, pump_offset), quad, pump_offset);
}

}  // namespace eit
