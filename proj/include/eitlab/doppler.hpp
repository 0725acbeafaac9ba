#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eitlab/atom_model.hpp"
#include "eitlab/constants.hpp"
#include "eitlab/errors.hpp"
#include "eitlab/quadrature.hpp"

namespace eit {

enum class ProfileShape { Gaussian, LorentzianApprox };

/// Distribution of velocity-induced pump detunings Δ.
///
/// Both shapes share the peak value √(ln 2)/(W_d √π) and are at half maximum
/// at Δ = ±W_d. The Lorentzian approximation is used exactly as printed and
/// is therefore *not* normalized: its integral is √(π ln 2) ≈ 1.4757.
struct DopplerProfile {
    double w_d = 0.0;  ///< half-width W_d, rad/s (2W_d is the FWHM)
    ProfileShape shape = ProfileShape::LorentzianApprox;
    std::optional<double> temperature;  ///< K, metadata
    std::optional<double> atom_mass;    ///< kg, metadata
    std::optional<double> wavelength;   ///< m, metadata

    static DopplerProfile thermal(double temperature, double wavelength, double atom_mass,
                                  ProfileShape shape);

    double peak_density() const;
    void validate() const;
};

/// Macroscopic medium. The susceptibility prefactor ℘ = N 𝒟²/(ħ ε₀) (rad/s)
/// is always recomputed from the stored fields.
struct MediumConfig {
    double number_density = 0.0;     ///< atoms/m³
    double dipole_moment = 0.0;      ///< C m
    double cell_length = 0.05;       ///< m
    double beam_diameter = 0.010;    ///< m
    std::string buffer_gas = "Ne";   ///< metadata
    double buffer_pressure_torr = 1.0;
    double signal_wavelength = constants::rb87_d1_wavelength;  ///< m

    double prefactor() const;
    /// ω/c = 2π/λ for the signal field, 1/m.
    double wavenumber() const { return constants::two_pi / signal_wavelength; }
    void validate() const;
};

/// Half-width W_d (rad/s) of the Doppler line: 2W_d = (4π/λ)√(2 ln2 k_B T/m).
double doppler_width(double temperature, double wavelength, double atom_mass);

/// p(Δ) for the given profile, in s/rad.
double profile_density(const DopplerProfile& profile, double delta);

/// Closed-form Doppler average over the Lorentzian profile:
///   χ_b = 2℘√(π ln2) (iγ_bc + δ₂) / [(γ_bc − iδ₂)(Γ + 2W_d − 2iδ₂) + 2Ω_c²].
/// With `drop_two_photon_term` the −2iδ₂ in the second factor is omitted.
/// Throws PoleError when the denominator magnitude is below 1e-30.
cplx average_susceptibility_closed(const LambdaSystem& sys, const MediumConfig& medium, double w_d,
                                   bool drop_two_photon_term = false);

/// Breakpoints (in Δ) where a per-class Λ response has structure: the pump
/// resonance Δ = 0 and the real part of the light-shifted probe pole.
std::vector<double> response_breakpoints(const LambdaSystem& sys, double pump_offset);

/// ∫ p(Δ) g(Δ) dΔ for a per-velocity-class response g, with the pump tuned
/// `pump_offset` away from the Doppler center (Δ runs over pump_offset + v).
/// Gaussian: Δ − offset ∈ [−k W_d, k W_d]. Lorentzian: the whole real line,
/// mapped by Δ − offset = W_d tan θ, under which p_L dΔ = √(ln2/π) dθ.
template <class ClassResponse>
cplx doppler_integral(const DopplerProfile& profile, ClassResponse&& response,
                      const std::vector<double>& breakpoints, const QuadratureConfig& quad,
                      double pump_offset = 0.0) {
    profile.validate();
    const double w = profile.w_d;
    if (profile.shape == ProfileShape::Gaussian) {
        const double span = quad.truncation_half_widths * w;
        std::vector<double> cuts;
        for (double bp : breakpoints) cuts.push_back(bp - pump_offset);
        auto integrand = [&](double v) { return profile_density(profile, v) * response(pump_offset + v); };
        return integrate_adaptive(integrand, -span, span, cuts, quad, 16).value;
    }
    const double half_pi = 0.5 * std::numbers::pi;
    const double weight = std::sqrt(constants::ln2 / std::numbers::pi);
    std::vector<double> cuts;
    for (double bp : breakpoints) cuts.push_back(std::atan((bp - pump_offset) / w));
    auto integrand = [&](double theta) { return weight * response(pump_offset + w * std::tan(theta)); };
    return integrate_adaptive(integrand, -half_pi, half_pi, cuts, quad, 16).value;
}

/// χ_b = (℘/Ω_b) ∫ p(Δ) ρ_ab(Δ, δ₂) dΔ with ρ_ab from the first-order
/// coherence, δ₂ held fixed across velocity classes. sys.delta_pump is ignored
/// (the pump sits at the Doppler center plus `pump_offset`).
cplx average_susceptibility_numeric(const LambdaSystem& sys, const MediumConfig& medium,
                                    const DopplerProfile& profile, const QuadratureConfig& quad = {},
                                    double pump_offset = 0.0);

}  // namespace eit
