#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "eitlab/atom_model.hpp"
#include "eitlab/doppler.hpp"
#include "eitlab/quadrature.hpp"

namespace eit {

/// Lorentzian EIT absorption dip
///     α(δ₂) = α_max − (α_max − α_min) / (1 + (2(δ₂ − center)/FWHM)²).
struct LineshapeParams {
    double alpha_max = 0.0;  ///< 1/m
    double alpha_min = 0.0;  ///< 1/m
    double fwhm = 0.0;       ///< rad/s
    double center = 0.0;     ///< rad/s

    double at(double delta2) const;
};

/// α_max, α_min and FWHM of the Doppler-averaged (Lorentzian-profile) dip.
/// Throws PoleError when γ_bc = Ω_c = 0 (zero-width feature).
LineshapeParams lineshape_params(const LambdaSystem& sys, const MediumConfig& medium, double w_d);

/// Intensity absorption coefficient (ω/c) Im χ_b with the 2iδ₂ term dropped,
/// evaluated through the Lorentzian form. sys.delta2 is ignored.
double absorption_coefficient(double delta2, const LambdaSystem& sys, const MediumConfig& medium,
                              double w_d);

/// 2γ_bc + 4Ω_c²/(2W_d + Γ).
double fwhm_dephasing(double gamma_bc, double omega_c, double w_d, double gamma);

/// High-power asymptote of the population-exchange theory: 4γ_pe W_d/Γ + 2Ω_c²/W_d.
double fwhm_popexchange_asymptote(double gamma_pe, double omega_c, double w_d, double gamma);

/// Ratio of the exchange-asymptote intercept to the dephasing intercept at
/// γ_pe = γ_bc, i.e. 2W_d/Γ.
double intercept_ratio(double w_d, double gamma);

enum class ScanKind { Absorption, Transmission };

struct ScanMetadata {
    std::optional<double> pump_power_w;
    std::optional<double> temperature_k;
};

/// Samples versus two-photon detuning. `kind` selects the primary column;
/// the other column may be empty.
struct ResonanceScan {
    std::vector<double> delta2;        ///< rad/s, strictly increasing
    std::vector<double> absorption;    ///< 1/m
    std::vector<double> transmission;  ///< in [0, 1]
    ScanKind kind = ScanKind::Absorption;
    ScanMetadata meta;

    const std::vector<double>& values() const {
        return kind == ScanKind::Absorption ? absorption : transmission;
    }
    std::size_t size() const { return delta2.size(); }
    /// Throws DataError on ordering/size/range violations or fewer than
    /// `min_samples` samples.
    void validate(std::size_t min_samples = 3) const;
};

/// Minimum sample count for any fit operation.
inline constexpr std::size_t kMinFitSamples = 16;

/// n equally spaced points on [−half_span, half_span].
std::vector<double> symmetric_grid(double half_span, std::size_t points);

/// Absorption scan of the closed-form dephasing lineshape on `grid`.
ResonanceScan dephasing_scan(const LambdaSystem& sys, const MediumConfig& medium, double w_d,
                             std::span<const double> grid);

/// FWHM of the central feature (absorption minimum or transmission maximum).
///
/// The far baseline is extrapolated on each side from the three outermost tail
/// samples assuming a b + a/(c + u²) approach (exact for Lorentzian tails;
/// falls back to the edge sample when the extrapolation is ill-posed). The
/// half-level crossings are then located by linear interpolation between the
/// bracketing samples. Throws NoDip (extremum on the boundary, or no contrast)
/// and Ambiguous (more than two crossings of the half level).
double fwhm_numeric(const ResonanceScan& scan);

/// (ω/c) Im χ_b for the population-exchange model at one δ₂: the per-class
/// first-order coherence comes from the Liouvillian linear response and is
/// Doppler-averaged numerically. sys.delta2 and sys.delta_pump are ignored.
double popexchange_absorption(double delta2, const LambdaSystem& sys, const MediumConfig& medium,
                              const DopplerProfile& profile, const QuadratureConfig& quad = {});

/// Absorption scan of the population-exchange model. Requires γ_pe > 0; for
/// the pure exchange model γ_bc is 0 (ρ_bc is then damped by γ_pe alone).
/// Grid points are evaluated in parallel.
ResonanceScan popexchange_scan_numeric(const LambdaSystem& sys, const MediumConfig& medium,
                                       const DopplerProfile& profile, std::span<const double> grid,
                                       const QuadratureConfig& quad = {});

/// Scan grid specification used by forward models: `points` samples over
/// ±half_span_fwhm × (a FWHM estimate), unless an absolute half span is given.
struct ScanGrid {
    std::size_t points = 401;
    double half_span_fwhm = 5.0;
    std::optional<double> half_span;  ///< rad/s

    std::vector<double> make(double fwhm_estimate) const;
};

/// FWHM of the exchange model, via popexchange_scan_numeric + fwhm_numeric on a
/// grid sized from the high-power asymptote.
double fwhm_popexchange_numeric(const LambdaSystem& sys, const MediumConfig& medium,
                                const DopplerProfile& profile, const ScanGrid& grid,
                                const QuadratureConfig& quad = {});

}  // namespace eit
