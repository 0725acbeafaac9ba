#include "eitlab/lineshape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eitlab/errors.hpp"
#include "eitlab/parallel.hpp"

namespace eit {

namespace {

double lorentz_scale(const MediumConfig& medium) {
    return medium.wavenumber() * 2.0 * medium.prefactor() *
           std::sqrt(std::numbers::pi * constants::ln2);
}

// Far-baseline estimate for one side of a peak-oriented trace y (feature is a
// maximum). idx holds three sample indices ordered from the far edge inward.
double tail_baseline(std::span<const double> x, std::span<const double> y, double x_peak,
                     const std::array<std::size_t, 3>& idx, double y_peak) {
    const double edge = y[idx[0]];
    double t[3], v[3];
    for (int k = 0; k < 3; ++k) {
        const double u = x[idx[k]] - x_peak;
        t[k] = u * u;
        v[k] = y[idx[k]];
    }
    const double d12 = v[0] - v[1];
    const double d23 = v[1] - v[2];
    if (!(t[0] > t[1] && t[1] > t[2]) || d23 == 0.0) return edge;
    const double r = d12 / d23;
    const double den = r * (t[2] - t[1]) - (t[1] - t[0]);
    if (den == 0.0) return edge;
    const double c = ((t[1] - t[0]) * t[2] - r * (t[2] - t[1]) * t[0]) / den;
    if (!std::isfinite(c) || c + t[2] <= 0.0) return edge;
    const double a = d12 * (c + t[0]) * (c + t[1]) / (t[1] - t[0]);
    const double b = v[0] - a / (c + t[0]);
    // The tail must approach the baseline from the peak side, and the
    // correction must stay small compared to the feature itself.
    if (!std::isfinite(b) || a < 0.0 || b > edge) return edge;
    if (edge - b > 0.5 * std::abs(y_peak - edge)) return edge;
    return b;
}

}  // namespace

double LineshapeParams::at(double delta2) const {
    const double x = 2.0 * (delta2 - center) / fwhm;
    return alpha_max - (alpha_max - alpha_min) / (1.0 + x * x);
}

LineshapeParams lineshape_params(const LambdaSystem& sys, const MediumConfig& medium, double w_d) {
    sys.validate();
    medium.validate();
    if (!(w_d > 0)) throw ConfigError("lineshape_params: w_d must be > 0");
    const double k = lorentz_scale(medium);
    const double b = sys.gamma() + 2.0 * w_d;
    const double g = sys.gamma_bc;
    const double om2 = sys.omega_c * sys.omega_c;
    LineshapeParams p;
    p.alpha_max = k / b;
    p.alpha_min = g == 0.0 ? 0.0 : k * g / (g * b + 2.0 * om2);
    p.fwhm = fwhm_dephasing(g, sys.omega_c, w_d, sys.gamma());
    if (!(p.fwhm > 0)) throw PoleError("lineshape_params: zero-width feature (gamma_bc = omega_c = 0)");
    return p;
}

double absorption_coefficient(double delta2, const LambdaSystem& sys, const MediumConfig& medium,
                              double w_d) {
    if (sys.gamma_bc == 0.0 && sys.omega_c == 0.0) {
        if (std::abs(delta2) < 1e-30) throw PoleError("absorption_coefficient: pole at delta2 = 0");
        sys.validate();
        medium.validate();
        return lorentz_scale(medium) / (sys.gamma() + 2.0 * w_d);
    }
    return lineshape_params(sys, medium, w_d).at(delta2);
}

double fwhm_dephasing(double gamma_bc, double omega_c, double w_d, double gamma) {
    return 2.0 * gamma_bc + 4.0 * omega_c * omega_c / (2.0 * w_d + gamma);
}

double fwhm_popexchange_asymptote(double gamma_pe, double omega_c, double w_d, double gamma) {
    if (!(gamma > 0) || !(w_d > 0))
        throw ConfigError("fwhm_popexchange_asymptote: gamma and w_d must be > 0");
    return 4.0 * gamma_pe * w_d / gamma + 2.0 * omega_c * omega_c / w_d;
}

double intercept_ratio(double w_d, double gamma) {
    if (!(gamma > 0)) throw ConfigError("intercept_ratio: gamma must be > 0");
    return 2.0 * w_d / gamma;
}

void ResonanceScan::validate(std::size_t min_samples) const {
    const std::size_t n = delta2.size();
    if (n < min_samples) {
        std::ostringstream os;
        os << "scan has " << n << " samples, at least " << min_samples << " required";
        throw DataError(os.str());
    }
    if (!absorption.empty() && absorption.size() != n)
        throw DataError("scan: absorption column length differs from delta2");
    if (!transmission.empty() && transmission.size() != n)
        throw DataError("scan: transmission column length differs from delta2");
    if (values().size() != n) throw DataError("scan: primary column is missing");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(delta2[i])) throw DataError("scan: non-finite delta2");
        if (i > 0 && !(delta2[i] > delta2[i - 1])) throw DataError("scan: delta2 must be strictly increasing");
    }
    for (double v : absorption)
        if (!std::isfinite(v)) throw DataError("scan: non-finite absorption");
    for (double v : transmission)
        if (!std::isfinite(v)) throw DataError("scan: non-finite transmission");
}

std::vector<double> symmetric_grid(double half_span, std::size_t points) {
    if (points < 2 || !(half_span > 0)) throw ConfigError("symmetric_grid: need >= 2 points and span > 0");
    std::vector<double> g(points);
    const double step = 2.0 * half_span / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = -half_span + step * static_cast<double>(i);
    // Exact symmetry, so mirrored scans give identical widths.
    for (std::size_t i = 0; i < points / 2; ++i) g[points - 1 - i] = -g[i];
    if (points % 2 == 1) g[points / 2] = 0.0;
    return g;
}

std::vector<double> ScanGrid::make(double fwhm_estimate) const {
    const double span = half_span ? *half_span : half_span_fwhm * fwhm_estimate;
    return symmetric_grid(span, points);
}

ResonanceScan dephasing_scan(const LambdaSystem& sys, const MediumConfig& medium, double w_d,
                             std::span<const double> grid) {
    ResonanceScan scan;
    scan.delta2.assign(grid.begin(), grid.end());
    scan.absorption.reserve(grid.size());
    for (double d : grid) scan.absorption.push_back(absorption_coefficient(d, sys, medium, w_d));
    scan.kind = ScanKind::Absorption;
    return scan;
}

double fwhm_numeric(const ResonanceScan& scan) {
    scan.validate(3);
    const auto& x = scan.delta2;
    const std::size_t n = x.size();
    const double sign = scan.kind == ScanKind::Absorption ? -1.0 : 1.0;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = sign * scan.values()[i];

    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    if (peak == 0 || peak == n - 1) throw NoDip("fwhm_numeric: extremum lies on the scan boundary");

    auto side_indices = [&](bool left) -> std::array<std::size_t, 3> {
        const std::size_t m = left ? peak : n - 1 - peak;
        const std::size_t k = std::max<std::size_t>(1, m / 8);
        if (left) return {0, std::min(k, peak), std::min(2 * k, peak)};
        return {n - 1, std::max(n - 1 - k, peak), std::max(n - 1 - 2 * k, peak)};
    };
    const double b_left = tail_baseline(x, y, x[peak], side_indices(true), y[peak]);
    const double b_right = tail_baseline(x, y, x[peak], side_indices(false), y[peak]);
    const double baseline = 0.5 * (b_left + b_right);
    const double depth = y[peak] - baseline;
    if (!(depth > 0.0) || depth <= 1e-12 * std::max(std::abs(y[peak]), std::abs(baseline)))
        throw NoDip("fwhm_numeric: no contrast between extremum and baseline");
    const double level = baseline + 0.5 * depth;

    std::size_t crossings = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if ((y[i] >= level) != (y[i + 1] >= level)) ++crossings;
    if (crossings > 2) throw Ambiguous("fwhm_numeric: more than two half-level crossings");

    auto interpolate = [&](std::size_t lo, std::size_t hi) {
        return x[lo] + (level - y[lo]) / (y[hi] - y[lo]) * (x[hi] - x[lo]);
    };
    std::size_t i = peak;
    while (i > 0 && y[i - 1] >= level) --i;
    if (i == 0) throw NoDip("fwhm_numeric: left half-level crossing not found");
    const double left = interpolate(i - 1, i);
    std::size_t j = peak;
    while (j + 1 < n && y[j + 1] >= level) ++j;
    if (j + 1 == n) throw NoDip("fwhm_numeric: right half-level crossing not found");
    const double right = interpolate(j + 1, j);
    return right - left;
}

double popexchange_absorption(double delta2, const LambdaSystem& sys, const MediumConfig& medium,
                              const DopplerProfile& profile, const QuadratureConfig& quad) {
    sys.validate();
    medium.validate();
    LambdaSystem cls = sys;
    cls.delta2 = delta2;
    // Only Im χ is needed. The dispersive part is odd in Δ and cancels in the
    // average, so carrying it would let solver round-off set the error floor.
    auto response = [&](double delta) {
        cls.delta_pump = delta;
        return cplx(0.0, bloch_linear_response(cls).imag());
    };
    const cplx chi = medium.prefactor() *
                     doppler_integral(profile, response, response_breakpoints(cls, 0.0), quad, 0.0);
    return medium.wavenumber() * chi.imag();
}

ResonanceScan popexchange_scan_numeric(const LambdaSystem& sys, const MediumConfig& medium,
                                       const DopplerProfile& profile, std::span<const double> grid,
                                       const QuadratureConfig& quad) {
    if (!(sys.gamma_pe > 0)) throw ConfigError("popexchange_scan_numeric: gamma_pe must be > 0");
    ResonanceScan scan;
    scan.delta2.assign(grid.begin(), grid.end());
    scan.absorption.assign(grid.size(), 0.0);
    scan.kind = ScanKind::Absorption;
    parallel_for(grid.size(), [&](std::size_t i) {
        scan.absorption[i] = popexchange_absorption(grid[i], sys, medium, profile, quad);
    });
    return scan;
}

double fwhm_popexchange_numeric(const LambdaSystem& sys, const MediumConfig& medium,
                                const DopplerProfile& profile, const ScanGrid& grid,
                                const QuadratureConfig& quad) {
    // Low power sits near 2γ_pe·(Doppler enhancement), so size the grid from
    // the larger of the asymptote and the bare coherence width.
    const double estimate = std::max(
        fwhm_popexchange_asymptote(sys.gamma_pe, sys.omega_c, profile.w_d, sys.gamma()),
        2.0 * (sys.gamma_pe + sys.gamma_bc));
    const double first = fwhm_numeric(popexchange_scan_numeric(sys, medium, profile, grid.make(estimate), quad));
    // At low power the width falls well below the estimate; rescan around it.
    if (grid.half_span || first > 0.5 * estimate) return first;
    return fwhm_numeric(popexchange_scan_numeric(sys, medium, profile, grid.make(first), quad));
}

}  // namespace eit
