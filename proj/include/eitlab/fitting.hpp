#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "eitlab/atom_model.hpp"
#include "eitlab/doppler.hpp"
#include "eitlab/lineshape.hpp"
#include "eitlab/propagation.hpp"
#include "eitlab/series.hpp"

namespace eit {

struct FitParameter {
    std::string name;
    double value = 0.0;
    double sigma = 0.0;  ///< 1σ
};

struct FitResult {
    std::string model;
    std::vector<FitParameter> parameters;
    /// Quantities computed from the fitted parameters (e.g. γ_bc = intercept/2).
    std::vector<FitParameter> derived;
    double rss = 0.0;
    int dof = 0;
    bool converged = false;
    int iterations = 0;

    /// Looks up `name` among parameters, then derived. Throws std::out_of_range.
    const FitParameter& get(std::string_view name) const;
    double value(std::string_view name) const { return get(name).value; }
    double sigma(std::string_view name) const { return get(name).sigma; }
};

struct LMOptions {
    int max_iterations = 200;
    double step_tol = 1e-10;       ///< on max_j |Δx_j| / scale_j
    double jacobian_step = 1e-6;   ///< relative central-difference step
    double initial_damping = 1e-3;
};

struct LMOutcome {
    Eigen::VectorXd x;
    Eigen::MatrixXd covariance;  ///< (JᵀJ)⁻¹ · rss/dof
    Eigen::VectorXd residuals;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped Gauss–Newton (Levenberg–Marquardt with Marquardt's diagonal
/// scaling; damping ×10 on rejection, ÷10 on acceptance). `scale` gives a
/// typical magnitude per parameter, used for the Jacobian step and the step
/// test. Throws RankDeficient when the normal matrix at the solution is
/// singular.
LMOutcome levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd x0,
                              const Eigen::VectorXd& scale, const LMOptions& options = {});

struct LorentzianParams {
    double center = 0.0;    ///< rad/s
    double fwhm = 0.0;      ///< rad/s
    double depth = 0.0;     ///< feature height above/below the baseline, > 0
    double baseline = 0.0;  ///< far-wing level
};

/// baseline ∓ depth/(1 + (2(δ₂ − center)/fwhm)²): minus for an absorption dip,
/// plus for a transmission peak.
double lorentzian_model(double delta2, const LorentzianParams& p, ScanKind kind);

/// Least-squares Lorentzian. Parameters: center, fwhm, depth, baseline.
/// Without `init`, starts from the extremum, the half-level crossings and the
/// mean of the two end samples. Throws DegenerateData (no contrast or fewer
/// than 16 samples) and NoConvergence.
FitResult fit_lorentzian(const ResonanceScan& scan, std::optional<LorentzianParams> init = {},
                         const LMOptions& options = {});

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sigma_slope = 0.0;
    double sigma_intercept = 0.0;
    double covariance = 0.0;  ///< cov(slope, intercept)
    double rss = 0.0;         ///< weighted
    int dof = 0;
};

/// Closed-form (weighted) straight-line fit. `sigma` may be empty (uniform
/// weights). Covariance is scaled by rss/dof; with two points there is no
/// residual information and the uncertainties are reported as 0. Throws
/// RankDeficient when all x are equal and DataError on size mismatch.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> sigma = {});

/// Straight line through FWHM(P). Parameters slope (rad/s per W) and
/// intercept (rad/s); derived gamma_bc = intercept/2. Requires ≥ 3 samples.
FitResult fit_linear(const LinewidthSeries& series);

/// Exchange-model FWHM as a function of pump power, γ_pe and an optional
/// multiplier on the power-to-Rabi map. Evaluations are cached, so repeated
/// fits over the same powers reuse scans.
class PopExchangeForward {
public:
    PopExchangeForward(LambdaSystem base, MediumConfig medium, DopplerProfile profile,
                       PowerSweep optics, ScanGrid grid = {}, QuadratureConfig quad = {});

    double fwhm(double power, double gamma_pe, double rabi_scale = 1.0) const;
    std::vector<double> curve(std::span<const double> powers, double gamma_pe,
                              double rabi_scale = 1.0) const;
    std::size_t cache_size() const;

    const DopplerProfile& profile() const { return profile_; }
    const LambdaSystem& base() const { return base_; }

private:
    LambdaSystem base_;
    MediumConfig medium_;
    DopplerProfile profile_;
    PowerSweep optics_;
    ScanGrid grid_;
    QuadratureConfig quad_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<double, double, double>, double> cache_;
};

struct PopExchangeFitOptions {
    bool fit_rabi_scale = false;
    std::optional<double> initial_gamma_pe;  ///< rad/s; default from the linear intercept
    LMOptions lm;
};

/// Least squares over log γ_pe (and log of the Rabi scale when enabled).
/// Parameters gamma_pe [, rabi_scale]. Requires ≥ 5 samples.
FitResult fit_popexchange(const LinewidthSeries& series, const PopExchangeForward& forward,
                          const PopExchangeFitOptions& options = {});

/// γ_pe implied by reading a linear-fit intercept as the exchange
/// asymptote's 4γ_pe W_d/Γ: intercept·Γ/(4W_d).
double popexchange_rate_bound(double intercept, double w_d, double gamma);

enum class ModelChoice { Linear, Exchange, Tie };

std::string to_string(ModelChoice choice);

struct ModelComparison {
    ModelChoice selected = ModelChoice::Tie;
    double rss_linear = 0.0;
    double rss_exchange = 0.0;
    double intercept_linear = 0.0;    ///< rad/s
    double intercept_exchange = 0.0;  ///< rad/s, 4γ_pe W_d/Γ
    double gamma_bc = 0.0;            ///< rad/s, linear intercept/2
    double gamma_pe = 0.0;            ///< rad/s, exchange fit
    double gamma_pe_bound = 0.0;      ///< rad/s, from the linear intercept
    double intercept_ratio = 0.0;     ///< 2W_d/Γ
    std::string exchange_model;       ///< label of the exchange fit variant

    /// Human-readable report; frequencies in Hz.
    std::string text() const;
};

/// A model is selected only if its residual sum is at least 1% below the
/// other's; otherwise the result is a tie.
ModelComparison compare_models(const LinewidthSeries& series, const FitResult& linear,
                               const FitResult& exchange, double w_d, double gamma);

}  // namespace eit
