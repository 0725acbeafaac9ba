#include <doctest.h>

#include <cmath>

#include "eitlab/errors.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/rng.hpp"
#include "eitlab/synth.hpp"
#include "generators.hpp"

using namespace eit;

namespace {

constexpr double kWd353 = 1710426192.6041851;

ResonanceScan lorentz_scan(const LorentzianParams& p, std::size_t n, double half_span,
                           ScanKind kind = ScanKind::Absorption) {
    ResonanceScan s;
    s.kind = kind;
    s.delta2 = symmetric_grid(half_span, n);
    auto& col = kind == ScanKind::Absorption ? s.absorption : s.transmission;
    for (double x : s.delta2) col.push_back(lorentzian_model(x, p, kind));
    return s;
}

LinewidthSeries line_series(double slope, double intercept, std::size_t n) {
    LinewidthSeries s;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = 1e-4 * (i + 1);
        s.samples.push_back({p, 0.0, intercept + slope * p, {}});
    }
    return s;
}

FitResult fake_fit(const char* model, double rss, std::vector<FitParameter> params) {
    FitResult f;
    f.model = model;
    f.rss = rss;
    f.parameters = std::move(params);
    return f;
}

}  // namespace

TEST_CASE("LM solves an exponential decay exactly") {
    std::vector<double> t, y;
    for (int i = 0; i < 20; ++i) {
        t.push_back(0.1 * i);
        y.push_back(3.0 * std::exp(-1.7 * t.back()) + 0.2);
    }
    auto res = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(20);
        for (int i = 0; i < 20; ++i) r(i) = q(0) * std::exp(-q(1) * t[i]) + q(2) - y[i];
        return r;
    };
    Eigen::VectorXd x0(3), scale(3);
    x0 << 1.0, 1.0, 0.0;
    scale << 1.0, 1.0, 1.0;
    const auto out = levenberg_marquardt(res, x0, scale);
    CHECK(out.converged);
    CHECK(out.x(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(out.x(1) == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(out.x(2) == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("LM walks the Rosenbrock valley") {
    auto res = [](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(2);
        r << 10 * (q(1) - q(0) * q(0)), 1 - q(0);
        return r;
    };
    Eigen::VectorXd x0(2), scale = Eigen::VectorXd::Ones(2);
    x0 << -1.2, 1.0;
    const auto out = levenberg_marquardt(res, x0, scale);
    CHECK(out.converged);
    CHECK(out.x(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(out.x(1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("LM reports rank deficiency") {
    auto res = [](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(3);
        r << q(0) + q(1) - 1, q(0) + q(1) - 2, q(0) + q(1) - 3;
        return r;
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2), scale = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(levenberg_marquardt(res, x0, scale), RankDeficient);
}

TEST_CASE("LM hits the iteration limit") {
    auto res = [](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(2);
        r << 10 * (q(1) - q(0) * q(0)), 1 - q(0);
        return r;
    };
    Eigen::VectorXd x0(2), scale = Eigen::VectorXd::Ones(2);
    x0 << -1.2, 1.0;
    LMOptions o;
    o.max_iterations = 2;
    CHECK_FALSE(levenberg_marquardt(res, x0, scale, o).converged);
}

TEST_CASE("straight line against hand-computed values") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 4, 8};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.2).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(f.rss == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(f.dof == 2);
    CHECK(f.sigma_slope == doctest::Approx(std::sqrt(0.18)).epsilon(1e-14));
    CHECK(f.sigma_intercept == doctest::Approx(std::sqrt(0.63)).epsilon(1e-14));
    CHECK(f.covariance == doctest::Approx(-0.27).epsilon(1e-14));
}

TEST_CASE("two-point line has no residual information") {
    const std::vector<double> x{1, 2}, y{3, 5};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.sigma_slope == 0.0);
    const std::vector<double> same{1, 1};
    CHECK_THROWS_AS(fit_line(same, y), RankDeficient);
}

TEST_CASE("linear fit of exact data returns gamma_bc as half the intercept") {
    const auto f = fit_linear(line_series(3e8, hz_to_rad(3e3), 12));
    CHECK(rad_to_hz(f.value("intercept")) == doctest::Approx(3000.0).epsilon(1e-10));
    CHECK(rad_to_hz(f.value("gamma_bc")) == doctest::Approx(1500.0).epsilon(1e-10));
    CHECK(f.value("slope") == doctest::Approx(3e8).epsilon(1e-12));
}

TEST_CASE("linear fit rejects degenerate series") {
    CHECK_THROWS_AS(fit_linear(line_series(1, 1, 2)), DegenerateData);
    LinewidthSeries s = line_series(1, 1, 4);
    for (auto& smp : s.samples) smp.power_w = 1e-3;
    CHECK_THROWS_AS(fit_linear(s), RankDeficient);
}

TEST_CASE("Lorentzian fit recovers exact parameters") {
    const LorentzianParams truth{120.0, 4e4, 1700.0, 1850.0};
    const auto f = fit_lorentzian(lorentz_scan(truth, 401, 2e5));
    CHECK(f.value("center") == doctest::Approx(120.0).epsilon(1e-6));
    CHECK(f.value("fwhm") == doctest::Approx(4e4).epsilon(1e-9));
    CHECK(f.value("depth") == doctest::Approx(1700.0).epsilon(1e-9));
    CHECK(f.value("baseline") == doctest::Approx(1850.0).epsilon(1e-9));

    const LorentzianParams peak{0.0, 2e4, 0.3, 0.1};
    const auto g = fit_lorentzian(lorentz_scan(peak, 201, 1e5, ScanKind::Transmission));
    CHECK(g.value("fwhm") == doctest::Approx(2e4).epsilon(1e-9));
    CHECK(g.value("depth") == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("Lorentzian fit: too few samples or no contrast") {
    const LorentzianParams truth{0.0, 1.0, 1.0, 2.0};
    CHECK_THROWS_AS(fit_lorentzian(lorentz_scan(truth, 15, 5.0)), DegenerateData);
    ResonanceScan flat = lorentz_scan(truth, 31, 5.0);
    flat.absorption.assign(31, 2.0);
    CHECK_THROWS_AS(fit_lorentzian(flat), DegenerateData);
}

TEST_CASE("Lorentzian fit: 1-sigma intervals cover the truth at 1% noise") {
    const LorentzianParams truth{0.0, 4e4, 1700.0, 1850.0};
    const ResonanceScan clean = lorentz_scan(truth, 201, 2e5);
    int covered = 0;
    const int trials = 100;
    for (int seed = 0; seed < trials; ++seed) {
        NoiseSource rng(1000 + seed);
        const auto f = fit_lorentzian(add_scan_noise(clean, 0.01, 0.05, rng));
        if (std::abs(f.value("fwhm") - truth.fwhm) <= 2 * f.sigma("fwhm")) ++covered;
    }
    // A 2σ band should hold ~95%; allow sampling slack.
    CHECK(covered >= 88);
}

TEST_CASE("model comparison needs a 1% margin") {
    const LinewidthSeries s = line_series(1, 1, 5);
    const auto lin = [](double rss) {
        auto f = fake_fit("linear", rss, {{"slope", 1, 0}, {"intercept", 2e4, 0}});
        f.derived = {{"gamma_bc", 1e4, 0}};
        return f;
    };
    const auto ex = [](double rss) { return fake_fit("exchange-1p", rss, {{"gamma_pe", 100, 0}}); };
    const double g = hz_to_rad(5.75e6);
    CHECK(compare_models(s, lin(1.0), ex(1.005), kWd353, g).selected == ModelChoice::Tie);
    CHECK(compare_models(s, lin(1.0), ex(1.02), kWd353, g).selected == ModelChoice::Linear);
    CHECK(compare_models(s, lin(1.02), ex(1.0), kWd353, g).selected == ModelChoice::Exchange);
    const auto c = compare_models(s, lin(1.0), ex(2.0), kWd353, g);
    CHECK(c.gamma_pe_bound == doctest::Approx(2e4 * g / (4 * kWd353)));
    CHECK(c.intercept_ratio == doctest::Approx(94.686185511932623).epsilon(1e-12));
    CHECK(c.text().find("selected model: linear") != std::string::npos);
}

TEST_CASE("exchange fit recovers the rate from its own forward model") {
    LambdaSystem base;
    base.gamma_b_decay = base.gamma_c_decay = 0.5 * hz_to_rad(5.75e6);
    MediumConfig m;
    m.number_density = 1e17;
    m.dipole_moment = constants::rb87_d1_effective_dipole;
    DopplerProfile p;
    p.w_d = kWd353;
    p.shape = ProfileShape::Gaussian;
    PowerSweep optics;
    ScanGrid grid;
    grid.points = 101;
    const PopExchangeForward fwd(base, m, p, optics, grid);

    const double truth = hz_to_rad(150);
    LinewidthSeries s;
    for (double pw : {2e-4, 4e-4, 6e-4, 8e-4, 1e-3}) s.samples.push_back({pw, 0, fwd.fwhm(pw, truth), {}});
    PopExchangeFitOptions o;
    o.initial_gamma_pe = hz_to_rad(80);
    const auto f = fit_popexchange(s, fwd, o);
    CHECK(f.model == "exchange-1p");
    CHECK(f.value("gamma_pe") == doctest::Approx(truth).epsilon(1e-5));
    CHECK(f.value("intercept") == doctest::Approx(4 * truth * kWd353 / base.gamma()).epsilon(1e-5));
    CHECK(fwd.cache_size() > 5);
}
