#include <doctest.h>

#include <cmath>

#include "eitlab/errors.hpp"
#include "eitlab/fitting.hpp"
#include "eitlab/propagation.hpp"
#include "generators.hpp"

using namespace eit;

namespace {

constexpr double kWd353 = 1710426192.6041851;

LambdaSystem zeeman() {
    LambdaSystem s;
    s.gamma_b_decay = s.gamma_c_decay = 0.5 * hz_to_rad(5.75e6);
    s.gamma_bc = hz_to_rad(1.5e3);
    return s;
}

CellModel cell(double temperature, double sigma = 0.0) {
    CellModel c;
    c.medium.dipole_moment = constants::rb87_d1_effective_dipole;
    c.temperature = temperature;
    c.pump_cross_section = sigma;
    return c;
}

PowerSweep sweep(std::size_t n, double d = 0.010) {
    PowerSweep p;
    p.beam_diameter = d;
    for (std::size_t i = 0; i < n; ++i) p.powers.push_back(1e-4 * (i + 1));
    return p;
}

}  // namespace

TEST_CASE("vapor number density matches the reference correlation") {
    CHECK(rb_number_density(300) == doctest::Approx(11774223822342491.0).epsilon(1e-12));
    CHECK(rb_number_density(353.15) == doctest::Approx(1.1974786920934762e+18).epsilon(1e-12));
    CHECK(rb_number_density(373.15) == doctest::Approx(4.8081123562910248e+18).epsilon(1e-12));
    CHECK_THROWS_AS(rb_number_density(260), RangeError);
    CHECK_THROWS_AS(rb_number_density(450), RangeError);
}

TEST_CASE("density rises with temperature across the melting point") {
    double last = 0;
    for (double t = 280; t < 440; t += 2.5) {
        const double n = rb_number_density(t);
        CHECK(n > last);
        last = n;
    }
}

TEST_CASE("power to Rabi frequency") {
    CHECK(rabi_from_power(1e-3, 0.010) == doctest::Approx(13604075.070151128).epsilon(1e-13));
    CHECK(rabi_from_power(1e-3, 0.012) == doctest::Approx(11336729.22512594).epsilon(1e-13));
    gen::Draw d(31);
    for (int i = 0; i < 100; ++i) {
        const double p = d.log_uniform(1e-6, 1.0), dia = d.log_uniform(1e-3, 0.05);
        CHECK(power_from_rabi(rabi_from_power(p, dia), dia) == doctest::Approx(p).epsilon(1e-14));
    }
    CHECK_THROWS_AS(rabi_from_power(0, 0.01), ConfigError);
}

TEST_CASE("pump profile decays at half the pump absorption") {
    auto c = cell(353.15, 4e-18);
    const auto p = pump_profile(c, 1e6);
    REQUIRE(p.z.size() == 257);
    CHECK(p.z.back() == doctest::Approx(c.medium.cell_length));
    const double alpha = 4e-18 * rb_number_density(353.15);
    CHECK(p.omega.back() == doctest::Approx(1e6 * std::exp(-0.5 * alpha * 0.05)).epsilon(1e-13));
    CHECK_THROWS_AS(pump_profile(c, 0), ConfigError);
    c.n_slices = 8;
    CHECK_THROWS_AS(pump_profile(c, 1e6), ConfigError);
}

TEST_CASE("without attenuation the thick cell reduces to the single-slice lineshape") {
    auto c = cell(353.15);
    c.n_slices = 16;
    auto s = zeeman();
    s.omega_c = hz_to_rad(1e5);
    const auto grid = symmetric_grid(hz_to_rad(1e5), 101);
    const auto scan = thick_cell_scan(c, s, kWd353, grid);
    const auto m = c.resolved_medium();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double alpha = absorption_coefficient(grid[i], s, m, kWd353);
        CHECK(scan.absorption[i] == doctest::Approx(alpha).epsilon(1e-13));
        CHECK(scan.transmission[i] == doctest::Approx(std::exp(-alpha * 0.05)).epsilon(1e-12));
    }
}

TEST_CASE("thin cell series is affine in the squared Rabi frequency with intercept 2 gamma_bc") {
    const auto c = cell(353.15);
    const auto series = thick_cell_series(c, zeeman(), kWd353, sweep(12), ScanGrid{});
    const auto fit = fit_linear(series);
    CHECK(rad_to_hz(fit.value("intercept")) == doctest::Approx(3000.0).epsilon(1e-6));
    const double g = zeeman().gamma();
    for (const auto& smp : series.samples)
        CHECK(smp.fwhm == doctest::Approx(fwhm_dephasing(hz_to_rad(1.5e3), smp.omega_c, kWd353, g)).epsilon(1e-6));
}

TEST_CASE("slope is temperature independent without attenuation") {
    const std::vector<double> temps{333.15, 353.15, 373.15};
    const auto slopes = slope_vs_temperature(cell(353.15), zeeman(), kWd353, temps, sweep(6), ScanGrid{});
    REQUIRE(slopes.size() == 3);
    for (const auto& s : slopes) CHECK(s.slope == doctest::Approx(slopes[0].slope).epsilon(1e-9));
    CHECK(slopes[2].number_density > slopes[0].number_density);
    CHECK(slopes[0].pump_absorption == 0.0);
}

TEST_CASE("pump attenuation lowers the slope as the cell heats") {
    const std::vector<double> temps{333.15, 353.15, 373.15};
    const auto slopes =
        slope_vs_temperature(cell(353.15, 4e-18), zeeman(), kWd353, temps, sweep(6), ScanGrid{});
    CHECK(slopes[0].slope > slopes[1].slope);
    CHECK(slopes[1].slope > slopes[2].slope);
}

TEST_CASE("power-broadening slope scales as 1/d^2 in a thin cell") {
    const auto a = fit_linear(thick_cell_series(cell(353.15), zeeman(), kWd353, sweep(6, 0.010), ScanGrid{}));
    const auto b = fit_linear(thick_cell_series(cell(353.15), zeeman(), kWd353, sweep(6, 0.012), ScanGrid{}));
    CHECK(b.value("slope") / a.value("slope") == doctest::Approx(std::pow(10.0 / 12.0, 2)).epsilon(1e-6));
}

TEST_CASE("sweep validation") {
    PowerSweep p = sweep(3);
    std::swap(p.powers[0], p.powers[1]);
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.powers.clear();
    CHECK_THROWS_AS(p.validate(), ConfigError);
    const std::vector<double> temps{353.15};
    CHECK_THROWS_AS(slope_vs_temperature(cell(353.15), zeeman(), kWd353, temps, sweep(2), ScanGrid{}), ConfigError);
}
