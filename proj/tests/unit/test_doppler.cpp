#include <doctest.h>

#include <cmath>

#include "eitlab/doppler.hpp"
#include "eitlab/errors.hpp"
#include "eitlab/quadrature.hpp"
#include "generators.hpp"

using namespace eit;

namespace {

MediumConfig medium_1e17() {
    MediumConfig m;
    m.number_density = 1e17;
    m.dipole_moment = constants::rb87_d1_effective_dipole;
    return m;
}

LambdaSystem fig1_system(double delta2_hz) {
    LambdaSystem s;
    s.gamma_b_decay = s.gamma_c_decay = 0.5 * hz_to_rad(5.75e6);
    s.gamma_bc = hz_to_rad(1.5e3);
    s.omega_c = hz_to_rad(1e5);
    s.delta2 = hz_to_rad(delta2_hz);
    return s;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Doppler half-width at 353.15 K") {
    CHECK(doppler_width(353.15, constants::rb87_d1_wavelength, constants::rb87_mass) ==
          doctest::Approx(1710426192.6041851).epsilon(1e-14));
    CHECK_THROWS_AS(doppler_width(-1, 795e-9, 1e-25), ConfigError);
}

TEST_CASE("closed-form average matches the reference values") {
    const double w = 1710426192.6041851;
    const auto m = medium_1e17();
    CHECK(rel(average_susceptibility_closed(fig1_system(0), m, w), cplx(0.0, 1.9152099524152974e-5)) < 1e-13);
    CHECK(rel(average_susceptibility_closed(fig1_system(5e3), m, w),
              cplx(1.2995453061961433e-7, 1.9576192286752445e-5)) < 1e-13);
    CHECK(rel(average_susceptibility_closed(fig1_system(4e4), m, w),
              cplx(1.4948280808552727e-8, 1.9615548885764168e-5)) < 1e-13);
}

TEST_CASE("numeric average over the Gaussian profile matches the reference") {
    const double w = 1710426192.6041851;
    DopplerProfile p;
    p.w_d = w;
    p.shape = ProfileShape::Gaussian;
    const cplx got = average_susceptibility_numeric(fig1_system(5e3), medium_1e17(), p);
    CHECK(rel(got, cplx(1.2288164231331423e-7, 1.9590614411417983e-5)) < 1e-8);
}

TEST_CASE("property: numeric Lorentzian average equals the closed form") {
    gen::Draw d(21);
    const auto m = medium_1e17();
    for (int i = 0; i < 60; ++i) {
        LambdaSystem s = gen::lambda_system(d);
        s.delta_pump = 0;
        DopplerProfile p;
        p.w_d = hz_to_rad(d.log_uniform(1e7, 5e8));
        const cplx closed = average_susceptibility_closed(s, m, p.w_d);
        const cplx numeric = average_susceptibility_numeric(s, m, p);
        CHECK(rel(numeric, closed) < 1e-7);
    }
}

TEST_CASE("closed form: Im chi even, Re chi odd in delta2") {
    gen::Draw d(22);
    const auto m = medium_1e17();
    for (int i = 0; i < 200; ++i) {
        LambdaSystem s = gen::lambda_system(d);
        const double w = hz_to_rad(d.log_uniform(1e7, 5e8));
        const cplx a = average_susceptibility_closed(s, m, w);
        s.delta2 = -s.delta2;
        const cplx b = average_susceptibility_closed(s, m, w);
        CHECK(std::abs(a + std::conj(b)) <= 1e-13 * std::abs(a));
    }
}

TEST_CASE("dropping the two-photon term is a small change near resonance") {
    const double w = 1710426192.6041851;
    const auto m = medium_1e17();
    for (double d2 : {0.0, 1e3, 1e4, 1e5, 1e6}) {
        const auto s = fig1_system(d2);
        const double a = average_susceptibility_closed(s, m, w).imag();
        const double b = average_susceptibility_closed(s, m, w, true).imag();
        CHECK(std::abs(a - b) / std::abs(a) < 1e-3);
    }
}

TEST_CASE("profiles share their peak density") {
    DopplerProfile g, l;
    g.w_d = l.w_d = 1e9;
    g.shape = ProfileShape::Gaussian;
    CHECK(profile_density(g, 0) == doctest::Approx(profile_density(l, 0)).epsilon(1e-15));
    CHECK(profile_density(g, g.w_d) == doctest::Approx(0.5 * profile_density(g, 0)).epsilon(1e-14));
    CHECK(profile_density(l, l.w_d) == doctest::Approx(0.5 * profile_density(l, 0)).epsilon(1e-14));
}

TEST_CASE("Gaussian profile integrates to one") {
    DopplerProfile g;
    g.w_d = 3e8;
    g.shape = ProfileShape::Gaussian;
    QuadratureConfig q;
    const std::vector<double> none;
    const auto r = integrate_adaptive([&](double x) { return cplx(profile_density(g, x)); }, -12 * g.w_d,
                                      12 * g.w_d, none, q);
    CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature on a sharp complex integrand") {
    // ∫ 1/(x − i a) over [−1, 1] = 2i·atan(1/a).
    const double a = 1e-6;
    QuadratureConfig q;
    q.rel_tol = 1e-12;
    const std::vector<double> bp{0.0};
    const auto r = integrate_adaptive([&](double x) { return 1.0 / cplx(x, -a); }, -1.0, 1.0, bp, q);
    CHECK(std::abs(r.value - cplx(0, 2 * std::atan(1 / a))) < 1e-10);
}

TEST_CASE("quadrature reports failure when the budget is exhausted") {
    QuadratureConfig q;
    q.rel_tol = 1e-14;
    q.max_subdivisions = 3;
    const std::vector<double> none;
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return cplx(std::sin(1e4 * x)); }, 0.0, 10.0, none, q),
                    QuadratureFailure);
}
