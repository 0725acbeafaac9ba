#include <doctest.h>

#include <cmath>

#include "eitlab/rng.hpp"
#include "eitlab/synth.hpp"

using namespace eit;

TEST_CASE("generator stream is the standard mt19937_64") {
    // The standard fixes the 10000th output of a default-seeded engine.
    std::mt19937_64 ref;
    ref.discard(9999);
    CHECK(ref() == 9981545732273789042ull);
    NoiseSource a(5489), b(5489);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("uniform draws stay inside the open unit interval") {
    NoiseSource r(1);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("normal deviates have unit variance") {
    NoiseSource r(2);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
    CHECK(s2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("zero noise leaves data unchanged") {
    ResonanceScan s;
    s.delta2 = {-1, 0, 1};
    s.absorption = {2, 1, 2};
    s.transmission = {0.5, 0.6, 0.5};
    NoiseSource r(3);
    const auto out = add_scan_noise(s, 0.0, 0.05, r);
    CHECK(out.absorption == s.absorption);
    CHECK(out.transmission == s.transmission);

    LinewidthSeries ser;
    ser.samples = {{1e-4, 0, 10, {}}, {2e-4, 0, 20, {}}};
    const auto o2 = add_series_noise(ser, 0.0, r);
    CHECK(o2.samples[1].fwhm == 20);
    CHECK_FALSE(o2.samples[1].fwhm_sigma.has_value());
}

TEST_CASE("series noise has the stated relative sigma") {
    LinewidthSeries ser;
    for (int i = 0; i < 4000; ++i) ser.samples.push_back({1e-4 * (i + 1), 0, 100.0, {}});
    NoiseSource r(4);
    const auto out = add_series_noise(ser, 0.05, r);
    double s2 = 0;
    for (const auto& smp : out.samples) {
        CHECK(*smp.fwhm_sigma == doctest::Approx(5.0));
        s2 += (smp.fwhm - 100.0) * (smp.fwhm - 100.0);
    }
    CHECK(std::sqrt(s2 / 4000) == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("scan noise keeps transmission consistent with absorption") {
    ResonanceScan s;
    s.delta2 = {-1, 0, 1};
    s.absorption = {20, 10, 20};
    s.transmission = {0, 0, 0};
    NoiseSource r(5);
    const auto out = add_scan_noise(s, 0.1, 0.05, r);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out.transmission[i] == std::exp(-out.absorption[i] * 0.05));
}
